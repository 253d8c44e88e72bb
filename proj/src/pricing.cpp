#include "smilewing/pricing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <thread>

#include "smilewing/errors.hpp"
#include "smilewing/legendre.hpp"
#include "smilewing/quadrature.hpp"
#include "smilewing/special.hpp"

namespace smilewing {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// log P[X > x] (upper) or log P[X <= x] for the Merton Poisson mixture.
TailEstimate merton_tail(const MertonParams& p, double x, bool upper) {
    const double lt = p.lambda * p.T;
    const double m = p.mu * p.T;
    const double s2 = p.sigma * p.sigma * p.T;
    const double d2 = p.delta_j * p.delta_j;
    const bool lattice = s2 == 0.0 && d2 == 0.0;

    auto log_weight = [&](double n) { return -lt + n * std::log(lt) - std::lgamma(n + 1.0); };
    auto term = [&](long n) {
        const double dn = static_cast<double>(n);
        const double var = s2 + dn * d2;
        const double mean = m + dn * p.alpha_j;
        if (var == 0.0) return (upper ? mean > x : mean <= x) ? log_weight(dn) : -kInf;
        const double z = (x - mean) / std::sqrt(var);
        return log_weight(dn) + (upper ? log_ndtr(-z) : log_ndtr(z));
    };

    // pure lattice: atoms at m + n alpha_j, the event is a range of n
    long start = 0;
    long stop = -1;  // inclusive end of a finite range; -1 means open-ended
    if (lattice) {
        const double e = (x - m) / p.alpha_j;
        const bool increasing = p.alpha_j > 0.0;
        if (upper == increasing) {
            start = std::max(0L, static_cast<long>(increasing ? std::floor(e) + 1.0 : std::ceil(e)));
        } else {
            stop = static_cast<long>(increasing ? std::floor(e) : std::ceil(e) - 1.0);
            if (stop < 0) return {-kInf, 0.0, TailRoute::mixture_series};
        }
    }

    double acc = -kInf, best = -kInf, prev = -kInf;
    for (long n = start;; ++n) {
        if (stop >= 0 && n > stop) break;
        const double t = term(n);
        acc = log_add(acc, t);
        best = std::max(best, t);
        if (stop < 0 && static_cast<double>(n) > lt && t < best - 45.0 && t <= prev) break;
        if (n - start > 50000000) throw NumericalError("merton tail: mixture series did not terminate");
        prev = t;
    }
    return {acc, 1e-15 * std::max(1.0, std::abs(acc)), TailRoute::mixture_series};
}

double log_expm1(double d) { return d > 30.0 ? d + std::log1p(-std::exp(-d)) : std::log(std::expm1(d)); }

QuadratureOptions quad_opts(const PricingOptions& opts) {
    QuadratureOptions q;
    q.rel_tol = opts.rel_tol;
    return q;
}

double kpp(const ModelSpec& m, double z, double lo, double hi) {
    double h = 1e-5 * std::max(1.0, std::abs(z));
    if (std::isfinite(lo)) h = std::min(h, 0.5 * (z - lo));
    if (std::isfinite(hi)) h = std::min(h, 0.5 * (hi - z));
    const double d = (m.log_mgf_derivative(z + h) - m.log_mgf_derivative(z - h)) / (2.0 * h);
    return std::max(d, 1e-300);
}

struct LineIntegral {
    double value;
    double error;
};

// int_0^inf g(u) du on doubling panels, where |g(u)| <= mag(u); stops once the
// remaining contribution is below 1e-17 of the running total.
template <class G, class Mag>
LineIntegral integrate_line(G g, Mag mag, double u1, double rel_tol) {
    const double mag0 = mag(0.0);
    double sum = 0.0, err = 0.0;
    double a = 0.0, b = u1;
    int quiet = 0;
    for (int i = 0; i < 1100; ++i) {
        const auto r = integrate(g, a, b, rel_tol, 1e-18 * mag0 * u1);
        sum += r.value;
        err += r.abs_error;
        const double mb = mag(b);
        const double remaining = mb * b;
        quiet = (remaining < 1e-17 * std::abs(sum) || mb == 0.0) ? quiet + 1 : 0;
        if (quiet >= 2) return {sum, err + remaining};
        a = b;
        b *= 2.0;
    }
    throw NumericalError("fourier inversion: integrand does not decay along the contour");
}

// log P[X > x] (upper) or log P[X <= x] on the vertical line through the
// saddle point, z0 > 0 for the upper tail and z0 < 0 for the lower one.
TailEstimate contour_tail(const ModelSpec& m, double x, bool upper, const PricingOptions& opts) {
    const auto dom = m.mgf_domain();
    const double edge = upper ? dom.upper : dom.lower;
    const double probe = upper ? std::min(0.05, 0.5 * edge) : std::max(-0.05, 0.5 * edge);
    const double lo_lim = upper ? 0.0 : dom.lower, hi_lim = upper ? dom.upper : 0.0;
    const double sd = std::sqrt(kpp(m, probe, upper ? 0.0 : dom.lower, upper ? dom.upper : 0.0));
    const double zmin = std::min(0.5 * std::abs(edge), 1.0 / sd);
    const auto sp = solve_saddle(m, x, lo_lim, hi_lim);
    const double z0 = upper ? std::max(sp.z, zmin) : std::min(sp.z, -zmin);
    const double K0 = m.log_mgf(z0);
    const double w = 1.0 / std::sqrt(kpp(m, z0, dom.lower, dom.upper));
    const double gap = std::isfinite(edge) ? std::abs(edge - z0) : kInf;
    const double u1 = 0.25 * std::min({std::abs(z0), w, std::max(gap, 1e-300)});
    const double sign = upper ? 1.0 : -1.0;

    auto g = [&](double u) {
        const cplx z(z0, u);
        const cplx e = std::exp(m.log_mgf(z) - K0 - cplx(0.0, u * x)) / z;
        return sign * e.real();
    };
    auto mag = [&](double u) {
        const cplx z(z0, u);
        return std::exp(m.log_mgf(z).real() - K0) / std::abs(z);
    };
    const auto r = integrate_line(g, mag, u1, opts.rel_tol);
    if (!(r.value > 0.0) || r.error > 0.1 * r.value) {
        std::ostringstream msg;
        msg << "fourier inversion failed at x = " << x << " (integral " << r.value << ", error " << r.error << ")";
        throw NumericalError(msg.str());
    }
    return {K0 - z0 * x + std::log(r.value / kPi), r.error / r.value, TailRoute::saddle_contour};
}

// Real-axis inversion: F(x) = 1/2 - (1/pi) int_0^inf Im[e^{-iux} phi(u)]/u du.
TailEstimate gil_pelaez_tail(const ModelSpec& m, double x, bool upper, const PricingOptions& opts) {
    auto g = [&](double u) { return (std::exp(cplx(0.0, -u * x)) * m.char_fn(u)).imag() / u; };
    auto mag = [&](double u) { return u == 0.0 ? 1.0 : std::abs(m.char_fn(u)) / u; };
    const double u1 = 0.5 / (1.0 + std::abs(x));
    const auto r = integrate_line(g, mag, u1, opts.rel_tol);
    const double p = upper ? 0.5 + r.value / kPi : 0.5 - r.value / kPi;
    const double err = r.error / kPi + 1e-15;
    if (!(p > 100.0 * err)) {
        std::ostringstream msg;
        msg << "real-axis inversion cannot resolve a tail probability of this size at x = " << x
            << " (estimate " << p << ", absolute error " << err << ")";
        throw NumericalError(msg.str());
    }
    return {std::log(p), err / p, TailRoute::gil_pelaez};
}

void require_condition(const ModelSpec& m, Side side) {
    const auto check = check_condition(m.critical_moments(), side);
    if (check.holds) return;
    std::ostringstream msg;
    msg << m.name() << ": "
        << (side == Side::right ? "E exp((1+eps)X) is infinite for every eps > 0; right-tail call integral not licensed"
                                : "E exp(-eps X) is infinite for every eps > 0; left-tail put integral not licensed");
    throw ConditionError(msg.str());
}

}  // namespace

std::string_view to_string(TailRoute route) {
    switch (route) {
        case TailRoute::density_quadrature: return "density_quadrature";
        case TailRoute::mixture_series: return "mixture_series";
        case TailRoute::saddle_contour: return "saddle_contour";
        case TailRoute::gil_pelaez: return "gil_pelaez";
    }
    return "?";
}

std::string_view to_string(PointStatus status) {
    switch (status) {
        case PointStatus::ok: return "ok";
        case PointStatus::unreachable: return "unreachable";
        case PointStatus::failed: return "failed";
    }
    return "?";
}

TailEstimate tail_cdf_fourier(const ModelSpec& m, double k, Side side, const PricingOptions& opts) {
    if (!m.has_complex_mgf()) throw InvalidArgument(std::string(m.name()) + ": no closed-form characteristic exponent");
    const bool upper = side == Side::right;
    const double x = upper ? k : -k;
    const auto dom = m.mgf_domain();
    const bool has_line = upper ? dom.upper > 0.0 : dom.lower < 0.0;
    if (has_line) return contour_tail(m, x, upper, opts);
    return gil_pelaez_tail(m, x, upper, opts);
}

TailEstimate tail_cdf_estimate(const ModelSpec& m, double k, Side side, const PricingOptions& opts) {
    if (!std::isfinite(k)) throw InvalidArgument("tail_cdf: k must be finite");
    const bool upper = side == Side::right;
    const double x = upper ? k : -k;
    if (const auto* p = std::get_if<MertonParams>(&m.params())) return merton_tail(*p, x, upper);
    if (m.has_density()) {
        auto lf = [&](double y) { return m.exact_log_density(y); };
        const auto r = upper ? log_integrate_upper(lf, x, quad_opts(opts)) : log_integrate_lower(lf, x, quad_opts(opts));
        return {r.log_value, r.relative_error(), TailRoute::density_quadrature};
    }
    return tail_cdf_fourier(m, k, side, opts);
}

double tail_cdf(const ModelSpec& m, double k, Side side) { return tail_cdf_estimate(m, k, side).log_value; }

PriceEstimate call_from_tail(const ModelSpec& m, double k, const PricingOptions& opts) {
    require_condition(m, Side::right);
    double inner = 0.0;
    auto lf = [&](double x) {
        const auto t = tail_cdf_estimate(m, x, Side::right, opts);
        inner = std::max(inner, t.error);
        return x + t.log_value;
    };
    const auto r = log_integrate_upper(lf, k, quad_opts(opts));
    return {bs::from_log_price(r.log_value, k, OptionType::call), r.relative_error() + inner, "call_tail_integral"};
}

PriceEstimate put_from_tail(const ModelSpec& m, double k, const PricingOptions& opts) {
    if (!(k >= 0.0)) throw InvalidArgument("put_from_tail: k must be >= 0 (the put strike is -k)");
    require_condition(m, Side::left);
    double inner = 0.0;
    auto lf = [&](double x) {
        const auto t = tail_cdf_estimate(m, x, Side::left, opts);
        inner = std::max(inner, t.error);
        return -x + t.log_value;
    };
    const auto r = log_integrate_upper(lf, k, quad_opts(opts));
    return {bs::from_log_price(r.log_value, -k, OptionType::put), r.relative_error() + inner, "put_tail_integral"};
}

PriceEstimate call_from_density(const ModelSpec& m, double k, const PricingOptions& opts) {
    if (!m.has_density()) throw InvalidArgument(std::string(m.name()) + ": no density for the direct call integral");
    require_condition(m, Side::right);
    auto lf = [&](double x) { return k + log_expm1(x - k) + m.exact_log_density(x); };
    const auto r = log_integrate_upper(lf, k, quad_opts(opts));
    return {bs::from_log_price(r.log_value, k, OptionType::call), r.relative_error(), "call_density_integral"};
}

PriceEstimate call_from_cf(const ModelSpec& m, double k, const PricingOptions& opts) {
    if (!m.has_complex_mgf()) throw InvalidArgument(std::string(m.name()) + ": no closed-form characteristic exponent");
    require_condition(m, Side::right);
    const auto dom = m.mgf_domain();
    const double sd = std::sqrt(kpp(m, 1.0, dom.lower, dom.upper));
    const double zmin = 1.0 + std::min(0.5 * (dom.upper - 1.0), 1.0 / sd);
    const auto sp = solve_saddle(m, k, 1.0, dom.upper);
    const double z0 = std::max(sp.z, zmin);
    const double K0 = m.log_mgf(z0);
    const double w = 1.0 / std::sqrt(kpp(m, z0, dom.lower, dom.upper));
    const double gap = std::isfinite(dom.upper) ? dom.upper - z0 : kInf;
    const double u1 = 0.25 * std::min({z0 - 1.0, w, std::max(gap, 1e-300)});
    auto g = [&](double u) {
        const cplx z(z0, u);
        return (std::exp(m.log_mgf(z) - K0 - cplx(0.0, u * k)) / (z * (z - 1.0))).real();
    };
    auto mag = [&](double u) {
        const cplx z(z0, u);
        return std::exp(m.log_mgf(z).real() - K0) / std::abs(z * (z - 1.0));
    };
    const auto r = integrate_line(g, mag, u1, opts.rel_tol);
    if (!(r.value > 0.0) || r.error > 0.1 * r.value) throw NumericalError("fourier call: contour integral failed");
    const double log_c = K0 + (1.0 - z0) * k + std::log(r.value / kPi);
    return {bs::from_log_price(log_c, k, OptionType::call), r.error / r.value, "call_fourier_contour"};
}

PriceEstimate otm_price(const ModelSpec& m, double k, const PricingOptions& opts) {
    if (k >= 0.0) return call_from_tail(m, k, opts);
    return put_from_tail(m, -k, opts);
}

SmileCurve smile_curve(const ModelSpec& m, std::span<const double> grid, Side side, const PricingOptions& opts) {
    std::vector<double> strikes(grid.begin(), grid.end());
    if (side == Side::left) {
        for (double& k : strikes) k = -k;
    }
    std::sort(strikes.begin(), strikes.end());
    SmileCurve curve;
    curve.points.resize(strikes.size());

    auto work = [&](std::size_t i) {
        SmilePoint pt{strikes[i], kNaN, kNaN, kNaN, kNaN, kNaN, PointStatus::ok, {}};
        try {
            const auto est = otm_price(m, pt.k, opts);
            pt.log_price = est.price.log_price;
            pt.quad_err = est.error;
            if (pt.log_price < opts.log_price_floor) {
                pt.status = PointStatus::unreachable;
                std::ostringstream msg;
                msg << "log price " << pt.log_price << " below the inversion floor " << opts.log_price_floor;
                pt.reason = msg.str();
            } else {
                pt.total_vol = bs::implied_total_vol(est.price, pt.k);
                if (pt.k != 0.0) {
                    pt.slope = pt.total_vol * pt.total_vol / std::abs(pt.k);
                    pt.epsilon1 = bs::epsilon1_residual(pt.k, pt.total_vol, est.price);
                }
            }
        } catch (const Error& e) {
            pt.status = PointStatus::failed;
            pt.reason = e.what();
        }
        curve.points[i] = std::move(pt);
    };

    unsigned n_threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, strikes.size()));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < strikes.size(); ++i) work(i);
        return curve;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < strikes.size(); i = next++) work(i);
        });
    }
    for (auto& th : pool) th.join();
    return curve;
}

}  // namespace smilewing
