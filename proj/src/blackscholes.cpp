#include "smilewing/blackscholes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "smilewing/errors.hpp"
#include "smilewing/special.hpp"

namespace smilewing::bs {

namespace {

void require_finite(double k, double v) {
    if (!std::isfinite(k) || !std::isfinite(v)) throw InvalidArgument("bs: non-finite input");
    if (!(v > 0.0)) throw InvalidArgument("bs: total volatility must be positive");
}

// R(t) = 1/(sqrt(pi) erfcx(t)) - t from the continued-fraction tail; it is
// the log-derivative -d/dt log erfcx(t) halved, free of the 2t cancellation.
double erfcx_log_slope_half(double t) {
    double tail = t;
    for (int n = 160; n >= 2; --n) tail = t + 0.5 * n / tail;
    return 0.5 / tail;
}

// log(erfcx(a) - erfcx(a + gap)) for a > 0, gap > 0. The gap is passed
// separately since a + gap may round to a.
double log_erfcx_gap(double a, double gap) {
    const double b = a + gap;
    if (a < 6.0 || gap > 0.1 * a) {
        const double diff = erfcx(a) - erfcx(b);
        return diff > 0.0 ? std::log(diff) : -kInf;
    }
    // log erfcx(a) - log erfcx(b) = 2 * int_a^b R(t) dt, five-point Gauss-Legendre.
    static constexpr double x5[] = {0.0, 0.5384693101056831, 0.9061798459386640};
    static constexpr double w5[] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * gap;
    double integral = w5[0] * erfcx_log_slope_half(mid);
    for (int i = 1; i < 3; ++i) {
        integral += w5[i] * (erfcx_log_slope_half(mid - half * x5[i]) +
                             erfcx_log_slope_half(mid + half * x5[i]));
    }
    integral *= half;
    return std::log(erfcx(a)) + log1mexp(2.0 * integral);
}

// log c(k, v) for k >= 0.
double log_call_otm(double k, double v) {
    const double d_1 = -k / v + 0.5 * v;
    const double d_2 = d_1 - v;
    constexpr double r2 = std::numbers::sqrt2 / 2.0;
    if (d_1 >= 0.0) {
        // Phi(d1) - Phi(d2) as a sum of two positive erf terms, then the e^k excess.
        const double spread = 0.5 * (std::erf(d_1 * r2) + std::erf(-d_2 * r2));
        return std::log(spread - std::expm1(k) * ndtr(d_2));
    }
    // Both d's negative: c = 1/2 e^{-d1^2/2} [erfcx(-d1/sqrt2) - erfcx(-d2/sqrt2)].
    return -std::numbers::ln2 - 0.5 * d_1 * d_1 + log_erfcx_gap(-d_1 * r2, v * r2);
}

}  // namespace

double d1(double k, double v) { return -k / v + 0.5 * v; }

double log_otm_price(double k, double v) {
    require_finite(k, v);
    return k >= 0.0 ? log_call_otm(k, v) : k + log_call_otm(-k, v);
}

NormalizedPrice call(double k, double v) {
    const double extrinsic = log_otm_price(k, v);
    if (k >= 0.0) return {extrinsic, extrinsic, OptionType::call};
    return {log_add(log1mexp(-k), extrinsic), extrinsic, OptionType::call};
}

NormalizedPrice put(double k, double v) {
    const double extrinsic = log_otm_price(k, v);
    if (k <= 0.0) return {extrinsic, extrinsic, OptionType::put};
    return {log_add(std::log(std::expm1(k)), extrinsic), extrinsic, OptionType::put};
}

NormalizedPrice from_log_price(double log_price, double k, OptionType type) {
    const bool itm = type == OptionType::call ? k < 0.0 : k > 0.0;
    if (!itm) return {log_price, log_price, type};
    const double log_intrinsic =
        type == OptionType::call ? log1mexp(-k) : std::log(std::expm1(k));
    if (!(log_price > log_intrinsic)) return {log_price, -kInf, type};
    return {log_price, log_sub(log_price, log_intrinsic), type};
}

double implied_total_vol(const NormalizedPrice& price, double k) {
    if (!std::isfinite(k) || std::isnan(price.log_extrinsic)) {
        throw InvalidArgument("implied_total_vol: non-finite input");
    }
    const double target = price.log_extrinsic;
    // Extrinsic value lies in (0, min(1, e^k)).
    const double ceiling = std::min(0.0, k);
    if (target == -kInf || !(target < ceiling)) {
        std::ostringstream msg;
        msg << "implied_total_vol: price out of bounds at k=" << k << " (log extrinsic " << target
            << ", must lie in (-inf, " << ceiling << "))";
        throw PriceBoundsError(msg.str());
    }
    auto f = [&](double v) { return log_otm_price(k, v) - target; };
    double lo = 1e-8;
    double hi = std::sqrt(2.0 * std::abs(k)) + 10.0;
    double f_lo = f(lo);
    double f_hi = f(hi);
    for (int i = 0; i < 8 && f_lo > 0.0; ++i) {
        hi = lo;
        f_hi = f_lo;
        lo *= 1e-4;
        f_lo = f(lo);
    }
    for (int i = 0; i < 8 && f_hi < 0.0; ++i) {
        lo = hi;
        f_lo = f_hi;
        hi *= 4.0;
        f_hi = f(hi);
    }
    if (f_lo > 0.0 || f_hi < 0.0 || std::isnan(f_lo) || std::isnan(f_hi)) {
        std::ostringstream msg;
        msg << "implied_total_vol: cannot bracket root at k=" << k << " (log extrinsic " << target
            << ")";
        throw BracketError(msg.str());
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    boost::uintmax_t iterations = 200;
    auto tol = [](double a, double b) {
        return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iterations);
    return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

TailBounds normal_cdf_bounds(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("normal_cdf_bounds: require x > 0");
    const double upper = std::exp(-0.5 * x * x) / (std::sqrt(2.0 * std::numbers::pi) * x);
    return {upper * (1.0 - 1.0 / (x * x)), upper};
}

double epsilon1_residual(double k, double v, const NormalizedPrice& price) {
    require_finite(k, v);
    if (std::isnan(price.log_extrinsic)) throw InvalidArgument("epsilon1_residual: NaN price");
    const double log_c = price.log_extrinsic - std::min(k, 0.0);
    const double d = d1(std::abs(k), v);
    return log_c + 0.5 * d * d;
}

}  // namespace smilewing::bs
