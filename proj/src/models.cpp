#include "smilewing/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "smilewing/errors.hpp"
#include "smilewing/quadrature.hpp"
#include "smilewing/special.hpp"

namespace smilewing {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool finite(double x) { return std::isfinite(x); }

double fmls_sec(double alpha) { return 1.0 / std::cos(kPi * alpha / 2.0); }

bool integrable(const TailShape& s, Side side) {
    // sign of the linear coefficient after mapping the side to +infinity
    const double lin = side == Side::right ? s.b : -s.b;
    if (s.rho > 1.0) return true;
    if (s.rho == 1.0) return lin + s.c < 0.0;
    return lin <= 0.0;
}

double tail_log(const TailShape& s, double x) {
    const double ax = std::abs(x);
    return s.log_c + s.a * std::log(ax) + s.b * x + s.c * std::pow(ax, s.rho);
}

// d/dx of tail_log at x = +1 (right) or x = -1 (left)
double tail_slope_at_unit(const TailShape& s, Side side) {
    if (side == Side::right) return s.a + s.b + s.c * s.rho;
    return -s.a + s.b - s.c * s.rho;
}

LogIntegral integrate_shape(const std::function<double(double)>& g) {
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    const auto a = log_integrate_lower(g, -1.0, opts);
    const auto b = log_integrate(g, -1.0, 0.0, opts);
    const auto c = log_integrate(g, 0.0, 1.0, opts);
    const auto d = log_integrate_upper(g, 1.0, opts);
    const double parts[] = {a.log_value, b.log_value, c.log_value, d.log_value};
    const double errs[] = {a.log_error, b.log_error, c.log_error, d.log_error};
    return {log_sum_exp(parts), log_sum_exp(errs), a.evaluations + b.evaluations + c.evaluations + d.evaluations};
}

// Poisson-mixture log density of the Merton model.
double merton_log_density(const MertonParams& p, double x) {
    const double lt = p.lambda * p.T;
    const double m = p.mu * p.T;
    const double s2 = p.sigma * p.sigma * p.T;
    const double d2 = p.delta_j * p.delta_j;
    double acc = -kInf;
    double best = -kInf;
    double prev = -kInf;
    for (long n = 0;; ++n) {
        const double var = s2 + static_cast<double>(n) * d2;
        const double dx = x - m - static_cast<double>(n) * p.alpha_j;
        const double lw = -lt + static_cast<double>(n) * std::log(lt) - std::lgamma(static_cast<double>(n) + 1.0);
        const double term = lw - dx * dx / (2.0 * var) - 0.5 * std::log(2.0 * kPi * var);
        acc = log_add(acc, term);
        best = std::max(best, term);
        const bool past_mode = static_cast<double>(n) > lt;
        if (past_mode && term < best - 45.0 && term < prev) break;
        if (n > 10000000) throw NumericalError("merton density: series did not terminate");
        prev = term;
    }
    return acc;
}

}  // namespace

bool MgfDomain::contains(double z) const {
    if (std::isnan(z)) return false;
    const bool lo = lower_closed ? z >= lower : z > lower;
    const bool hi = upper_closed ? z <= upper : z < upper;
    return lo && hi;
}

ModelSpec::ModelSpec(ModelParams params, DriftMode drift) : params_(std::move(params)), drift_mode_(drift) {
    setup();
}

void ModelSpec::setup() {
    const bool mart = drift_mode_ == DriftMode::martingale;
    std::visit(
        overloaded{
            [&](BlackScholesParams& p) {
                require(p.sigma > 0.0 && finite(p.sigma), "bs: sigma must be positive");
                require(p.T > 0.0 && finite(p.T), "bs: T must be positive");
                require(finite(p.mu), "bs: mu must be finite");
                if (mart) p.mu = -0.5 * p.sigma * p.sigma;
            },
            [&](NigParams& p) {
                require(p.delta > 0.0 && finite(p.delta), "nig: delta must be positive");
                require(p.T > 0.0 && finite(p.T), "nig: T must be positive");
                require(finite(p.alpha) && finite(p.beta) && p.alpha > std::abs(p.beta),
                        "nig: need alpha > |beta| (gamma^2 = alpha^2 - beta^2 > 0)");
                require(finite(p.mu), "nig: mu must be finite");
                if (mart) {
                    require(p.alpha - p.beta >= 1.0, "nig: E exp(X) is infinite (alpha - beta < 1); no martingale drift");
                    const double gamma = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
                    const double shifted = std::sqrt((p.alpha - p.beta - 1.0) * (p.alpha + p.beta + 1.0));
                    p.mu = -p.delta * (gamma - shifted);
                }
            },
            [&](FmlsParams& p) {
                require(p.alpha > 1.0 && p.alpha <= 2.0, "fmls: alpha must lie in (1, 2]");
                require(p.sigma >= 0.0 && finite(p.sigma), "fmls: sigma must be >= 0");
                require(p.T > 0.0 && finite(p.T), "fmls: T must be positive");
                require(finite(p.mu), "fmls: mu must be finite");
                if (mart) p.mu = std::pow(p.sigma, p.alpha) * fmls_sec(p.alpha);
            },
            [&](MertonParams& p) {
                require(p.sigma >= 0.0 && finite(p.sigma), "merton: sigma must be >= 0");
                require(p.lambda > 0.0 && finite(p.lambda), "merton: lambda must be positive");
                require(finite(p.alpha_j), "merton: alpha_j must be finite");
                require(p.delta_j >= 0.0 && finite(p.delta_j), "merton: delta_j must be >= 0");
                require(p.T > 0.0 && finite(p.T), "merton: T must be positive");
                require(finite(p.mu), "merton: mu must be finite");
                require(p.sigma > 0.0 || p.delta_j > 0.0 || p.alpha_j != 0.0, "merton: degenerate (no randomness)");
                if (mart) {
                    p.mu = -0.5 * p.sigma * p.sigma -
                           p.lambda * std::expm1(p.alpha_j + 0.5 * p.delta_j * p.delta_j);
                }
            },
            [&](SyntheticTailParams& p) {
                for (auto side : {Side::right, Side::left}) {
                    const auto& s = side == Side::right ? p.right : p.left;
                    const std::string tag = std::string("synthetic ") + std::string(to_string(side)) + ": ";
                    require(finite(s.log_c) && finite(s.a) && finite(s.b), tag + "parameters must be finite");
                    require(s.c < 0.0 && finite(s.c), tag + "stretch c must be negative");
                    require(s.rho > 0.0 && finite(s.rho), tag + "exponent rho must be positive");
                    require(integrable(s, side), tag + "density is not integrable");
                }
                const double vr = tail_log(p.right, 1.0), sr = tail_slope_at_unit(p.right, Side::right);
                const double vl = tail_log(p.left, -1.0), sl = tail_slope_at_unit(p.left, Side::left);
                p0_ = 0.5 * (vr - 0.5 * sr + vl + 0.5 * sl);
                p1_ = vr - 0.5 * sr - vl - 0.5 * sl;
                qr_ = 0.5 * (sr - p1_);
                ql_ = 0.5 * (p1_ - sl);
                auto g = [this](double y) { return synthetic_log_shape(y); };
                log_norm_ = integrate_shape(g).log_value;
                if (mart) {
                    require(synthetic_critical_moment(p.right, Side::right) > 1.0,
                            "synthetic: E exp(X) is infinite; no martingale shift");
                    const double log_ey = integrate_shape([&](double y) { return g(y) + y; }).log_value - log_norm_;
                    p.mu = -log_ey;
                }
                require(finite(p.mu), "synthetic: mu must be finite");
            },
        },
        params_);
}

double ModelSpec::synthetic_log_shape(double y) const {
    const auto& p = std::get<SyntheticTailParams>(params_);
    if (y >= 1.0) return tail_log(p.right, y);
    if (y <= -1.0) return tail_log(p.left, y);
    if (y >= 0.0) return p0_ + y * (p1_ + qr_ * y);
    return p0_ + y * (p1_ + ql_ * y);
}

std::string_view ModelSpec::name() const {
    static constexpr std::string_view names[] = {"bs", "nig", "fmls", "merton", "synthetic"};
    return names[params_.index()];
}

std::string ModelSpec::describe() const {
    std::ostringstream out;
    out.precision(10);
    out << name() << '(';
    std::visit(overloaded{
                   [&](const BlackScholesParams& p) { out << "sigma=" << p.sigma << ", T=" << p.T << ", mu=" << p.mu; },
                   [&](const NigParams& p) {
                       out << "alpha=" << p.alpha << ", beta=" << p.beta << ", delta=" << p.delta << ", mu=" << p.mu
                           << ", T=" << p.T;
                   },
                   [&](const FmlsParams& p) {
                       out << "alpha=" << p.alpha << ", sigma=" << p.sigma << ", mu=" << p.mu << ", T=" << p.T;
                   },
                   [&](const MertonParams& p) {
                       out << "mu=" << p.mu << ", sigma=" << p.sigma << ", lambda=" << p.lambda
                           << ", alpha_j=" << p.alpha_j << ", delta_j=" << p.delta_j << ", T=" << p.T;
                   },
                   [&](const SyntheticTailParams& p) {
                       for (auto [tag, s] : {std::pair{"right", p.right}, std::pair{"left", p.left}}) {
                           out << tag << "={log_c=" << s.log_c << ", a=" << s.a << ", b=" << s.b << ", c=" << s.c
                               << ", rho=" << s.rho << "}, ";
                       }
                       out << "mu=" << p.mu;
                   },
               },
               params_);
    out << ')';
    return out.str();
}

double ModelSpec::drift() const {
    return std::visit([](const auto& p) { return p.mu; }, params_);
}

double ModelSpec::horizon() const {
    return std::visit(overloaded{[](const SyntheticTailParams&) { return 1.0; }, [](const auto& p) { return p.T; }},
                      params_);
}

ModelSpec ModelSpec::with_horizon(double T) const {
    ModelParams copy = params_;
    std::visit(overloaded{[](SyntheticTailParams&) {
                              throw ConfigError("synthetic model has no maturity; term structure not available");
                          },
                          [T](auto& p) { p.T = T; }},
               copy);
    return ModelSpec(std::move(copy), drift_mode_);
}

MgfDomain ModelSpec::mgf_domain() const {
    return std::visit(
        overloaded{
            [](const BlackScholesParams&) { return MgfDomain{-kInf, kInf, false, false}; },
            [](const MertonParams&) { return MgfDomain{-kInf, kInf, false, false}; },
            [](const NigParams& p) { return MgfDomain{-p.alpha - p.beta, p.alpha - p.beta, true, true}; },
            [](const FmlsParams& p) {
                if (p.alpha == 2.0) return MgfDomain{-kInf, kInf, false, false};
                return MgfDomain{0.0, kInf, true, false};
            },
            [](const SyntheticTailParams& p) {
                return MgfDomain{-synthetic_critical_moment(p.left, Side::left),
                                 synthetic_critical_moment(p.right, Side::right), false, false};
            },
        },
        params_);
}

double ModelSpec::log_mgf(double z) const {
    const auto dom = mgf_domain();
    if (!dom.contains(z)) {
        std::ostringstream msg;
        msg << name() << ": z = " << z << " outside the mgf domain [" << dom.lower << ", " << dom.upper << "]";
        throw DomainError(msg.str(), dom.lower, dom.upper);
    }
    if (z == 0.0) return 0.0;
    return std::visit(
        overloaded{
            [z](const BlackScholesParams& p) { return p.T * (p.mu * z + 0.5 * p.sigma * p.sigma * z * z); },
            [z](const NigParams& p) {
                const double gamma = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
                const double w = std::sqrt(std::max(0.0, (p.alpha - p.beta - z) * (p.alpha + p.beta + z)));
                return p.T * (p.delta * (gamma - w) + p.mu * z);
            },
            [z](const FmlsParams& p) {
                if (p.alpha == 2.0) return p.T * (p.mu * z + p.sigma * p.sigma * z * z);
                return p.T * (p.mu * z - std::pow(z * p.sigma, p.alpha) * fmls_sec(p.alpha));
            },
            [z](const MertonParams& p) {
                const double jump = z * p.alpha_j + 0.5 * z * z * p.delta_j * p.delta_j;
                return p.T * (z * p.mu + 0.5 * z * z * p.sigma * p.sigma + p.lambda * std::expm1(jump));
            },
            [this, z](const SyntheticTailParams& p) {
                const auto r = integrate_shape([&](double y) { return synthetic_log_shape(y) + z * y; });
                return z * p.mu + r.log_value - log_norm_;
            },
        },
        params_);
}

double ModelSpec::log_mgf_derivative(double z) const {
    const auto dom = mgf_domain();
    if (!dom.contains(z)) {
        std::ostringstream msg;
        msg << name() << ": z = " << z << " outside the mgf domain";
        throw DomainError(msg.str(), dom.lower, dom.upper);
    }
    return std::visit(
        overloaded{
            [z](const BlackScholesParams& p) { return p.T * (p.mu + p.sigma * p.sigma * z); },
            [z](const NigParams& p) {
                const double w2 = (p.alpha - p.beta - z) * (p.alpha + p.beta + z);
                if (w2 <= 0.0) return (p.beta + z) > 0.0 ? kInf : -kInf;
                return p.T * (p.delta * (p.beta + z) / std::sqrt(w2) + p.mu);
            },
            [z](const FmlsParams& p) {
                if (p.alpha == 2.0) return p.T * (p.mu + 2.0 * p.sigma * p.sigma * z);
                if (z == 0.0) return p.T * p.mu;
                return p.T * (p.mu - p.alpha * std::pow(p.sigma, p.alpha) * std::pow(z, p.alpha - 1.0) *
                                         fmls_sec(p.alpha));
            },
            [z](const MertonParams& p) {
                const double d2 = p.delta_j * p.delta_j;
                const double jump = z * p.alpha_j + 0.5 * z * z * d2;
                return p.T * (p.mu + p.sigma * p.sigma * z + p.lambda * (p.alpha_j + z * d2) * std::exp(jump));
            },
            [this, z, &dom](const SyntheticTailParams&) {
                double h = 1e-4 * std::max(1.0, std::abs(z));
                h = std::min({h, 0.5 * (dom.upper - z), 0.5 * (z - dom.lower)});
                return (log_mgf(z + h) - log_mgf(z - h)) / (2.0 * h);
            },
        },
        params_);
}

bool ModelSpec::has_complex_mgf() const { return !std::holds_alternative<SyntheticTailParams>(params_); }

std::complex<double> ModelSpec::log_mgf(std::complex<double> z) const {
    if (z == cplx(0.0, 0.0)) return 0.0;
    return std::visit(
        overloaded{
            [z](const BlackScholesParams& p) { return p.T * (p.mu * z + 0.5 * p.sigma * p.sigma * z * z); },
            [z](const NigParams& p) {
                const double gamma = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
                const cplx w = std::sqrt((p.alpha - p.beta - z) * (p.alpha + p.beta + z));
                return p.T * (p.delta * (gamma - w) + p.mu * z);
            },
            [z](const FmlsParams& p) {
                if (p.alpha == 2.0) return p.T * (p.mu * z + p.sigma * p.sigma * z * z);
                if (z.real() < 0.0) {
                    throw DomainError("fmls: complex log-mgf needs Re z >= 0", 0.0, kInf);
                }
                return p.T * (p.mu * z - std::pow(z * p.sigma, p.alpha) * fmls_sec(p.alpha));
            },
            [z](const MertonParams& p) {
                const cplx jump = z * p.alpha_j + 0.5 * z * z * p.delta_j * p.delta_j;
                return p.T * (z * p.mu + 0.5 * z * z * p.sigma * p.sigma + p.lambda * (std::exp(jump) - 1.0));
            },
            [](const SyntheticTailParams&) -> cplx {
                throw InvalidArgument("synthetic model: complex log-mgf not available");
            },
        },
        params_);
}

std::complex<double> ModelSpec::char_fn(double u) const {
    if (u == 0.0) return 1.0;
    if (const auto* p = std::get_if<FmlsParams>(&params_)) {
        if (p->alpha == 2.0) return std::exp(log_mgf(cplx(0.0, u)));
        const double au = std::abs(u);
        const double scale = std::pow(au * p->sigma, p->alpha);
        const cplx expo(-scale, u * p->mu - std::copysign(scale, u) * std::tan(kPi * p->alpha / 2.0));
        return std::exp(p->T * expo);
    }
    if (has_complex_mgf()) return std::exp(log_mgf(cplx(0.0, u)));
    // synthetic: direct quadrature over the range carrying all but e^-60 of the mass
    const auto& p = std::get<SyntheticTailParams>(params_);
    auto g = [this](double y) { return synthetic_log_shape(y) - log_norm_; };
    double lo = -1.0, hi = 1.0;
    while (g(hi) > -60.0) hi *= 1.5;
    while (g(lo) > -60.0) lo *= 1.5;
    const auto re = integrate([&](double y) { return std::cos(u * (y + p.mu)) * std::exp(g(y)); }, lo, hi, 1e-12, 1e-15);
    const auto im = integrate([&](double y) { return std::sin(u * (y + p.mu)) * std::exp(g(y)); }, lo, hi, 1e-12, 1e-15);
    return {re.value, im.value};
}

double synthetic_critical_moment(const TailShape& s, Side side) {
    if (s.rho > 1.0) return kInf;
    const double lin = side == Side::right ? -s.b : s.b;
    if (s.rho == 1.0) return lin - s.c;
    return lin;
}

MomentCondition ModelSpec::critical_moments() const {
    return std::visit(
        overloaded{
            [](const NigParams& p) { return MomentCondition{p.alpha - p.beta, p.alpha + p.beta}; },
            [](const FmlsParams& p) {
                return p.alpha == 2.0 ? MomentCondition{kInf, kInf} : MomentCondition{kInf, 0.0};
            },
            [](const SyntheticTailParams& p) {
                return MomentCondition{synthetic_critical_moment(p.right, Side::right),
                                       synthetic_critical_moment(p.left, Side::left)};
            },
            [](const auto&) { return MomentCondition{kInf, kInf}; },
        },
        params_);
}

bool ModelSpec::has_density() const {
    return std::visit(overloaded{[](const BlackScholesParams&) { return true; },
                                 [](const MertonParams& p) { return p.sigma > 0.0; },
                                 [](const SyntheticTailParams&) { return true; },
                                 [](const auto&) { return false; }},
                      params_);
}

double ModelSpec::exact_log_density(double x) const {
    if (std::isnan(x)) throw InvalidArgument("exact_log_density: x is NaN");
    return std::visit(
        overloaded{
            [x](const BlackScholesParams& p) {
                const double s2 = p.sigma * p.sigma * p.T;
                const double dx = x - p.mu * p.T;
                return -dx * dx / (2.0 * s2) - 0.5 * std::log(2.0 * kPi * s2);
            },
            [x](const MertonParams& p) {
                if (!(p.sigma > 0.0)) throw InvalidArgument("merton: no density when sigma = 0 (atoms present)");
                return merton_log_density(p, x);
            },
            [this, x](const SyntheticTailParams& p) { return synthetic_log_shape(x - p.mu) - log_norm_; },
            [this](const auto&) -> double {
                throw InvalidArgument(std::string(name()) + ": no closed-form density; use Fourier inversion");
            },
        },
        params_);
}

TailFunction ModelSpec::known_tail_asymptote(Side side) const {
    const bool right = side == Side::right;
    const double sgn = right ? 1.0 : -1.0;
    return std::visit(
        overloaded{
            [&](const BlackScholesParams& p) {
                const double s2 = p.sigma * p.sigma * p.T, m = p.mu * p.T;
                return TailFunction{side, TailKind::density,
                                    [=](double k) {
                                        const double dx = sgn * k - m;
                                        return -dx * dx / (2.0 * s2) - 0.5 * std::log(2.0 * kPi * s2);
                                    },
                                    0.0, "gaussian density"};
            },
            [&](const NigParams& p) {
                // Bessel-K1 asymptotics of the NIG density
                const double d = p.delta * p.T, m = p.mu * p.T;
                const double gamma = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
                const double log_c = std::log(p.alpha * d / kPi) + d * gamma + 0.5 * std::log(kPi / (2.0 * p.alpha));
                const double rate = right ? p.alpha - p.beta : p.alpha + p.beta;
                return TailFunction{side, TailKind::density,
                                    [=](double k) {
                                        const double y = k - sgn * m;
                                        return log_c - 1.5 * std::log(y) - rate * y;
                                    },
                                    std::max(0.0, sgn * m) + d, "nig density asymptote"};
            },
            [&](const FmlsParams& p) -> TailFunction {
                if (!right && p.alpha < 2.0) {
                    throw ConditionError(
                        "fmls left tail: E exp(-eps X) is infinite for every eps > 0 (power-law left tail); "
                        "the left-wing formula does not apply");
                }
                if (p.alpha == 2.0) {
                    const double s2 = 2.0 * p.sigma * p.sigma * p.T, m = p.mu * p.T;
                    return TailFunction{side, TailKind::cdf_tail,
                                        [=](double k) { return log_ndtr(-(k - sgn * m) / std::sqrt(s2)); }, 0.0,
                                        "gaussian tail"};
                }
                const double a = p.alpha;
                const double scale =
                    std::pow(p.T * a * std::pow(p.sigma, a) * std::abs(fmls_sec(a)), -1.0 / (a - 1.0));
                return TailFunction{side, TailKind::cdf_tail,
                                    [=](double k) { return -std::pow(k, a / (a - 1.0)) * scale; }, 0.0,
                                    "stable tail asymptote"};
            },
            [&](const MertonParams& p) -> TailFunction {
                const double jump_mean = sgn * p.alpha_j;
                if (p.delta_j > 0.0) {
                    const double dj = p.delta_j;
                    return TailFunction{side, TailKind::cdf_tail,
                                        [=](double k) { return -(k / dj) * std::sqrt(2.0 * std::log(k)); },
                                        std::exp(1.0), "gaussian-jump tail asymptote"};
                }
                if (jump_mean > 0.0) {
                    return TailFunction{side, TailKind::cdf_tail,
                                        [=](double k) { return -(k / jump_mean) * std::log(k); }, std::exp(1.0),
                                        "fixed-jump tail asymptote"};
                }
                if (p.sigma > 0.0) {
                    const double s2 = p.sigma * p.sigma * p.T;
                    return TailFunction{side, TailKind::cdf_tail, [=](double k) { return -k * k / (2.0 * s2); },
                                        0.0, "diffusion tail asymptote"};
                }
                throw ConfigError("merton: bounded support on the " + std::string(to_string(side)) + " side");
            },
            [&](const SyntheticTailParams& p) {
                const double m = p.mu;
                return TailFunction{side, TailKind::density,
                                    [model = *this, sgn](double k) { return model.exact_log_density(sgn * k); },
                                    std::max(0.0, sgn * m) + 1.0, "synthetic density"};
            },
        },
        params_);
}

SyntheticTailParams nig_twin(double alpha, double beta, double log_c_right, double log_c_left) {
    SyntheticTailParams p;
    p.right = {log_c_right, -1.5, beta, -alpha, 1.0};
    p.left = {log_c_left, -1.5, beta, -alpha, 1.0};
    return p;
}

SyntheticTailParams symmetric_smile(const TailShape& right) {
    SyntheticTailParams p;
    p.right = right;
    p.left = right;
    p.left.b = -(right.b + 1.0);
    return p;
}

double log_mgf(const ModelSpec& m, double z) { return m.log_mgf(z); }
std::complex<double> char_fn(const ModelSpec& m, double u) { return m.char_fn(u); }
TailFunction known_tail_asymptote(const ModelSpec& m, Side side) { return m.known_tail_asymptote(side); }
MomentCondition critical_moments(const ModelSpec& m) { return m.critical_moments(); }
double exact_log_density(const ModelSpec& m, double x) { return m.exact_log_density(x); }

}  // namespace smilewing
