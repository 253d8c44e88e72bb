#pragma once

// Return models X = log(S_T / F_T): Black-Scholes, normal inverse Gaussian,
// finite-moment log-stable (maximal negative skew), Merton jump diffusion and
// a synthetic density family with prescribed tails.

#include <complex>
#include <string>
#include <string_view>
#include <variant>

#include "smilewing/types.hpp"
#include "smilewing/wings.hpp"

namespace smilewing {

struct BlackScholesParams {
    double sigma = 0.2;
    double T = 1.0;
    /// Drift per unit time; only used with DriftMode::raw.
    double mu = 0.0;
};

struct NigParams {
    double alpha = 2.0;
    double beta = -0.5;
    double delta = 1.0;
    double mu = 0.0;
    double T = 1.0;
};

struct FmlsParams {
    /// Stability index in (1, 2].
    double alpha = 1.5;
    double sigma = 0.2;
    double mu = 0.0;
    double T = 1.0;
};

struct MertonParams {
    double mu = 0.0;
    double sigma = 0.2;
    double lambda = 0.3;
    double alpha_j = 0.2;
    double delta_j = 0.15;
    double T = 1.0;
};

/// log f(x) = log_c + a log|x| + b x + c |x|^rho on one side of |x| >= 1.
struct TailShape {
    double log_c = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = -1.0;
    double rho = 1.0;
};

/// Two tails joined on [-1, 1] by a C^1 piecewise quadratic in log f with a
/// knot at 0, normalized numerically. mu is the location shift used with
/// DriftMode::raw; the martingale mode computes it.
struct SyntheticTailParams {
    TailShape right;
    TailShape left;
    double mu = 0.0;
};

using ModelParams = std::variant<BlackScholesParams, NigParams, FmlsParams, MertonParams, SyntheticTailParams>;

enum class DriftMode { martingale, raw };

/// Domain of the real log-mgf K(z) = log E exp(zX).
struct MgfDomain {
    double lower;
    double upper;
    bool lower_closed;
    bool upper_closed;

    bool contains(double z) const;
};

class ModelSpec {
public:
    /// Validates the parameters and, for DriftMode::martingale, replaces the
    /// drift so that E exp(X) = 1. Throws ConfigError on invalid parameters.
    explicit ModelSpec(ModelParams params, DriftMode drift = DriftMode::martingale);

    const ModelParams& params() const { return params_; }
    DriftMode drift_mode() const { return drift_mode_; }
    std::string_view name() const;
    /// e.g. "nig(alpha=2, beta=-0.5, delta=1, mu=0.0635, T=1)"
    std::string describe() const;
    /// Drift actually used (per unit time, or the location shift for the synthetic family).
    double drift() const;
    /// Maturity; the synthetic family has none and reports 1.
    double horizon() const;
    /// Same model at another maturity, drift recomputed under the same mode.
    ModelSpec with_horizon(double T) const;

    MgfDomain mgf_domain() const;
    /// Throws DomainError outside mgf_domain().
    double log_mgf(double z) const;
    /// K'(z); closed form except for the synthetic family.
    double log_mgf_derivative(double z) const;
    /// Analytic continuation of K to the strip lower < Re z < upper.
    /// Not available for the synthetic family (throws InvalidArgument).
    std::complex<double> log_mgf(std::complex<double> z) const;
    bool has_complex_mgf() const;
    /// E exp(iuX).
    std::complex<double> char_fn(double u) const;

    MomentCondition critical_moments() const;

    bool has_density() const;
    /// Throws InvalidArgument for NIG and FMLS.
    double exact_log_density(double x) const;

    /// Closed-form leading tail behaviour. Density kind for BS, NIG and the
    /// synthetic family; cdf_tail kind for FMLS and Merton. Throws
    /// ConditionError for the FMLS left tail.
    TailFunction known_tail_asymptote(Side side) const;

    /// Synthetic family: log normalizing constant of the unshifted density.
    double synthetic_log_norm() const { return log_norm_; }

private:
    ModelParams params_;
    DriftMode drift_mode_;
    double log_norm_ = 0.0;
    // bridge coefficients of the synthetic density
    double p0_ = 0.0, p1_ = 0.0, qr_ = 0.0, ql_ = 0.0;

    void setup();
    double synthetic_log_shape(double y) const;
};

/// Synthetic density whose tails are those of NIG(alpha, beta): a = -3/2,
/// b = beta, c = -alpha, rho = 1 on both sides.
SyntheticTailParams nig_twin(double alpha, double beta, double log_c_right = 0.0, double log_c_left = 0.0);

/// Right tail as given; the left tail chosen so that exp(x/2) f(x) is even,
/// which makes the implied smile symmetric in k.
SyntheticTailParams symmetric_smile(const TailShape& right);

/// Moment condition of a single synthetic tail: sup p with E e^{pX} finite
/// on the right, sup q with E e^{-qX} finite on the left.
double synthetic_critical_moment(const TailShape& shape, Side side);

// Free-function forms of the member operations.
double log_mgf(const ModelSpec& m, double z);
std::complex<double> char_fn(const ModelSpec& m, double u);
TailFunction known_tail_asymptote(const ModelSpec& m, Side side);
MomentCondition critical_moments(const ModelSpec& m);
double exact_log_density(const ModelSpec& m, double x);

}  // namespace smilewing
