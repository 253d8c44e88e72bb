#pragma once

// Tail-wing formulas: map the log-tail of a return distribution (density,
// distribution tail or out-of-the-money price) to the asymptotic slope
// V(k)^2/k of the implied total variance through psi.

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "smilewing/types.hpp"

namespace smilewing {

enum class TailKind { density, cdf_tail, price };

std::string_view to_string(TailKind kind);

/// One-sided log-tail. For Side::right, eval(k) is log f(k), log P[X > k] or
/// log c(k); for Side::left it is log f(-k), log P[X <= -k] or log p(-k).
/// Always called with k > 0.
struct TailFunction {
    Side side;
    TailKind kind;
    std::function<double(double)> eval;
    /// Smallest k at which eval is meaningful.
    double k_min = 0.0;
    std::string label;

    double operator()(double k) const { return eval(k); }
};

/// Critical exponential moments: p_plus = sup{p : E e^{pX} < inf},
/// q_minus = sup{q : E e^{-qX} < inf}. Either may be +inf.
struct MomentCondition {
    double p_plus;
    double q_minus;
};

struct ConditionCheck {
    bool holds;
    /// p_plus - 1 on the right, q_minus on the left.
    double margin;
};

/// Right: E e^{(1+eps)X} < inf for some eps > 0. Left: E e^{-eps X} < inf.
ConditionCheck check_condition(const MomentCondition& cond, Side side);

/// Throws ConditionError naming the violated condition.
void require_condition(const MomentCondition& cond, Side side);

/// psi(x) = 2 - 4(sqrt(x^2 + x) - x), evaluated as 2/(sqrt(x+1) + sqrt(x))^2.
/// psi(+inf) = 0. Throws InvalidArgument for x < 0 or NaN.
double psi(double x);

/// Inverse of psi on (0, 2]: (2 - u)^2 / (8u) = 1/(2u) + u/8 - 1/2.
double psi_inverse(double u);

/// Constant added to -eval(k)/k to form the psi argument. Encodes the shift
/// asymmetry between the right- and left-wing formulas:
///   right: price 0, cdf_tail -1, density -1
///   left:  price -1, cdf_tail 0, density 0
double psi_argument_shift(Side side, TailKind kind);

enum class WingVariant { iv, iv_prime, iv_doubleprime, v };

std::string_view to_string(WingVariant variant);
WingVariant parse_variant(std::string_view text);
/// iv for prices, iv' for distribution tails, iv'' for densities.
WingVariant variant_for(TailKind kind);

struct WingPoint {
    double argument;
    double slope;
    /// The raw argument was below the asymptotic regime (negative for the psi
    /// variants, below 1/4 for the sublinear one) and was clamped.
    bool clamped;
};

struct ThetaEstimate {
    double raw;
    /// Two-point extrapolation assuming argument(k) = theta + C/k.
    double extrapolated;
};

class WingAsymptote {
public:
    WingAsymptote(TailFunction tail, WingVariant variant);

    Side side() const { return tail_.side; }
    TailKind kind() const { return tail_.kind; }
    WingVariant variant() const { return variant_; }
    const TailFunction& tail() const { return tail_; }

    /// Unclamped psi argument -eval(k)/k + shift.
    double argument(double k) const;
    WingPoint at(double k) const;
    /// Predicted V^2/k at (signed magnitude) k > 0.
    double slope(double k) const { return at(k).slope; }

    /// Limit of the psi argument estimated from its values at two of the
    /// largest strikes, k_prev < k_last. Stored in theta_limit.
    ThetaEstimate estimate_theta(double k_prev, double k_last);
    std::optional<ThetaEstimate> theta_limit;

private:
    TailFunction tail_;
    WingVariant variant_;
    double shift_;
};

/// Right-wing formula (iv), (iv') or (iv'') depending on tail.kind. Throws
/// ConditionError unless the right moment condition holds.
WingAsymptote right_wing(TailFunction tail, const MomentCondition& cond);

/// Left-wing counterpart; requires the left moment condition.
WingAsymptote left_wing(TailFunction tail, const MomentCondition& cond);

/// Sublinear form V^2/k ~ 1/(2 * argument) for tails whose psi argument
/// diverges, with the same shift convention as the psi variants.
WingAsymptote sublinear_wing(TailFunction tail);

}  // namespace smilewing
