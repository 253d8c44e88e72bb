#include "smilewing/wings.hpp"

#include <cmath>
#include <sstream>

#include "smilewing/errors.hpp"
#include "smilewing/special.hpp"

namespace smilewing {

std::string_view to_string(TailKind kind) {
    switch (kind) {
        case TailKind::density: return "density";
        case TailKind::cdf_tail: return "cdf_tail";
        case TailKind::price: return "price";
    }
    return "?";
}

ConditionCheck check_condition(const MomentCondition& cond, Side side) {
    if (side == Side::right) return {cond.p_plus > 1.0, cond.p_plus - 1.0};
    return {cond.q_minus > 0.0, cond.q_minus};
}

double psi(double x) {
    if (!(x >= 0.0)) throw InvalidArgument("psi: argument must be >= 0");
    if (x == kInf) return 0.0;
    const double s = std::sqrt(x + 1.0) + std::sqrt(x);
    return 2.0 / (s * s);
}

double psi_inverse(double u) {
    if (!(u > 0.0 && u <= 2.0)) throw InvalidArgument("psi_inverse: argument must lie in (0, 2]");
    const double gap = 2.0 - u;
    return gap * gap / (8.0 * u);
}

double psi_argument_shift(Side side, TailKind kind) {
    if (side == Side::right) return kind == TailKind::price ? 0.0 : -1.0;
    return kind == TailKind::price ? -1.0 : 0.0;
}

std::string_view to_string(WingVariant variant) {
    switch (variant) {
        case WingVariant::iv: return "iv";
        case WingVariant::iv_prime: return "iv'";
        case WingVariant::iv_doubleprime: return "iv''";
        case WingVariant::v: return "v";
    }
    return "?";
}

WingVariant parse_variant(std::string_view text) {
    if (text == "iv") return WingVariant::iv;
    if (text == "iv'" || text == "iv_prime") return WingVariant::iv_prime;
    if (text == "iv''" || text == "iv_doubleprime") return WingVariant::iv_doubleprime;
    if (text == "v") return WingVariant::v;
    throw ConfigError("unknown wing variant '" + std::string(text) + "' (expected iv|iv'|iv''|v)");
}

WingVariant variant_for(TailKind kind) {
    switch (kind) {
        case TailKind::price: return WingVariant::iv;
        case TailKind::cdf_tail: return WingVariant::iv_prime;
        case TailKind::density: return WingVariant::iv_doubleprime;
    }
    return WingVariant::iv;
}

WingAsymptote::WingAsymptote(TailFunction tail, WingVariant variant)
    : tail_(std::move(tail)), variant_(variant), shift_(psi_argument_shift(tail_.side, tail_.kind)) {
    if (!tail_.eval) throw InvalidArgument("wing asymptote: empty tail function");
}

double WingAsymptote::argument(double k) const {
    if (!(k > 0.0)) throw InvalidArgument("wing asymptote: k must be positive");
    return -tail_.eval(k) / k + shift_;
}

WingPoint WingAsymptote::at(double k) const {
    const double arg = argument(k);
    if (std::isnan(arg)) return {arg, kNaN, false};
    if (variant_ == WingVariant::v) {
        if (arg <= 0.25) return {arg, 2.0, true};
        return {arg, 1.0 / (2.0 * arg), false};
    }
    if (arg < 0.0) return {arg, 2.0, true};
    return {arg, psi(arg), false};
}

ThetaEstimate WingAsymptote::estimate_theta(double k_prev, double k_last) {
    if (!(k_prev > 0.0 && k_last > k_prev)) {
        throw InvalidArgument("estimate_theta: require 0 < k_prev < k_last");
    }
    const double a_prev = argument(k_prev);
    const double a_last = argument(k_last);
    const ThetaEstimate est{a_last, (k_last * a_last - k_prev * a_prev) / (k_last - k_prev)};
    theta_limit = est;
    return est;
}

void require_condition(const MomentCondition& cond, Side side) {
    const auto check = check_condition(cond, side);
    if (check.holds) return;
    std::ostringstream msg;
    if (side == Side::right) {
        msg << "right-wing formula not licensed: E exp((1+eps)X) is infinite for every eps > 0"
            << " (critical moment p_plus = " << cond.p_plus << " <= 1)";
    } else {
        msg << "left-wing formula not licensed: E exp(-eps X) is infinite for every eps > 0"
            << " (critical moment q_minus = " << cond.q_minus << " <= 0)";
    }
    throw ConditionError(msg.str());
}

namespace {

WingAsymptote gated(TailFunction tail, const MomentCondition& cond, Side side) {
    if (tail.side != side) throw InvalidArgument("wing formula applied to a tail of the other side");
    require_condition(cond, side);
    const auto variant = variant_for(tail.kind);
    return WingAsymptote(std::move(tail), variant);
}

}  // namespace

WingAsymptote right_wing(TailFunction tail, const MomentCondition& cond) {
    return gated(std::move(tail), cond, Side::right);
}

WingAsymptote left_wing(TailFunction tail, const MomentCondition& cond) {
    return gated(std::move(tail), cond, Side::left);
}

WingAsymptote sublinear_wing(TailFunction tail) { return WingAsymptote(std::move(tail), WingVariant::v); }

}  // namespace smilewing
