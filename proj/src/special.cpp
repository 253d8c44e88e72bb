#include "smilewing/special.hpp"

#include <algorithm>
#include <numbers>

namespace smilewing {

namespace {

// exp(x^2) with the rounding error of x*x folded back in.
double exp_square(double x) {
    const double sq = x * x;
    const double err = std::fma(x, x, -sq);
    return std::exp(sq) * (1.0 + err);
}

// Continued fraction for large x: sqrt(pi) erfcx(x) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+ ...)))).
double erfcx_cf(double x) {
    double t = x;
    for (int n = 60; n >= 1; --n) t = x + 0.5 * n / t;
    return 1.0 / (std::sqrt(std::numbers::pi) * t);
}

}  // namespace

double erfcx(double x) {
    if (std::isnan(x)) return kNaN;
    if (x < 0.0) {
        if (x < -26.6) return kInf;
        return 2.0 * exp_square(x) - erfcx(-x);
    }
    if (x < 25.0) return exp_square(x) * std::erfc(x);
    return erfcx_cf(x);
}

double ndtr(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double log_ndtr(double x) {
    if (std::isnan(x)) return kNaN;
    if (x > 0.0) return std::log1p(-0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0));
    if (x > -5.0) return std::log(0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0));
    return std::log(0.5 * erfcx(-x * std::numbers::sqrt2 / 2.0)) - 0.5 * x * x;
}

double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -kInf) return a;
    return a + std::log1p(std::exp(b - a));
}

double log_sub(double a, double b) {
    if (b == -kInf) return a;
    if (a == b) return -kInf;
    return a + log1mexp(a - b);
}

double log1mexp(double x) {
    // Maechler's switch point keeps full relative accuracy on both sides.
    if (x <= std::numbers::ln2) return std::log(-std::expm1(-x));
    return std::log1p(-std::exp(-x));
}

double log_sum_exp(std::span<const double> values) {
    double top = -kInf;
    for (double v : values) top = std::max(top, v);
    if (top == -kInf || top == kInf) return top;
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double term = std::exp(v - top);
        const double t = sum + term;
        comp += (std::abs(sum) >= term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return top + std::log(sum + comp);
}

}  // namespace smilewing
