#pragma once

// Log-domain arithmetic and normal-distribution primitives shared by the
// pricing, wing and diagnostics code.

#include <cmath>
#include <limits>
#include <span>

namespace smilewing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// log Phi(x) for the standard normal CDF, accurate in both tails.
double log_ndtr(double x);

/// Standard normal CDF.
double ndtr(double x);

/// log(exp(a) + exp(b)).
double log_add(double a, double b);

/// log(exp(a) - exp(b)) for a >= b; -inf when equal.
double log_sub(double a, double b);

/// log(1 - exp(-x)) for x >= 0.
double log1mexp(double x);

/// log of sum(exp(v)) with compensated summation of the scaled terms.
double log_sum_exp(std::span<const double> values);

}  // namespace smilewing
