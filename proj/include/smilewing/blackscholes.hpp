#pragma once

// Normalized Black-Scholes: unit forward, no discounting, log-strike k and
// total volatility v = sigma * sqrt(T). Prices are carried as logarithms so
// that deep out-of-the-money values far below the double range survive.

#include "smilewing/types.hpp"

namespace smilewing::bs {

/// Logarithm of a normalized option price. `log_extrinsic` is the log of the
/// price minus intrinsic value; for out-of-the-money options it equals
/// `log_price`, for in-the-money ones it keeps the information that would be
/// lost in 1 - e^k + tiny.
struct NormalizedPrice {
    double log_price;
    double log_extrinsic;
    OptionType type;
};

/// Black-Scholes call Phi(d1) - e^k Phi(d2), d1,2 = -k/v +- v/2.
NormalizedPrice call(double k, double v);

/// Black-Scholes put e^k Phi(-d2) - Phi(-d1).
NormalizedPrice put(double k, double v);

/// Log of the out-of-the-money price at k: the call for k >= 0, the put for k < 0.
double log_otm_price(double k, double v);

/// Wraps a log price, deriving the extrinsic part by subtraction.
NormalizedPrice from_log_price(double log_price, double k, OptionType type);

/// Total implied volatility of a price: the unique v > 0 reproducing its
/// extrinsic value. Throws PriceBoundsError when the price is not strictly
/// between intrinsic value and its upper bound, BracketError if the root
/// cannot be bracketed.
double implied_total_vol(const NormalizedPrice& price, double k);

struct TailBounds {
    double lower;
    double upper;
};

/// Mill's-ratio bounds for Phi(-x), x > 0:
/// phi(x)/x * (1 - 1/x^2) <= Phi(-x) <= phi(x)/x.
TailBounds normal_cdf_bounds(double x);

/// d1 = -k/v + v/2.
double d1(double k, double v);

/// Residual eps1 in log c = -d1^2/2 + eps1, evaluated at |k| on the
/// out-of-the-money side (puts are mapped to the equivalent call).
double epsilon1_residual(double k, double v, const NormalizedPrice& price);

}  // namespace smilewing::bs
