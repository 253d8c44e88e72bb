#pragma once

// Exact prices and tail probabilities for the model zoo. Everything is carried
// in logs: calls come from c(k) = int_k^inf e^x P[X > x] dx, puts from
// p(-k) = int_k^inf e^{-x} P[X <= -x] dx, with the tail probabilities from the
// density, the Merton Poisson mixture, or Fourier inversion along a vertical
// line through the saddle point of K(z) - zk.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smilewing/blackscholes.hpp"
#include "smilewing/models.hpp"

namespace smilewing {

enum class TailRoute { density_quadrature, mixture_series, saddle_contour, gil_pelaez };

std::string_view to_string(TailRoute route);

struct PricingOptions {
    /// Relative tolerance of each quadrature (tail probability and price).
    double rel_tol = 1e-10;
    /// Implied vols are only inverted where log c >= this floor.
    double log_price_floor = -700.0;
    /// Worker threads for smile_curve; 0 means hardware concurrency.
    unsigned threads = 0;
};

struct TailEstimate {
    /// log P[X > k] on the right, log P[X <= -k] on the left.
    double log_value;
    /// Estimated absolute error of log_value.
    double error;
    TailRoute route;
};

/// Right: log P[X > k]. Left: log P[X <= -k]. k is a signed point on the
/// right, a magnitude mirrored to -k on the left.
TailEstimate tail_cdf_estimate(const ModelSpec& m, double k, Side side, const PricingOptions& opts = {});
double tail_cdf(const ModelSpec& m, double k, Side side = Side::right);

/// Fourier route regardless of density availability (models with a closed
/// complex log-mgf only).
TailEstimate tail_cdf_fourier(const ModelSpec& m, double k, Side side, const PricingOptions& opts = {});

struct PriceEstimate {
    bs::NormalizedPrice price;
    /// Estimated absolute error of log_price.
    double error;
    std::string_view route;
};

/// c(k) via the tail integral. Throws ConditionError unless the right moment
/// condition holds.
PriceEstimate call_from_tail(const ModelSpec& m, double k, const PricingOptions& opts = {});

/// p(-k), k >= 0, via the put tail integral. Throws ConditionError unless
/// the left moment condition holds.
PriceEstimate put_from_tail(const ModelSpec& m, double k, const PricingOptions& opts = {});

/// c(k) = int_k^inf (e^x - e^k) f(x) dx for models with a density.
PriceEstimate call_from_density(const ModelSpec& m, double k, const PricingOptions& opts = {});

/// c(k) from the characteristic function on the line Re z = z0 > 1.
PriceEstimate call_from_cf(const ModelSpec& m, double k, const PricingOptions& opts = {});

/// Out-of-the-money price at signed k: call_from_tail for k >= 0, the put at
/// k (put_from_tail(-k)) for k < 0.
PriceEstimate otm_price(const ModelSpec& m, double k, const PricingOptions& opts = {});

enum class PointStatus { ok, unreachable, failed };

std::string_view to_string(PointStatus status);

struct SmilePoint {
    double k;
    double log_price;
    double total_vol;
    /// V(k)^2 / |k|
    double slope;
    double epsilon1;
    double quad_err;
    PointStatus status;
    std::string reason;
};

struct SmileCurve {
    /// Ascending in k.
    std::vector<SmilePoint> points;
};

/// Prices and inverts every strike. For Side::left the grid holds magnitudes
/// and the strikes are -grid. Failures are recorded per point.
SmileCurve smile_curve(const ModelSpec& m, std::span<const double> grid, Side side = Side::right,
                       const PricingOptions& opts = {});

}  // namespace smilewing
