#include "smilewing/regvar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "smilewing/errors.hpp"

namespace smilewing {

std::string_view to_string(RegVarVerdict verdict) {
    return verdict == RegVarVerdict::regularly_varying ? "regularly_varying" : "inconclusive";
}

namespace {

double median(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

}  // namespace

RegVarEstimate estimate_index(std::span<const double> x, std::span<const double> g, const RegVarOptions& opts) {
    const std::size_t n = x.size();
    if (g.size() != n) throw InvalidArgument("estimate_index: grid and samples differ in length");
    if (n < 16) throw InvalidArgument("estimate_index: need at least 16 grid points");
    if (!(opts.lambda > 1.0)) throw InvalidArgument("estimate_index: lambda must exceed 1");
    if (!(x[0] > 0.0)) throw InvalidArgument("estimate_index: grid must be positive");
    const double log_r = std::log(x[1] / x[0]);
    if (!(log_r > 0.0)) throw InvalidArgument("estimate_index: grid must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(std::log(x[i] / x[i - 1]) - log_r) > 1e-9 * std::max(1.0, log_r)) {
            throw InvalidArgument("estimate_index: grid is not geometric");
        }
    }
    const double log_lambda = std::log(opts.lambda);
    const double lag_real = log_lambda / log_r;
    const auto lag = static_cast<std::size_t>(std::lround(lag_real));
    if (lag < 1 || std::abs(lag_real - lag) > 1e-6 * lag_real) {
        throw InvalidArgument("estimate_index: lambda is not an integer power of the grid ratio");
    }
    if (lag >= n / 2) throw InvalidArgument("estimate_index: grid too short for this lambda");

    const std::size_t total_pairs = n - lag;
    const std::size_t first = total_pairs / 2;
    std::vector<double> ratios;
    ratios.reserve(total_pairs - first);
    for (std::size_t i = first; i < total_pairs; ++i) {
        const double a = g[i], b = g[i + lag];
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
            std::ostringstream msg;
            msg << "estimate_index: sample not positive and finite near x = " << x[a > 0.0 ? i + lag : i];
            throw NumericalError(msg.str());
        }
        ratios.push_back(std::log(b) - std::log(a));
    }
    const double alpha = median(ratios) / log_lambda;
    double residual = 0.0;
    for (double d : ratios) residual = std::max(residual, std::abs(d - alpha * log_lambda));

    RegVarEstimate est{alpha, opts.lambda, residual, RegVarVerdict::inconclusive, ratios.size(), {}};
    if (alpha <= opts.min_index) {
        est.note = "index at or below the slowly varying threshold; no verdict";
    } else if (residual <= opts.tolerance * log_lambda) {
        est.verdict = RegVarVerdict::regularly_varying;
    } else {
        est.note = "log-ratio not stable across the upper grid";
    }
    return est;
}

std::vector<double> geometric_grid(double x0, double x1, std::size_t points, double lambda) {
    if (!(x0 > 0.0 && x1 > x0)) throw InvalidArgument("geometric_grid: require 0 < x0 < x1");
    if (points < 2) throw InvalidArgument("geometric_grid: need at least two points");
    // snap the step so that lambda is reached in a whole number of steps
    const double raw_step = std::log(x1 / x0) / static_cast<double>(points - 1);
    const double per_lambda = std::max(1.0, std::round(std::log(lambda) / raw_step));
    const double step = std::log(lambda) / per_lambda;
    std::vector<double> x(points);
    for (std::size_t j = 0; j < points; ++j) x[j] = x0 * std::exp(step * static_cast<double>(j));
    return x;
}

RegVarEstimate estimate_index(const std::function<double(double)>& g, double x0, double x1, std::size_t points,
                              const RegVarOptions& opts) {
    const auto x = geometric_grid(x0, x1, points, opts.lambda);
    std::vector<double> samples(x.size());
    std::transform(x.begin(), x.end(), samples.begin(), g);
    return estimate_index(x, samples, opts);
}

double bingham_transform(const std::function<double(double)>& g, double x, const QuadratureOptions& opts) {
    if (!std::isfinite(x)) throw InvalidArgument("bingham_transform: x must be finite");
    const auto r = log_integrate_upper([&](double y) { return -g(y); }, x, opts);
    return -r.log_value;
}

}  // namespace smilewing
