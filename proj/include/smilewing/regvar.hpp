#pragma once

// Numerical regular-variation diagnostics: index estimation from ratios
// g(lambda x)/g(x) on a geometric grid, and the transform
// -log int_x^inf exp(-g(y)) dy whose ratio to g(x) tends to 1 for
// regularly varying g of positive index.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smilewing/quadrature.hpp"

namespace smilewing {

enum class RegVarVerdict { regularly_varying, inconclusive };

std::string_view to_string(RegVarVerdict verdict);

struct RegVarOptions {
    double lambda = 2.0;
    /// Verdict tolerance on the residual, in units of log(lambda).
    double tolerance = 0.1;
    /// Estimates at or below this index are treated as slowly varying and no
    /// verdict is given.
    double min_index = 0.05;
};

struct RegVarEstimate {
    double alpha_hat;
    double lambda;
    /// max |log g(lambda x) - log g(x) - alpha_hat log lambda| over the pairs used.
    double residual;
    RegVarVerdict verdict;
    /// Number of (x, lambda x) pairs in the top half of the grid.
    std::size_t pairs;
    std::string note;
};

/// x must be a strictly increasing geometric grid (at least 16 points) whose
/// ratio divides log(opts.lambda) into an integer lag; g holds the samples.
/// Throws InvalidArgument on malformed grids and NumericalError when a
/// sample in the upper half is not positive.
RegVarEstimate estimate_index(std::span<const double> x, std::span<const double> g,
                              const RegVarOptions& opts = {});

/// Samples g on x0 * r^j, j = 0..points-1, with r = (x1/x0)^(1/(points-1))
/// snapped so that lambda is an integer power of r.
RegVarEstimate estimate_index(const std::function<double(double)>& g, double x0, double x1,
                              std::size_t points = 41, const RegVarOptions& opts = {});

/// Geometric grid used by the function overload.
std::vector<double> geometric_grid(double x0, double x1, std::size_t points, double lambda);

/// -log int_x^inf exp(-g(y)) dy.
double bingham_transform(const std::function<double(double)>& g, double x,
                         const QuadratureOptions& opts = {});

}  // namespace smilewing
