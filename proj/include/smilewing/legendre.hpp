#pragma once

// Chernoff (Fenchel-Legendre) tail bounds: log P[X > k] <= inf_z K(z) - zk,
// attained at the saddle point K'(z*) = k.

#include "smilewing/models.hpp"

namespace smilewing {

struct LegendreSolution {
    double k;
    Side side;
    double z_star;
    double K_at_z;
    /// K(z*) - z* k on the right; K(z*) + z* k (z* < 0) for log P[X <= -k] on the left.
    double log_tail_bound;
    /// z* sits at (or numerically on) the edge of the mgf domain.
    bool boundary;
    /// |K'(z*) - target| at the returned point; 0 for boundary solutions.
    double residual;
};

/// Bound on log P[X > k] (right) or log P[X <= -k] (left, k > 0 is the
/// magnitude). Returns z* = 0 and bound 0 when k is on the near side of the
/// mean. Throws ConditionError when the model has no exponential moments on
/// the requested side.
LegendreSolution legendre_bound(const ModelSpec& m, double k, Side side = Side::right);

/// cdf_tail TailFunction k -> log_tail_bound(k), for use with the wing formulas.
TailFunction legendre_tail(const ModelSpec& m, Side side = Side::right);

struct SaddlePoint {
    double z;
    bool at_boundary;
};

/// Solves K'(z) = target for z in [lo, hi] within the mgf domain; infinite
/// ends are searched outward. Returns the nearer end, flagged, when K' - target
/// does not change sign on the interval.
SaddlePoint solve_saddle(const ModelSpec& m, double target, double lo, double hi);

}  // namespace smilewing
