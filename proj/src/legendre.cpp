#include "smilewing/legendre.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "smilewing/errors.hpp"
#include "smilewing/special.hpp"

namespace smilewing {

namespace {

// A point just inside an open or branch-point end. Closed-form log-mgfs can
// be evaluated within a few ulps of the edge; quadrature-based ones cannot.
double pull_inside(const ModelSpec& m, double edge, double toward) {
    const double rel = m.has_complex_mgf() ? 1e-15 : 1e-8;
    const double step = rel * std::max(1.0, std::abs(edge));
    return edge + (toward > edge ? step : -step);
}

double kprime(const ModelSpec& m, double z) {
    const double d = m.log_mgf_derivative(z);
    if (std::isnan(d)) throw NumericalError("saddle: K' is NaN at z = " + std::to_string(z));
    return d;
}

}  // namespace

SaddlePoint solve_saddle(const ModelSpec& m, double target, double lo, double hi) {
    const auto dom = m.mgf_domain();
    if (!(lo < hi)) throw InvalidArgument("solve_saddle: require lo < hi");
    lo = std::max(lo, dom.lower);
    hi = std::min(hi, dom.upper);
    if (std::isfinite(lo) && (!dom.contains(lo) || !std::isfinite(m.log_mgf_derivative(lo)))) lo = pull_inside(m, lo, hi);
    if (std::isfinite(hi) && (!dom.contains(hi) || !std::isfinite(m.log_mgf_derivative(hi)))) hi = pull_inside(m, hi, lo);

    // expand infinite ends until they bracket the target
    if (!std::isfinite(hi)) {
        double h = std::isfinite(lo) ? std::max(lo + 1.0, 1.0) : 1.0;
        while (kprime(m, h) < target) {
            const double next = 2.0 * h;
            const double d = m.log_mgf_derivative(next);
            if (!std::isfinite(d) || next > 1e300) return {h, true};
            h = next;
        }
        hi = h;
    }
    if (!std::isfinite(lo)) {
        double l = std::min(hi - 1.0, -1.0);
        while (kprime(m, l) > target) {
            const double next = 2.0 * l;
            const double d = m.log_mgf_derivative(next);
            if (!std::isfinite(d) || next < -1e300) return {l, true};
            l = next;
        }
        lo = l;
    }

    const double f_lo = kprime(m, lo) - target;
    const double f_hi = kprime(m, hi) - target;
    if (f_lo >= 0.0) return {lo, f_lo > 0.0};
    if (f_hi <= 0.0) return {hi, f_hi < 0.0};
    std::uintmax_t iters = 300;
    auto f = [&](double z) { return kprime(m, z) - target; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi,
                                                          boost::math::tools::eps_tolerance<double>(52), iters);
    const double z = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    return {z, false};
}

LegendreSolution legendre_bound(const ModelSpec& m, double k, Side side) {
    if (!std::isfinite(k)) throw InvalidArgument("legendre_bound: k must be finite");
    const auto dom = m.mgf_domain();
    const bool right = side == Side::right;
    const double target = right ? k : -k;
    const double edge = right ? dom.upper : dom.lower;
    if (edge == 0.0) {
        std::ostringstream msg;
        msg << m.name() << ": no exponential moment on the " << to_string(side)
            << " side; the Chernoff bound is trivial";
        throw ConditionError(msg.str());
    }
    const double mean = m.log_mgf_derivative(0.0);
    if ((right && mean >= target) || (!right && mean <= target)) {
        return {k, side, 0.0, 0.0, 0.0, false, 0.0};
    }

    auto objective = [&](double z) { return m.log_mgf(z) - z * target; };
    SaddlePoint sp = right ? solve_saddle(m, target, 0.0, edge) : solve_saddle(m, target, edge, 0.0);
    double z = sp.z;
    bool boundary = sp.at_boundary;
    if (sp.at_boundary && std::isfinite(edge) && m.mgf_domain().contains(edge)) {
        // K' stays short of the target: the infimum is at the closed end
        if (objective(edge) <= objective(z)) z = edge;
    }
    const double width = std::isfinite(edge) ? std::abs(edge) : kInf;
    if (!boundary && std::isfinite(edge) && std::abs(edge - z) < 1e-6 * std::max(1.0, width)) {
        // branch point ahead: K' is stiff here, minimize K(z) - z k directly
        boundary = true;
        const double a = right ? z - 1e-6 * std::max(1.0, width) : edge;
        const double b = right ? edge : z + 1e-6 * std::max(1.0, width);
        const auto [zm, fm] = boost::math::tools::brent_find_minima(
            [&](double t) { return m.mgf_domain().contains(t) ? objective(t) : kInf; }, a, b, 52);
        if (fm < objective(z)) z = zm;
    }
    const double K = m.log_mgf(z);
    double residual = 0.0;
    if (!boundary) residual = std::abs(m.log_mgf_derivative(z) - target);
    return {k, side, z, K, K - z * target, boundary, residual};
}

TailFunction legendre_tail(const ModelSpec& m, Side side) {
    const double mean = m.log_mgf_derivative(0.0);
    const double k_min = side == Side::right ? std::max(0.0, mean) : std::max(0.0, -mean);
    return TailFunction{side, TailKind::cdf_tail,
                        [model = m, side](double k) { return legendre_bound(model, k, side).log_tail_bound; }, k_min,
                        "chernoff bound"};
}

}  // namespace smilewing
