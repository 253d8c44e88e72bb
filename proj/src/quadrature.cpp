#include "smilewing/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "smilewing/errors.hpp"
#include "smilewing/special.hpp"

namespace smilewing {

namespace {

// Kronrod abscissae on [0,1]; odd indices are the embedded Gauss-7 nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct LogPanel {
    double a, b;
    double log_value;
    double log_error;
    /// Error the panel cannot get below because of rounding in log_f itself.
    double log_floor;
};

LogPanel eval_log_panel(const LogIntegrand& log_f, double a, double b, int& evals) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    std::array<double, 15> logs{};
    for (int i = 0; i < 7; ++i) {
        logs[2 * i] = log_f(mid - half * kNodes[i]);
        logs[2 * i + 1] = log_f(mid + half * kNodes[i]);
    }
    logs[14] = log_f(mid);
    evals += 15;
    double top = -kInf;
    for (double l : logs) {
        if (std::isnan(l)) {
            std::ostringstream msg;
            msg << "quadrature: integrand is NaN on [" << a << ", " << b << "]";
            throw NumericalError(msg.str());
        }
        top = std::max(top, l);
    }
    if (top == -kInf) return {a, b, -kInf, -kInf, -kInf};
    if (top == kInf) throw NumericalError("quadrature: integrand overflow");
    double kron = kKronrod[7] * std::exp(logs[14] - top);
    double gauss = kGauss[3] * std::exp(logs[14] - top);
    for (int i = 0; i < 7; ++i) {
        const double pair = std::exp(logs[2 * i] - top) + std::exp(logs[2 * i + 1] - top);
        kron += kKronrod[i] * pair;
        if (i % 2 == 1) gauss += kGauss[i / 2] * pair;
    }
    const double lh = std::log(half);
    const double diff = std::abs(kron - gauss);
    // Rounding floor: log_f carries an absolute error of a few ulps of its
    // magnitude, which becomes a relative error of the integrand.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(top)) * kron;
    const double err = std::max(diff, floor);
    return {a, b, top + lh + std::log(kron), top + lh + std::log(err), top + lh + std::log(floor)};
}

LogIntegral refine(const LogIntegrand& log_f, std::vector<LogPanel> panels, int evals,
                   const QuadratureOptions& opts) {
    const double log_tol = std::log(opts.rel_tol);
    std::vector<double> values, errors, floors;
    while (true) {
        values.clear();
        errors.clear();
        floors.clear();
        std::size_t worst_idx = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            values.push_back(panels[i].log_value);
            errors.push_back(panels[i].log_error);
            floors.push_back(panels[i].log_floor);
            if (panels[i].log_error > panels[worst_idx].log_error) worst_idx = i;
        }
        const double total = log_sum_exp(values);
        const double total_err = log_sum_exp(errors);
        if (total == -kInf) return {-kInf, -kInf, evals};
        const double attainable = std::max(total + log_tol, log_sum_exp(floors) + std::log(2.0));
        if (total_err <= attainable) return {total, total_err, evals};
        const LogPanel worst = panels[worst_idx];
        const double mid = 0.5 * (worst.a + worst.b);
        const bool splittable = mid > worst.a && mid < worst.b;
        if (!splittable || evals >= opts.max_evaluations) {
            std::ostringstream msg;
            msg << "quadrature did not converge: relative error estimate "
                << std::exp(total_err - total) << " after " << evals << " evaluations"
                << " (worst panel [" << worst.a << ", " << worst.b << "])";
            throw NumericalError(msg.str());
        }
        panels[worst_idx] = eval_log_panel(log_f, worst.a, mid, evals);
        panels.push_back(eval_log_panel(log_f, mid, worst.b, evals));
    }
}

double auto_step(const LogIntegrand& log_f, double a) {
    const double delta = 1e-6 * std::max(1.0, std::abs(a));
    const double l0 = log_f(a);
    const double l1 = log_f(a + delta);
    double slope = (l1 - l0) / delta;
    if (!std::isfinite(slope)) slope = 1.0;
    const double h = 1.0 / std::max(std::abs(slope), 1e-3);
    return std::clamp(h, 1e-12 * std::max(1.0, std::abs(a)), 1e3);
}

}  // namespace

double LogIntegral::relative_error() const {
    if (log_value == -kInf) return 0.0;
    return std::exp(log_error - log_value);
}

LogIntegral log_integrate(const LogIntegrand& log_f, double a, double b,
                          const QuadratureOptions& opts) {
    if (!(a <= b)) throw InvalidArgument("log_integrate: require a <= b");
    if (a == b) return {-kInf, -kInf, 0};
    int evals = 0;
    std::vector<LogPanel> panels{eval_log_panel(log_f, a, b, evals)};
    return refine(log_f, std::move(panels), evals, opts);
}

LogIntegral log_integrate_upper(const LogIntegrand& log_f, double a, const QuadratureOptions& opts) {
    if (!std::isfinite(a)) throw InvalidArgument("log_integrate_upper: lower limit must be finite");
    double width = opts.initial_step > 0.0 ? opts.initial_step : auto_step(log_f, a);
    int evals = 2;
    std::vector<LogPanel> panels;
    double total = -kInf;
    double x = a;
    double l_start = log_f(x);
    constexpr int kMaxPanels = 400;
    for (int i = 0;; ++i) {
        if (i == kMaxPanels) {
            throw NumericalError("quadrature: integrand does not decay on [" +
                                 std::to_string(a) + ", inf)");
        }
        const double next = x + width;
        if (!std::isfinite(next)) throw NumericalError("quadrature: tail search overflowed");
        LogPanel p = eval_log_panel(log_f, x, next, evals);
        panels.push_back(p);
        total = log_add(total, p.log_value);
        const double l_end = log_f(next);
        ++evals;
        const bool negligible = p.log_value < total - opts.drop_nats || total == -kInf;
        const bool decaying = l_end < l_start || l_end == -kInf;
        if (negligible && decaying && total > -kInf) break;
        if (total == -kInf && i > 60) break;
        x = next;
        l_start = l_end;
        width *= 2.0;
    }
    return refine(log_f, std::move(panels), evals, opts);
}

LogIntegral log_integrate_lower(const LogIntegrand& log_f, double b, const QuadratureOptions& opts) {
    return log_integrate_upper([&](double y) { return log_f(-y); }, -b, opts);
}

LogIntegral log_integrate_line(const LogIntegrand& log_f, double center, const QuadratureOptions& opts) {
    const LogIntegral lo = log_integrate_lower(log_f, center, opts);
    const LogIntegral hi = log_integrate_upper(log_f, center, opts);
    return {log_add(lo.log_value, hi.log_value), log_add(lo.log_error, hi.log_error),
            lo.evaluations + hi.evaluations};
}

namespace {

struct Panel {
    double a, b;
    double value, error, l1;
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b, int& evals) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double fc = f(mid);
    double kron = kKronrod[7] * fc;
    double gauss = kGauss[3] * fc;
    double l1 = kKronrod[7] * std::abs(fc);
    for (int i = 0; i < 7; ++i) {
        const double f1 = f(mid - half * kNodes[i]);
        const double f2 = f(mid + half * kNodes[i]);
        kron += kKronrod[i] * (f1 + f2);
        l1 += kKronrod[i] * (std::abs(f1) + std::abs(f2));
        if (i % 2 == 1) gauss += kGauss[i / 2] * (f1 + f2);
    }
    evals += 15;
    if (!std::isfinite(kron)) throw NumericalError("quadrature: non-finite integrand");
    const double err = std::max(std::abs(kron - gauss) * half,
                                4.0 * std::numeric_limits<double>::epsilon() * l1 * half);
    return {a, b, kron * half, err, l1 * half};
}

}  // namespace

Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol, double abs_tol, int max_evaluations) {
    if (!(a <= b)) throw InvalidArgument("integrate: require a <= b");
    int evals = 0;
    std::vector<Panel> panels{eval_panel(f, a, b, evals)};
    while (true) {
        double value = 0.0, error = 0.0, l1 = 0.0;
        std::size_t worst_idx = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            value += panels[i].value;
            error += panels[i].error;
            l1 += panels[i].l1;
            if (panels[i].error > panels[worst_idx].error) worst_idx = i;
        }
        if (error <= std::max(abs_tol, rel_tol * l1)) return {value, error, l1, evals};
        const Panel worst = panels[worst_idx];
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) || evals >= max_evaluations) {
            std::ostringstream msg;
            msg << "quadrature did not converge: error estimate " << error << " vs scale " << l1
                << " after " << evals << " evaluations";
            throw NumericalError(msg.str());
        }
        panels[worst_idx] = eval_panel(f, worst.a, mid, evals);
        panels.push_back(eval_panel(f, mid, worst.b, evals));
    }
}

}  // namespace smilewing
