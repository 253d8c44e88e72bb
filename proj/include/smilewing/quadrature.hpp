#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature. The log-domain variants take the
// logarithm of a positive integrand and return the logarithm of the integral,
// so integrands of size exp(-700) and below are handled without underflow:
// every panel is scaled by its own largest sample before summation.

#include <functional>

namespace smilewing {

using LogIntegrand = std::function<double(double)>;

struct QuadratureOptions {
    double rel_tol = 1e-12;
    /// Tail panels are generated until their contribution falls this many
    /// nats below the running total.
    double drop_nats = 45.0;
    /// First panel width for semi-infinite ranges; 0 picks it from the local
    /// log-slope of the integrand.
    double initial_step = 0.0;
    int max_evaluations = 400000;
};

struct LogIntegral {
    double log_value;
    /// log of the absolute error estimate; exp(log_error - log_value) is the
    /// relative error, i.e. the error in log_value.
    double log_error;
    int evaluations;

    double relative_error() const;
};

/// log of the integral of exp(log_f) over the finite interval [a, b].
LogIntegral log_integrate(const LogIntegrand& log_f, double a, double b,
                          const QuadratureOptions& opts = {});

/// log of the integral of exp(log_f) over [a, +inf).
LogIntegral log_integrate_upper(const LogIntegrand& log_f, double a,
                                const QuadratureOptions& opts = {});

/// log of the integral of exp(log_f) over (-inf, b].
LogIntegral log_integrate_lower(const LogIntegrand& log_f, double b,
                                const QuadratureOptions& opts = {});

/// log of the integral of exp(log_f) over the whole real line, split at `center`.
LogIntegral log_integrate_line(const LogIntegrand& log_f, double center,
                               const QuadratureOptions& opts = {});

struct Integral {
    double value;
    double abs_error;
    /// Integral of |f|, the scale against which cancellation is judged.
    double l1;
    int evaluations;
};

/// Plain adaptive integral of a signed integrand on [a, b]. Converged when
/// the error estimate is below max(abs_tol, rel_tol * l1).
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-12, double abs_tol = 0.0,
                   int max_evaluations = 400000);

}  // namespace smilewing
