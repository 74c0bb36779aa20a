#pragma once

#include <functional>

namespace freeprob::quad {

using Fn = std::function<double(double)>;

struct Result {
    double value = 0.0;
    double achieved = 0.0; // accumulated local error estimate
};

/// Fixed Gauss-Legendre rule of the given order on [a,b].
double gl_panel(const Fn& f, double a, double b, int order);

/// Adaptive bisection with GL16/GL32 error estimate.
Result adaptive(const Fn& f, double a, double b, double tol, int max_depth = 32);

/// Composite rule on geometrically shrinking panels accumulating toward one
/// endpoint; handles any integrable power or log singularity there.
double dyadic_toward(const Fn& f, double a, double b, bool toward_left,
                     int levels = 100, int order = 16);

/// Integral of f over [a,b] where f behaves like (t-a)^exp_lo near a and
/// (b-t)^exp_hi near b.  Half-odd-integer exponents are regularized by the
/// substitution t = edge +- u^2; other nonzero exponents fall back to dyadic
/// panels.  exp <= -1 is the caller's responsibility (divergent).
Result integrate_singular(const Fn& f, double a, double b, double exp_lo,
                          double exp_hi, double tol);

/// Same, but throws numerics_error if the requested tolerance was not reached.
double integrate_or_throw(const Fn& f, double a, double b, double exp_lo,
                          double exp_hi, double tol, const char* what);

} // namespace freeprob::quad
