#pragma once

#include <functional>
#include <string>

#include "freeprob/measure.hpp"

namespace freeprob {

/// Normalization constant kappa in Phi*(mu) = kappa * int rho^3.  The default
/// 4 pi^2 / 3 makes the variance-1 semicircle have Phi* = 1, matching the
/// conjugate-system normalization Phi* = sum ||xi||^2.
double default_kappa();

/// kappa * int rho^3 over the density pieces; +inf if the measure has atoms or
/// the integral diverges at a singular edge.
double fisher_of_measure(const CompactMeasure& mu, double kappa = default_kappa());

struct MinFisherResult {
    double value;        // the minimum, 2 Phi*(sqrt nu)
    double via_sqrt;     // 2 * fisher(symmetric square root)
    double via_weighted; // 2 kappa * int t rho(t)^3 dt
};

/// Minimal Phi*(a,a*) over elements with a*a distributed by nu, computed along
/// both routes; they must agree to 1e-8 or an internal-consistency error is
/// raised.
MinFisherResult min_fisher_thm11_full(const CompactMeasure& nu,
                                      double kappa = default_kappa());
double min_fisher_thm11(const CompactMeasure& nu, double kappa = default_kappa());

/// int int log|s-t| dmu(s) dmu(t); -inf whenever atoms are present.
double log_energy(const CompactMeasure& mu);

/// chi*(mu) = log-energy + 3/4 + log(2 pi)/2; -inf for atomic measures.
double entropy_of_measure(const CompactMeasure& mu);

/// Scaling laws under t -> lambda t.
double scaling_fisher(double value, double lambda);
double scaling_entropy(double value, double lambda);

enum class TheoremId { T11, T12_1, T12_2, T13, T14, T15_1, T15_2 };

TheoremId theorem_id_from_string(const std::string& s);
std::string theorem_id_to_string(TheoremId id);

struct TheoremBound {
    TheoremId id;
    double d = 1.0;
    double value = 0.0;
    std::string formula_trace;
};

/// Right-hand sides of the min/max theorems.  T11/T13/T14 take the measure nu;
/// T12_*/T15_* transform an externally supplied Fisher or entropy value.
TheoremBound theorem_bound(TheoremId id, const CompactMeasure* nu, int d,
                           double scalar_input = 0.0,
                           double kappa = default_kappa());

/// The conjugate density h with h(t) = 2 pi (H rho)(t), H the principal-value
/// Hilbert transform.  Requires a purely continuous measure; defined for t in
/// the interior of a density piece.
std::function<double(double)> conjugate_density(const CompactMeasure& mu);

} // namespace freeprob
