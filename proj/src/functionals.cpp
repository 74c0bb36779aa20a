#include "freeprob/functionals.hpp"

#include <cmath>
#include <limits>

#include "freeprob/errors.hpp"
#include "freeprob/quadrature.hpp"

namespace freeprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Piece = CompactMeasure::Piece;

// integral of rho(t) * log|t - s| over one piece, s anywhere; the distance to
// s is always a quadrature variable, never a subtraction of close doubles
double log_kernel_integral(const Piece& p, double s) {
    double span = p.hi - p.lo;
    double acc = 0.0;
    if (s >= p.lo && s <= p.hi) {
        double dl = s - p.lo, dr = p.hi - s;
        if (dl > 0.0) {
            auto g = [&p, s](double u) { return p.rho(s - u) * std::log(u); };
            acc += quad::dyadic_toward(g, 0.0, 0.5 * dl, true);
            acc += quad::integrate_singular(g, 0.5 * dl, dl, 0.0, p.exp_lo, 1e-11)
                       .value;
        }
        if (dr > 0.0) {
            auto g = [&p, s](double u) { return p.rho(s + u) * std::log(u); };
            acc += quad::dyadic_toward(g, 0.0, 0.5 * dr, true);
            acc += quad::integrate_singular(g, 0.5 * dr, dr, 0.0, p.exp_hi, 1e-11)
                       .value;
        }
        return acc;
    }
    if (s < p.lo) {
        double delta = p.lo - s;
        auto g = [&p, delta](double u) {
            return p.rho(p.lo + u) * std::log(u + delta);
        };
        acc += quad::dyadic_toward(g, 0.0, 0.5 * span, true);
        acc += quad::integrate_singular(g, 0.5 * span, span, 0.0, p.exp_hi, 1e-11)
                   .value;
        return acc;
    }
    double delta = s - p.hi;
    auto g = [&p, delta](double u) {
        return p.rho(p.hi - u) * std::log(u + delta);
    };
    acc += quad::dyadic_toward(g, 0.0, 0.5 * span, true);
    acc += quad::integrate_singular(g, 0.5 * span, span, 0.0, p.exp_lo, 1e-11).value;
    return acc;
}

} // namespace

double default_kappa() { return 4.0 * M_PI * M_PI / 3.0; }

double fisher_of_measure(const CompactMeasure& mu, double kappa) {
    if (mu.has_atoms()) return kInf;
    double total = 0.0;
    for (const Piece& p : mu.pieces()) {
        // rho ~ (t-edge)^e gives rho^3 ~ (t-edge)^{3e}: divergent when 3e <= -1
        if (3.0 * p.exp_lo <= -1.0 || 3.0 * p.exp_hi <= -1.0) return kInf;
        auto f = [&p](double t) {
            double r = p.rho(t);
            return r * r * r;
        };
        total += quad::integrate_or_throw(f, p.lo, p.hi, 3.0 * p.exp_lo,
                                          3.0 * p.exp_hi, 1e-11, "fisher");
    }
    return kappa * total;
}

MinFisherResult min_fisher_thm11_full(const CompactMeasure& nu, double kappa) {
    for (const auto& a : nu.atoms())
        if (a.x < -1e-12) throw input_error("min_fisher: nu must live on [0,inf)");
    for (const auto& p : nu.pieces())
        if (p.lo < -1e-12) throw input_error("min_fisher: nu must live on [0,inf)");

    double via_sqrt = 2.0 * fisher_of_measure(nu.symmetric_square_root(), kappa);

    double via_weighted;
    if (nu.has_atoms()) {
        via_weighted = kInf;
    } else {
        double total = 0.0;
        bool divergent = false;
        for (const Piece& p : nu.pieces()) {
            double elo = 3.0 * p.exp_lo + (p.lo == 0.0 ? 1.0 : 0.0);
            if (elo <= -1.0 || 3.0 * p.exp_hi <= -1.0) {
                divergent = true;
                break;
            }
            auto f = [&p](double t) {
                double r = p.rho(t);
                return t * r * r * r;
            };
            total += quad::integrate_or_throw(f, p.lo, p.hi, elo, 3.0 * p.exp_hi,
                                              1e-11, "min_fisher");
        }
        via_weighted = divergent ? kInf : 2.0 * kappa * total;
    }

    if (std::isfinite(via_sqrt) != std::isfinite(via_weighted))
        throw numerics_error("min_fisher: the two evaluation routes disagree",
                             kInf);
    if (std::isfinite(via_sqrt)) {
        double scale = std::max(1.0, std::abs(via_sqrt));
        if (std::abs(via_sqrt - via_weighted) > 1e-8 * scale)
            throw numerics_error("min_fisher: the two evaluation routes disagree",
                                 std::abs(via_sqrt - via_weighted));
    }
    return {via_sqrt, via_sqrt, via_weighted};
}

double min_fisher_thm11(const CompactMeasure& nu, double kappa) {
    return min_fisher_thm11_full(nu, kappa).value;
}

double log_energy(const CompactMeasure& mu) {
    if (mu.has_atoms()) return -kInf; // atom self-energy diverges
    const auto& pieces = mu.pieces();
    double total = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        for (std::size_t j = 0; j < pieces.size(); ++j) {
            const Piece& q = pieces[j];
            const Piece& p = pieces[i];
            auto outer = [&](double s) { return q.rho(s) * log_kernel_integral(p, s); };
            // graded composite toward both endpoints: resolves edge
            // singularities of rho and the log kinks where s meets p's edges
            double m = 0.5 * (q.lo + q.hi);
            total += quad::dyadic_toward(outer, q.lo, m, true, 72, 24);
            total += quad::dyadic_toward(outer, m, q.hi, false, 72, 24);
        }
    }
    return total;
}

double entropy_of_measure(const CompactMeasure& mu) {
    double e = log_energy(mu);
    if (!std::isfinite(e)) return -kInf;
    return e + 0.75 + 0.5 * std::log(2.0 * M_PI);
}

double scaling_fisher(double value, double lambda) {
    if (!(lambda > 0.0)) throw input_error("scaling needs lambda > 0");
    return value / (lambda * lambda);
}

double scaling_entropy(double value, double lambda) {
    if (!(lambda > 0.0)) throw input_error("scaling needs lambda > 0");
    return value + std::log(lambda);
}

TheoremId theorem_id_from_string(const std::string& s) {
    if (s == "T11") return TheoremId::T11;
    if (s == "T12_1" || s == "T12-1") return TheoremId::T12_1;
    if (s == "T12_2" || s == "T12-2") return TheoremId::T12_2;
    if (s == "T13") return TheoremId::T13;
    if (s == "T14") return TheoremId::T14;
    if (s == "T15_1" || s == "T15-1") return TheoremId::T15_1;
    if (s == "T15_2" || s == "T15-2") return TheoremId::T15_2;
    throw input_error("unknown theorem id '" + s + "'");
}

std::string theorem_id_to_string(TheoremId id) {
    switch (id) {
        case TheoremId::T11: return "T11";
        case TheoremId::T12_1: return "T12_1";
        case TheoremId::T12_2: return "T12_2";
        case TheoremId::T13: return "T13";
        case TheoremId::T14: return "T14";
        case TheoremId::T15_1: return "T15_1";
        case TheoremId::T15_2: return "T15_2";
    }
    return "?";
}

TheoremBound theorem_bound(TheoremId id, const CompactMeasure* nu, int d,
                           double scalar_input, double kappa) {
    if (d < 1) throw input_error("theorem_bound: d must be >= 1");
    TheoremBound b;
    b.id = id;
    b.d = d;
    double d3 = static_cast<double>(d) * d * d;
    double d2 = static_cast<double>(d) * d;
    switch (id) {
        case TheoremId::T11: {
            if (!nu) throw input_error("T11 needs a measure nu");
            b.value = min_fisher_thm11(*nu, kappa);
            b.formula_trace = "min Phi*(a,a*) = 2 Phi*(sqrt(nu))";
            break;
        }
        case TheoremId::T13: {
            if (!nu) throw input_error("T13 needs a measure nu");
            b.value = d3 * min_fisher_thm11(*nu, kappa);
            b.formula_trace = "2 d^3 Phi*(sqrt(nu)), d=" + std::to_string(d);
            break;
        }
        case TheoremId::T14: {
            if (!nu) throw input_error("T14 needs a measure nu");
            double chi = entropy_of_measure(nu->symmetric_square_root());
            b.value = 2.0 * d2 * (chi - 0.5 * std::log(static_cast<double>(d)));
            b.formula_trace = "2 d^2 (chi*(sqrt(nu)) - log(d)/2), chi* = " +
                              std::to_string(chi);
            break;
        }
        case TheoremId::T12_1:
        case TheoremId::T12_2: {
            b.value = d3 * scalar_input;
            b.formula_trace = "d^3 * Phi_input";
            break;
        }
        case TheoremId::T15_1: {
            b.value = d2 * (scalar_input - std::log(static_cast<double>(d)));
            b.formula_trace = "d^2 (chi_input - log d)";
            break;
        }
        case TheoremId::T15_2: {
            b.value = d2 * (scalar_input - 0.5 * std::log(static_cast<double>(d)));
            b.formula_trace = "d^2 (chi_input - log(d)/2)";
            break;
        }
    }
    return b;
}

std::function<double(double)> conjugate_density(const CompactMeasure& mu) {
    if (mu.has_atoms())
        throw input_error("conjugate_density requires a purely continuous measure");
    auto pieces = mu.pieces();
    return [pieces](double t) {
        double pv = 0.0;
        for (const Piece& p : pieces) {
            double span = p.hi - p.lo;
            if (t > p.lo + 1e-13 * span && t < p.hi - 1e-13 * span) {
                double delta = std::min(t - p.lo, p.hi - t);
                // symmetric fold around the pole: smooth difference quotient
                auto folded = [&p, t](double u) {
                    return (p.rho(t - u) - p.rho(t + u)) / u;
                };
                pv += quad::dyadic_toward(folded, 0.0, 0.5 * delta, true);
                // at u = delta one of t -+ u reaches a piece edge, inheriting
                // that edge's density exponent
                double edge_exp = (t - p.lo <= p.hi - t) ? p.exp_lo : p.exp_hi;
                pv += quad::integrate_singular(folded, 0.5 * delta, delta, 0.0,
                                               edge_exp, 1e-11)
                          .value;
                auto raw = [&p, t](double s) { return p.rho(s) / (t - s); };
                if (t - delta > p.lo)
                    pv += quad::integrate_singular(raw, p.lo, t - delta, p.exp_lo,
                                                   0.0, 1e-10)
                              .value;
                if (t + delta < p.hi)
                    pv += quad::integrate_singular(raw, t + delta, p.hi, 0.0,
                                                   p.exp_hi, 1e-10)
                              .value;
            } else {
                auto raw = [&p, t](double s) { return p.rho(s) / (t - s); };
                bool near_lo = std::abs(t - p.lo) < 0.05 * span;
                bool near_hi = std::abs(t - p.hi) < 0.05 * span;
                double m = 0.5 * (p.lo + p.hi);
                if (near_lo)
                    pv += quad::dyadic_toward(raw, p.lo, m, true);
                else
                    pv += quad::integrate_singular(raw, p.lo, m, p.exp_lo, 0.0, 1e-10)
                              .value;
                if (near_hi)
                    pv += quad::dyadic_toward(raw, m, p.hi, false);
                else
                    pv += quad::integrate_singular(raw, m, p.hi, 0.0, p.exp_hi, 1e-10)
                              .value;
            }
        }
        return 2.0 * pv; // 2 pi * (1/pi) PV integral
    };
}

} // namespace freeprob
