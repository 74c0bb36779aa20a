#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "freeprob/polymatrix.hpp"
#include "freeprob/report.hpp"

namespace freeprob {

/// Per-generator conjugate candidates, keyed by letter codes.  The candidate
/// for a starred letter must be the adjoint of the unstarred one; missing
/// entries are filled in that way.
template <class S>
using CandidateMap = std::map<std::uint32_t, Polynomial<S>>;

namespace detail {

template <class S>
CandidateMap<S> complete_candidates(const std::vector<Letter>& family,
                                    CandidateMap<S> cand) {
    for (const Letter& l : family) {
        auto it = cand.find(l.code());
        auto jt = cand.find(l.adjoint().code());
        if (it == cand.end() && jt == cand.end())
            throw input_error("missing conjugate candidate for a family member");
        if (it == cand.end()) cand[l.code()] = jt->second.adjoint();
    }
    for (const Letter& l : family) {
        auto jt = cand.find(l.adjoint().code());
        if (jt != cand.end() && !(cand[l.code()] == jt->second.adjoint()))
            throw input_error("conjugate candidates are not involution-consistent");
    }
    return cand;
}

template <class S>
std::string letter_str(const TraceFunctional<S>& f, Letter l) {
    return f.name(l.gen) + (l.star ? "*" : "");
}

} // namespace detail

/// Checks the conjugate relations for the family against a spanning set of the
/// subalgebra B (default: scalars, spanning set {1}): for every monomial
/// xi_i b0 a_{i1} b1 ... a_{in} bn with n <= degree, the expectation must split
/// into the prescribed sum of products.
template <class S>
ViolationReport verify_conjugate(
    const TraceFunctional<S>& f, const std::vector<Letter>& family,
    CandidateMap<S> candidates, int degree,
    std::vector<Polynomial<S>> b_span = {}) {
    using T = scalar_traits<S>;
    using Poly = Polynomial<S>;
    if (b_span.empty()) b_span = {Poly::one()};
    candidates = detail::complete_candidates<S>(family, std::move(candidates));

    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = degree;

    double est = static_cast<double>(family.size());
    for (int n = 1; n <= degree; ++n) {
        est *= static_cast<double>(family.size() * b_span.size());
        if (est > 2e7) throw resource_error("verify_conjugate: relation count guard");
    }

    // tuple state: letters i_1..i_n and span elements b_0..b_n
    std::vector<Letter> is;
    std::vector<int> bs;
    std::function<void(int)> sweep = [&](int n) {
        // prefix polynomials b0 a_{i1} b1 ... a_{im} bm and their expectations
        std::vector<Poly> prefix(n + 1);
        prefix[0] = b_span[bs[0]];
        for (int m = 1; m <= n; ++m)
            prefix[m] =
                prefix[m - 1] * Poly::from_word(Word::single(is[m - 1].gen,
                                                             is[m - 1].star)) *
                b_span[bs[m]];
        std::vector<Poly> suffix(n + 2);
        suffix[n + 1] = Poly::one();
        for (int m = n; m >= 1; --m)
            suffix[m] = b_span[bs[m]] *
                        (m == n ? Poly::one()
                                : Poly::from_word(Word::single(is[m].gen, is[m].star)) *
                                      suffix[m + 1]);
        for (const Letter& i : family) {
            const Poly& xi = candidates.at(i.code());
            S lhs = f.evaluate(xi * prefix[n]);
            S rhs = T::zero();
            for (int m = 1; m <= n; ++m) {
                if (!(is[m - 1] == i)) continue;
                rhs += f.evaluate(prefix[m - 1]) * f.evaluate(suffix[m]);
            }
            rep.record(T::abs(lhs - rhs), [&] {
                std::string s = "xi(" + detail::letter_str(f, i) + ")";
                for (int m = 0; m <= n; ++m) {
                    s += " b" + std::to_string(bs[m]);
                    if (m < n) s += " " + detail::letter_str(f, is[m]);
                }
                return s;
            });
        }
    };
    std::function<void(int, int)> enumerate = [&](int n, int target) {
        if (n == target + 1) {
            if (static_cast<int>(bs.size()) == target + 1) sweep(target);
            return;
        }
        for (std::size_t b = 0; b < b_span.size(); ++b) {
            bs.push_back(static_cast<int>(b));
            if (n == target)
                enumerate(n + 1, target);
            else
                for (const Letter& l : family) {
                    is.push_back(l);
                    enumerate(n + 1, target);
                    is.pop_back();
                }
            bs.pop_back();
        }
    };
    for (int n = 0; n <= degree; ++n) {
        is.clear();
        bs.clear();
        enumerate(0, n);
    }
    return rep;
}

/// Sum of squared candidate norms, valid only after verification: this equals
/// the free Fisher information when the candidates lie in the generated
/// algebra, and is an upper bound in general.
template <class S>
S fisher_from_candidates(const TraceFunctional<S>& f,
                         const std::vector<Letter>& family,
                         CandidateMap<S> candidates,
                         const ViolationReport& verified,
                         double tol = -1.0) {
    if (tol < 0.0) tol = verified.default_tolerance();
    if (!verified.ok(tol))
        throw input_error("fisher_from_candidates: candidates failed verification (max "
                          "violation " +
                          std::to_string(verified.max_abs_violation) + ")");
    candidates = detail::complete_candidates<S>(family, std::move(candidates));
    S acc = scalar_traits<S>::zero();
    for (const Letter& l : family) {
        const auto& xi = candidates.at(l.code());
        acc += f.evaluate(xi.adjoint() * xi);
    }
    return acc;
}

enum class EtaMode {
    FullScalar, // B = M_2(C I), eta flips the diagonal and kills off-diagonal
    Diagonal    // B = D, eta0 swaps the two diagonal entries
};

/// Conjugate relations with respect to B and eta in the 2x2 matrix picture:
/// phi_2(X B0 A B1 ... A Bn) = sum_m phi_2(eta(E_B(B0 A ... A B_{m-1})) Bm A ... A Bn).
template <class S>
ViolationReport verify_conjugate_eta(const TraceFunctional<S>& f,
                                     const PolyMatrix<S>& A, const PolyMatrix<S>& X,
                                     EtaMode mode, int degree) {
    using T = scalar_traits<S>;
    using PM = PolyMatrix<S>;
    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = degree;

    std::vector<std::pair<PM, std::string>> basis;
    if (mode == EtaMode::FullScalar) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                basis.push_back({PM::unit(2, i, j),
                                 "V" + std::to_string(i + 1) + std::to_string(j + 1)});
    } else {
        basis.push_back({PM::unit(2, 0, 0), "V11"});
        basis.push_back({PM::unit(2, 1, 1), "V22"});
    }

    auto flip = [&](const PM& P) {
        return mode == EtaMode::FullScalar ? eta_flip(expect_entrywise(f, P))
                                           : eta0_flip(expect_diagonal(f, P));
    };

    std::vector<int> choice;
    std::vector<PM> prefix; // prefix[m] = B0 A B1 ... A Bm
    std::function<void()> node = [&] {
        int n = static_cast<int>(choice.size()) - 1;
        S lhs = phi_d(f, X * prefix[n]);
        S rhs = T::zero();
        // suffix_m = Bm A ... A Bn, built backward
        std::vector<PM> suffix(n + 1);
        suffix[n] = basis[choice[n]].first;
        for (int m = n - 1; m >= 1; --m)
            suffix[m] = basis[choice[m]].first * (A * suffix[m + 1]);
        for (int m = 1; m <= n; ++m) rhs += phi_d(f, flip(prefix[m - 1]) * suffix[m]);
        rep.record(T::abs(lhs - rhs), [&] {
            std::string s;
            for (int m = 0; m <= n; ++m) {
                if (m) s += " A ";
                s += basis[choice[m]].second;
            }
            return s;
        });
    };
    std::function<void(int)> dfs = [&](int n) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            choice.push_back(static_cast<int>(b));
            prefix.push_back(prefix.empty() ? basis[b].first
                                            : (prefix.back() * A) * basis[b].first);
            node();
            if (n < degree) dfs(n + 1);
            prefix.pop_back();
            choice.pop_back();
        }
    };
    dfs(0);
    return rep;
}

/// Matrix-entry conjugates to matrix conjugate: X = (1/d)(xi_ji).
template <class S>
PolyMatrix<S> entries_to_matrix_conjugate(
    const std::vector<std::vector<Polynomial<S>>>& xi, int d) {
    PolyMatrix<S> X(d);
    S inv_d = scalar_traits<S>::div_int(scalar_traits<S>::one(), d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) X.at(i, j) = xi[j][i].scaled(inv_d);
    return X;
}

/// Inverse map: xi_ij = d * X_ji.
template <class S>
std::vector<std::vector<Polynomial<S>>> matrix_to_entries(const PolyMatrix<S>& X) {
    int d = X.d;
    S dd = scalar_traits<S>::from_int(d);
    std::vector<std::vector<Polynomial<S>>> xi(d, std::vector<Polynomial<S>>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) xi[i][j] = X.at(j, i).scaled(dd);
    return xi;
}

/// Conjugate relations for the pair {A, A*} with respect to scalar d x d
/// matrices: phi_d(X B0 A_{i1} B1 ... A_{in} Bn) = sum of split products with
/// delta on the matching leg, both for X (target A) and X* (target A*).
template <class S>
ViolationReport verify_matrix_conjugate(const TraceFunctional<S>& f,
                                        const PolyMatrix<S>& A,
                                        const PolyMatrix<S>& X, int degree) {
    using T = scalar_traits<S>;
    using PM = PolyMatrix<S>;
    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = degree;
    int d = A.d;

    std::vector<PM> basis;
    std::vector<std::string> bnames;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            basis.push_back(PM::unit(d, i, j));
            bnames.push_back("V" + std::to_string(i + 1) + std::to_string(j + 1));
        }
    PM As = A.adjoint();
    PM Xs = X.adjoint();

    struct Step {
        int a; // 0: A, 1: A*
        int b; // basis index
    };
    std::vector<int> b0(1, 0);
    std::vector<Step> steps;
    std::vector<PM> prefix;   // prefix[m] = B0 A_{i1} B1 ... A_{im} Bm
    std::vector<S> prefix_phi;

    auto node = [&] {
        int n = static_cast<int>(steps.size());
        std::vector<PM> suffix(n + 1); // suffix[m] = Bm A_{i_{m+1}} ... A_{in} Bn
        suffix[n] = n == 0 ? basis[b0[0]] : basis[steps[n - 1].b];
        for (int m = n - 1; m >= 1; --m) {
            const PM& Am = steps[m].a == 0 ? A : As;
            suffix[m] = basis[steps[m - 1].b] * (Am * suffix[m + 1]);
        }
        if (n > 0) {
            const PM& A1 = steps[0].a == 0 ? A : As;
            suffix[0] = basis[b0[0]] * (A1 * suffix[1]);
        }
        for (int target = 0; target < 2; ++target) {
            const PM& xi = target == 0 ? X : Xs;
            S lhs = phi_d(f, xi * suffix[0]);
            S rhs = T::zero();
            for (int m = 1; m <= n; ++m)
                if (steps[m - 1].a == target) rhs += prefix_phi[m - 1] * phi_d(f, suffix[m]);
            rep.record(T::abs(lhs - rhs), [&] {
                std::string s = target == 0 ? "X " : "X* ";
                s += bnames[b0[0]];
                for (const Step& st : steps)
                    s += std::string(st.a == 0 ? " A " : " A* ") + bnames[st.b];
                return s;
            });
        }
    };

    std::function<void(int)> dfs = [&](int n) {
        node();
        if (n == degree) return;
        for (int a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < basis.size(); ++b) {
                steps.push_back({a, static_cast<int>(b)});
                const PM& Am = a == 0 ? A : As;
                prefix.push_back((prefix.back() * Am) * basis[b]);
                prefix_phi.push_back(phi_d(f, prefix.back()));
                dfs(n + 1);
                prefix.pop_back();
                prefix_phi.pop_back();
                steps.pop_back();
            }
    };
    for (std::size_t b = 0; b < basis.size(); ++b) {
        b0[0] = static_cast<int>(b);
        prefix = {basis[b]};
        prefix_phi = {phi_d(f, basis[b])};
        steps.clear();
        dfs(0);
    }
    return rep;
}

/// Checks that a selfadjoint matrix family is its own conjugate with respect
/// to scalar matrices.  Matrix units are collapsed into entry chains, so the
/// sweep only ever evaluates scalar words.
template <class S>
ViolationReport verify_selfconjugate_family(const TraceFunctional<S>& f,
                                            const std::vector<PolyMatrix<S>>& fam,
                                            int degree) {
    using T = scalar_traits<S>;
    using Poly = Polynomial<S>;
    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = degree;
    int d = fam.at(0).d;
    S inv_d = T::div_int(T::one(), d);

    struct Slot {
        int fi;   // family index of S_{i_m}
        int k, l; // unit V_{k_m, l_m} after it
    };
    std::vector<Slot> slots;
    std::vector<Poly> chain;    // chain[m] = entry product up to slot m
    std::vector<S> prefix_phi;  // phi_d of B0 S_{i1} B1 ... B_{m}
    int k0 = 0, l0 = 0;

    auto node = [&] {
        int n = static_cast<int>(slots.size());
        int ln = n == 0 ? l0 : slots.back().l;
        const Poly& P = chain[n];
        for (std::size_t i = 0; i < fam.size(); ++i) {
            S lhs = inv_d * f.evaluate(fam[i].at(ln, k0) * P);
            S rhs = T::zero();
            for (int m = 1; m <= n; ++m) {
                if (slots[m - 1].fi != static_cast<int>(i)) continue;
                // suffix phi_d(V_{km lm} S ... V_{kn ln})
                Poly suf = Poly::one();
                for (int r = m + 1; r <= n; ++r)
                    suf = suf * fam[slots[r - 1].fi].at(slots[r - 2].l, slots[r - 1].k);
                int km = slots[m - 1].k;
                if (km == ln) rhs += prefix_phi[m - 1] * (inv_d * f.evaluate(suf));
            }
            rep.record(T::abs(lhs - rhs), [&] {
                std::string s = "S" + std::to_string(i + 1) + " chain n=" +
                                std::to_string(n);
                return s;
            });
        }
    };

    std::function<void(int)> dfs = [&](int n) {
        node();
        if (n == degree) return;
        int prev_l = n == 0 ? l0 : slots.back().l;
        for (int fi = 0; fi < static_cast<int>(fam.size()); ++fi)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    slots.push_back({fi, k, l});
                    chain.push_back(chain.back() * fam[fi].at(prev_l, k));
                    // phi_d of the prefix ending at unit V_{k,l}: the collapsed
                    // unit is V_{k0, l}, so the trace needs k0 == l
                    S pphi = (k0 == l) ? inv_d * f.evaluate(chain.back()) : T::zero();
                    prefix_phi.push_back(pphi);
                    dfs(n + 1);
                    prefix_phi.pop_back();
                    chain.pop_back();
                    slots.pop_back();
                }
    };

    for (k0 = 0; k0 < d; ++k0)
        for (l0 = 0; l0 < d; ++l0) {
            slots.clear();
            chain = {Poly::one()};
            prefix_phi = {(k0 == l0) ? inv_d : T::zero()};
            dfs(0);
        }
    return rep;
}

} // namespace freeprob
