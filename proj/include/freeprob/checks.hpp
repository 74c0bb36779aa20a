#pragma once

#include <functional>
#include <string>
#include <vector>

#include "freeprob/polymatrix.hpp"
#include "freeprob/report.hpp"

namespace freeprob {

namespace detail {

/// The four building blocks w_{ij;k}(a): centered powers of aa*/a*a on the
/// diagonal slots, one-sided words off the diagonal.  Indices are 1-based to
/// match the usual subscripts.
template <class S>
Polynomial<S> w_block(const TraceFunctional<S>& f, GenId a, int i, int j, int k) {
    using Poly = Polynomial<S>;
    Poly A = Poly::from_letter(a, false);
    Poly As = Poly::from_letter(a, true);
    if (i == 1 && j == 1) {
        Poly p = (A * As).pow(k);
        return p - Poly::constant(f.evaluate(p));
    }
    if (i == 1 && j == 2) return A * (As * A).pow(k - 1);
    if (i == 2 && j == 1) return As * (A * As).pow(k - 1);
    Poly p = (As * A).pow(k);
    return p - Poly::constant(f.evaluate(p));
}

inline std::string w_label(int i, int j, int k) {
    return "w[" + std::to_string(i) + std::to_string(j) + ";" + std::to_string(k) + "]";
}

} // namespace detail

/// Sweeps all alternating centered words built from a: products
/// w_{i0bar i1;k1}(a) ... w_{i_{n-1}bar i_n;k_n}(a) with n <= n_max and
/// k_m <= k_max.  They all vanish exactly iff a is R-diagonal.
template <class S>
ViolationReport check_alternating_vanishing(const TraceFunctional<S>& f, GenId a,
                                            int n_max, int k_max) {
    using T = scalar_traits<S>;
    using Poly = Polynomial<S>;
    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = n_max;

    std::vector<std::vector<Poly>> blocks(4, std::vector<Poly>(k_max + 1));
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= k_max; ++k)
                blocks[(i - 1) * 2 + (j - 1)][k] = detail::w_block(f, a, i, j, k);
    auto block_at = [&](int i, int j, int k) -> const Poly& {
        return blocks[(i - 1) * 2 + (j - 1)][k];
    };

    std::vector<int> is, ks;
    std::function<void(int, const Poly&, std::string)> extend =
        [&](int n, const Poly& prod, std::string label) {
            if (n >= 1) {
                S v = f.evaluate(prod);
                rep.record(T::abs(v), [&] { return label; });
            }
            if (n == n_max) return;
            int prev_i = is.back();
            for (int next = 1; next <= 2; ++next)
                for (int k = 1; k <= k_max; ++k) {
                    int bi = 3 - prev_i; // bar of the previous second index
                    const Poly& w = block_at(bi, next, k);
                    is.push_back(next);
                    extend(n + 1, n == 0 ? w : prod * w,
                           label.empty() ? detail::w_label(bi, next, k)
                                         : label + " " + detail::w_label(bi, next, k));
                    is.pop_back();
                }
        };
    for (int i0 = 1; i0 <= 2; ++i0) {
        is = {i0};
        extend(0, Poly::one(), "");
    }
    return rep;
}

/// Centered slot for freeness sweeps: an element of one of the two algebras
/// with its expectation already subtracted.
template <class S>
struct CenteredSlot {
    PolyMatrix<S> element;
    int degree = 1;
    std::string label;
};

/// Alternating products of centered elements across two families must vanish
/// when the families are free.  Slots alternate between the two lists; total
/// degree is bounded.  Works for scalars via 1x1 matrices.
template <class S>
ViolationReport check_matrix_freeness(const TraceFunctional<S>& f,
                                      const std::vector<CenteredSlot<S>>& groupA,
                                      const std::vector<CenteredSlot<S>>& groupB,
                                      int max_degree, int max_slots = 16) {
    using T = scalar_traits<S>;
    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = max_degree;

    std::function<void(const PolyMatrix<S>&, int, int, bool, const std::string&)> extend =
        [&](const PolyMatrix<S>& prod, int deg, int slots, bool next_is_a,
            const std::string& label) {
            if (slots >= 2) {
                S v = phi_d(f, prod);
                rep.record(T::abs(v), [&] { return label; });
            }
            if (slots >= max_slots) return;
            const auto& group = next_is_a ? groupA : groupB;
            for (const auto& slot : group) {
                if (deg + slot.degree > max_degree) continue;
                PolyMatrix<S> next = slots == 0 ? slot.element : prod * slot.element;
                extend(next, deg + slot.degree, slots + 1, !next_is_a,
                       label.empty() ? slot.label : label + " " + slot.label);
            }
        };
    extend(PolyMatrix<S>(), 0, 0, true, "");
    extend(PolyMatrix<S>(), 0, 0, false, "");
    return rep;
}

/// Centered powers x^k - phi_d(x^k) I for k = 1..max_degree.
template <class S>
std::vector<CenteredSlot<S>> centered_powers(const TraceFunctional<S>& f,
                                             const PolyMatrix<S>& x, int max_degree,
                                             const std::string& name) {
    std::vector<CenteredSlot<S>> out;
    PolyMatrix<S> p = PolyMatrix<S>::identity(x.d);
    for (int k = 1; k <= max_degree; ++k) {
        p = p * x;
        PolyMatrix<S> centered =
            p - PolyMatrix<S>::identity(x.d).scaled(phi_d(f, p));
        out.push_back({centered, k, name + "^" + std::to_string(k)});
    }
    return out;
}

/// Centered words over an alphabet of matrices (for non-selfadjoint families).
template <class S>
std::vector<CenteredSlot<S>> centered_words(
    const TraceFunctional<S>& f,
    const std::vector<std::pair<PolyMatrix<S>, std::string>>& alphabet,
    int max_len) {
    std::vector<CenteredSlot<S>> out;
    std::function<void(const PolyMatrix<S>&, int, const std::string&)> go =
        [&](const PolyMatrix<S>& w, int len, const std::string& label) {
            if (len > 0) {
                PolyMatrix<S> centered =
                    w - PolyMatrix<S>::identity(w.d).scaled(phi_d(f, w));
                out.push_back({centered, len, label});
            }
            if (len == max_len) return;
            for (const auto& [m, name] : alphabet)
                go(len == 0 ? m : w * m, len + 1,
                   label.empty() ? name : label + " " + name);
        };
    go(PolyMatrix<S>(), 0, "");
    return out;
}

/// Scalar-level freeness check between two groups of generators: alternating
/// centered monomials across the groups, total degree bounded.
template <class S>
ViolationReport check_freeness(const TraceFunctional<S>& f,
                               const std::vector<Letter>& groupA,
                               const std::vector<Letter>& groupB, int max_degree) {
    auto lift = [&](const std::vector<Letter>& ls) {
        std::vector<std::pair<PolyMatrix<S>, std::string>> alphabet;
        for (Letter l : ls) {
            PolyMatrix<S> m(1);
            m.at(0, 0) = Polynomial<S>::from_word(Word::single(l.gen, l.star));
            alphabet.push_back({m, f.name(l.gen) + (l.star ? "*" : "")});
        }
        return alphabet;
    };
    auto slotsA = centered_words(f, lift(groupA), max_degree);
    auto slotsB = centered_words(f, lift(groupB), max_degree);
    return check_matrix_freeness(f, slotsA, slotsB, max_degree);
}

/// The block-diagonal amalgamation condition: E_D of alternating W-products
/// framed by scalar units vanishes iff a is R-diagonal.  W_{ij;k} carries
/// w_{ij;k}(a) in its (i,j) slot.
template <class S>
ViolationReport check_amalgamated_freeness_D(const TraceFunctional<S>& f, GenId a,
                                             int n_max, int k_max) {
    using T = scalar_traits<S>;
    using PM = PolyMatrix<S>;
    ViolationReport rep;
    rep.exact_mode = T::exact;
    rep.degree = n_max;

    auto W = [&](int i, int j, int k) {
        PM m(2);
        m.at(i - 1, j - 1) = detail::w_block(f, a, i, j, k);
        return m;
    };
    std::vector<std::pair<PM, std::string>> frames = {
        {PM::identity(2), "I"},
        {PM::unit(2, 0, 1), "V12"},
        {PM::unit(2, 1, 0), "V21"}};

    std::function<void(int, int, const PM&, const std::string&)> extend =
        [&](int n, int prev_i, const PM& prod, const std::string& label) {
            if (n >= 1) {
                for (const auto& [fl, fname] : frames)
                    for (const auto& [fr, gname] : frames) {
                        PM full = (fl * prod) * fr;
                        PM e = expect_diagonal(f, full);
                        double v = std::max(T::abs(f.evaluate(e.at(0, 0))),
                                            T::abs(f.evaluate(e.at(1, 1))));
                        rep.record(v, [&] {
                            return fname + " " + label + " " + gname;
                        });
                    }
            }
            if (n == n_max) return;
            for (int next = 1; next <= 2; ++next)
                for (int k = 1; k <= k_max; ++k) {
                    int bi = 3 - prev_i;
                    PM w = W(bi, next, k);
                    PM joined;
                    if (n == 0)
                        joined = w;
                    else
                        joined = prod * PM::unit(2, prev_i - 1, bi - 1) * w;
                    extend(n + 1, next, joined,
                           label.empty()
                               ? detail::w_label(bi, next, k)
                               : label + " " + detail::w_label(bi, next, k));
                }
        };
    for (int i0 = 1; i0 <= 2; ++i0) extend(0, i0, PM(), "");
    return rep;
}

} // namespace freeprob
