#pragma once

#include <vector>

#include "freeprob/errors.hpp"
#include "freeprob/functional.hpp"
#include "freeprob/polynomial.hpp"

namespace freeprob {

/// d x d matrix with NCPoly entries.  Together with a trace functional this
/// models the matrix amplification: phi_d = normalized trace of entrywise phi.
template <class S>
struct PolyMatrix {
    using Poly = Polynomial<S>;
    using T = scalar_traits<S>;

    int d = 0;
    std::vector<Poly> ent; // row-major

    PolyMatrix() = default;
    explicit PolyMatrix(int dim) : d(dim), ent(dim * dim) {}

    Poly& at(int i, int j) { return ent[i * d + j]; }
    const Poly& at(int i, int j) const { return ent[i * d + j]; }

    static PolyMatrix identity(int dim) {
        PolyMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = Poly::one();
        return m;
    }

    /// Matrix unit V_{ij} (1-based indices in formulas, 0-based here).
    static PolyMatrix unit(int dim, int i, int j, const S& c = T::one()) {
        PolyMatrix m(dim);
        m.at(i, j) = Poly::constant(c);
        return m;
    }

    bool is_zero() const {
        for (const Poly& p : ent)
            if (!p.is_zero()) return false;
        return true;
    }

    friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
        PolyMatrix r(a.d);
        for (std::size_t k = 0; k < a.ent.size(); ++k) r.ent[k] = a.ent[k] + b.ent[k];
        return r;
    }
    friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
        PolyMatrix r(a.d);
        for (std::size_t k = 0; k < a.ent.size(); ++k) r.ent[k] = a.ent[k] - b.ent[k];
        return r;
    }
    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
        if (a.d != b.d) throw input_error("matrix dimension mismatch");
        PolyMatrix r(a.d);
        for (int i = 0; i < a.d; ++i)
            for (int k = 0; k < a.d; ++k) {
                const Poly& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < a.d; ++j) {
                    if (b.at(k, j).is_zero()) continue;
                    r.at(i, j) += aik * b.at(k, j);
                }
            }
        return r;
    }

    PolyMatrix scaled(const S& c) const {
        PolyMatrix r(d);
        for (std::size_t k = 0; k < ent.size(); ++k) r.ent[k] = ent[k].scaled(c);
        return r;
    }

    PolyMatrix adjoint() const {
        PolyMatrix r(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r.at(i, j) = at(j, i).adjoint();
        return r;
    }

    PolyMatrix pow(int k) const {
        PolyMatrix r = identity(d);
        for (int i = 0; i < k; ++i) r = r * (*this);
        return r;
    }
};

/// phi_d(X) = (1/d) sum phi(x_ii).
template <class S>
S phi_d(const TraceFunctional<S>& f, const PolyMatrix<S>& X) {
    using T = scalar_traits<S>;
    S acc = T::zero();
    for (int i = 0; i < X.d; ++i) acc += f.evaluate(X.at(i, i));
    return T::div_int(acc, X.d);
}

/// Entrywise expectation onto scalar matrices.
template <class S>
PolyMatrix<S> expect_entrywise(const TraceFunctional<S>& f, const PolyMatrix<S>& X) {
    PolyMatrix<S> r(X.d);
    for (int i = 0; i < X.d; ++i)
        for (int j = 0; j < X.d; ++j)
            r.at(i, j) = Polynomial<S>::constant(f.evaluate(X.at(i, j)));
    return r;
}

/// Diagonal expectation: keeps only diagonal expectations.
template <class S>
PolyMatrix<S> expect_diagonal(const TraceFunctional<S>& f, const PolyMatrix<S>& X) {
    PolyMatrix<S> r(X.d);
    for (int i = 0; i < X.d; ++i)
        r.at(i, i) = Polynomial<S>::constant(f.evaluate(X.at(i, i)));
    return r;
}

namespace detail {
template <class S>
S constant_of(const Polynomial<S>& p) {
    using T = scalar_traits<S>;
    if (p.is_zero()) return T::zero();
    if (p.term_count() != 1 || !p.terms().begin()->first.empty())
        throw input_error("expected a scalar matrix entry");
    return p.terms().begin()->second;
}
} // namespace detail

/// The 2x2 flip (x11 x12; x21 x22) -> (x22 0; 0 x11) on scalar matrices.
template <class S>
PolyMatrix<S> eta_flip(const PolyMatrix<S>& X) {
    if (X.d != 2) throw input_error("eta is defined on 2x2 scalar matrices");
    PolyMatrix<S> r(2);
    r.at(0, 0) = Polynomial<S>::constant(detail::constant_of(X.at(1, 1)));
    r.at(1, 1) = Polynomial<S>::constant(detail::constant_of(X.at(0, 0)));
    detail::constant_of(X.at(0, 1)); // must be scalar entries
    detail::constant_of(X.at(1, 0));
    return r;
}

/// The diagonal swap on 2x2 scalar diagonal matrices.
template <class S>
PolyMatrix<S> eta0_flip(const PolyMatrix<S>& X) {
    if (X.d != 2) throw input_error("eta0 is defined on 2x2 diagonal matrices");
    if (!X.at(0, 1).is_zero() || !X.at(1, 0).is_zero())
        throw input_error("eta0 needs a diagonal matrix");
    PolyMatrix<S> r(2);
    r.at(0, 0) = Polynomial<S>::constant(detail::constant_of(X.at(1, 1)));
    r.at(1, 1) = Polynomial<S>::constant(detail::constant_of(X.at(0, 0)));
    return r;
}

/// The selfadjoint block matrix (0 a; a* 0) of a generator.
template <class S>
PolyMatrix<S> block_embed(GenId a) {
    PolyMatrix<S> m(2);
    m.at(0, 1) = Polynomial<S>::from_letter(a, false);
    m.at(1, 0) = Polynomial<S>::from_letter(a, true);
    return m;
}

/// phi_d(X* X), the squared L2 norm in the matrix picture.
template <class S>
S matrix_norm_sq(const TraceFunctional<S>& f, const PolyMatrix<S>& X) {
    return phi_d(f, X.adjoint() * X);
}

} // namespace freeprob
