#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace freeprob {

using Rational = mpq_class;

/// Rational with canonical form; mpq_class(p, q) alone does not reduce.
inline Rational ratio(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

/// Complex number with exact rational real and imaginary parts.  Used as the
/// scalar field of the symbolic engine when every source has rational moments,
/// so that vanishing identities come out as exact zeros.
struct Exact {
    Rational re, im;

    Exact() : re(0), im(0) {}
    Exact(long v) : re(v), im(0) {} // NOLINT(google-explicit-constructor)
    Exact(Rational r) : re(std::move(r)), im(0) {} // NOLINT
    Exact(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    Exact& operator+=(const Exact& o) { re += o.re; im += o.im; return *this; }
    Exact& operator-=(const Exact& o) { re -= o.re; im -= o.im; return *this; }
    Exact& operator*=(const Exact& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Exact& operator/=(const Exact& o) {
        Rational d = o.re * o.re + o.im * o.im;
        Rational r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }
    friend Exact operator+(Exact a, const Exact& b) { return a += b; }
    friend Exact operator-(Exact a, const Exact& b) { return a -= b; }
    friend Exact operator*(Exact a, const Exact& b) { return a *= b; }
    friend Exact operator/(Exact a, const Exact& b) { return a /= b; }
    friend Exact operator-(Exact a) { a.re = -a.re; a.im = -a.im; return a; }
    friend bool operator==(const Exact& a, const Exact& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const Exact& a, const Exact& b) { return !(a == b); }
};

/// Uniform view of the two scalar modes (exact complex rational / complex double).
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Exact> {
    static constexpr bool exact = true;
    static Exact zero() { return Exact(); }
    static Exact one() { return Exact(1); }
    static Exact from_int(long v) { return Exact(v); }
    static Exact from_ratio(long p, long q) { return Exact(ratio(p, q)); }
    static Exact from_double(double v) { return Exact(Rational(v)); }
    static Exact imaginary_unit() { return Exact(Rational(0), Rational(1)); }
    static Exact conj(const Exact& s) { return Exact(s.re, -s.im); }
    static bool is_zero(const Exact& s) { return sgn(s.re) == 0 && sgn(s.im) == 0; }
    static std::complex<double> to_complex(const Exact& s) {
        return {s.re.get_d(), s.im.get_d()};
    }
    static double abs(const Exact& s) { return std::abs(to_complex(s)); }
    static Exact div_int(const Exact& s, long d) {
        return Exact(s.re / d, s.im / d);
    }
};

template <>
struct scalar_traits<std::complex<double>> {
    using C = std::complex<double>;
    static constexpr bool exact = false;
    static C zero() { return {0.0, 0.0}; }
    static C one() { return {1.0, 0.0}; }
    static C from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static C from_ratio(long p, long q) {
        return {static_cast<double>(p) / static_cast<double>(q), 0.0};
    }
    static C from_double(double v) { return {v, 0.0}; }
    static C imaginary_unit() { return {0.0, 1.0}; }
    static C conj(const C& s) { return std::conj(s); }
    static bool is_zero(const C& s) { return s.real() == 0.0 && s.imag() == 0.0; }
    static std::complex<double> to_complex(const C& s) { return s; }
    static double abs(const C& s) { return std::abs(s); }
    static C div_int(const C& s, long d) { return s / static_cast<double>(d); }
};

} // namespace freeprob
