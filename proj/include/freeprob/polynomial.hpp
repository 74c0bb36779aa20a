#pragma once

#include <map>
#include <utility>

#include "freeprob/scalar.hpp"
#include "freeprob/word.hpp"

namespace freeprob {

/// Formal finite linear combination of words with scalar coefficients.
/// Zero coefficients are never stored; the map keeps terms in a fixed order
/// so results are reproducible.
template <class S>
class Polynomial {
    using T = scalar_traits<S>;

public:
    using TermMap = std::map<Word, S>;

    Polynomial() = default;

    static Polynomial zero() { return Polynomial(); }
    static Polynomial one() { return from_word(Word{}); }
    static Polynomial constant(const S& c) { return from_word(Word{}, c); }
    static Polynomial from_word(const Word& w, const S& c = T::one()) {
        Polynomial p;
        if (!T::is_zero(c)) p.terms_[w] = c;
        return p;
    }
    static Polynomial from_letter(GenId g, bool star = false) {
        return from_word(Word::single(g, star));
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    int degree() const {
        int d = 0;
        for (const auto& [w, c] : terms_) d = std::max<int>(d, static_cast<int>(w.size()));
        return d;
    }

    void add_term(const Word& w, const S& c) {
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            if (!T::is_zero(c)) terms_.emplace(w, c);
        } else {
            it->second += c;
            if (T::is_zero(it->second)) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [w, c] : o.terms_) add_term(w, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [w, c] : o.terms_) add_term(w, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r;
        for (const auto& [w, c] : a.terms_) r.terms_.emplace(w, -c);
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [wa, ca] : a.terms_)
            for (const auto& [wb, cb] : b.terms_) r.add_term(wa * wb, ca * cb);
        return r;
    }

    Polynomial scaled(const S& c) const {
        Polynomial r;
        if (T::is_zero(c)) return r;
        for (const auto& [w, k] : terms_) r.terms_.emplace(w, k * c);
        return r;
    }

    Polynomial adjoint() const {
        Polynomial r;
        for (const auto& [w, c] : terms_) r.terms_.emplace(w.adjoint(), T::conj(c));
        return r;
    }

    Polynomial pow(int k) const {
        Polynomial r = one();
        for (int i = 0; i < k; ++i) r = r * (*this);
        return r;
    }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

private:
    TermMap terms_;
};

} // namespace freeprob
