#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <vector>

namespace freeprob {

using GenId = std::uint32_t;

/// One letter of a word: a generator, possibly starred.
struct Letter {
    GenId gen = 0;
    bool star = false;

    std::uint32_t code() const { return (gen << 1) | (star ? 1u : 0u); }
    static Letter from_code(std::uint32_t c) {
        return Letter{c >> 1, (c & 1u) != 0};
    }
    Letter adjoint() const { return Letter{gen, !star}; }
    friend bool operator==(const Letter&, const Letter&) = default;
};

/// A word in starred generators.  The empty word is the unit.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> ls) {
        code_.reserve(ls.size());
        for (const Letter& l : ls) code_.push_back(l.code());
    }

    static Word single(GenId g, bool star = false) {
        Word w;
        w.code_.push_back(Letter{g, star}.code());
        return w;
    }

    std::size_t size() const { return code_.size(); }
    bool empty() const { return code_.empty(); }
    Letter letter(std::size_t i) const { return Letter::from_code(code_[i]); }

    void append(Letter l) { code_.push_back(l.code()); }
    void append(const Word& w) {
        code_.insert(code_.end(), w.code_.begin(), w.code_.end());
    }

    Word adjoint() const {
        Word w;
        w.code_.reserve(code_.size());
        for (auto it = code_.rbegin(); it != code_.rend(); ++it)
            w.code_.push_back(Letter::from_code(*it).adjoint().code());
        return w;
    }

    friend Word operator*(const Word& a, const Word& b) {
        Word w = a;
        w.append(b);
        return w;
    }

    Word pow(int k) const {
        Word w;
        for (int i = 0; i < k; ++i) w.append(*this);
        return w;
    }

    std::vector<Letter> letters() const {
        std::vector<Letter> ls;
        ls.reserve(code_.size());
        for (auto c : code_) ls.push_back(Letter::from_code(c));
        return ls;
    }

    auto operator<=>(const Word& o) const {
        return std::lexicographical_compare_three_way(
            code_.begin(), code_.end(), o.code_.begin(), o.code_.end());
    }
    bool operator==(const Word& o) const { return code_ == o.code_; }

    std::size_t hash() const {
        std::size_t h = 1469598103934665603ull;
        for (auto c : code_) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    std::vector<std::uint32_t> code_;
};

struct WordHash {
    std::size_t operator()(const Word& w) const { return w.hash(); }
};

} // namespace freeprob
