#pragma once

#include <functional>
#include <map>
#include <vector>

#include "freeprob/errors.hpp"
#include "freeprob/functional.hpp"
#include "freeprob/word.hpp"

namespace freeprob {

/// Set partition of {0..n-1} into non-crossing blocks, each sorted ascending.
struct NonCrossingPartition {
    std::vector<std::vector<int>> blocks;
};

/// Exhaustive, duplicate-free enumeration; length equals Catalan(n).
/// Results are cached per n.  Guarded at n <= 14.
const std::vector<NonCrossingPartition>& enumerate_nc(int n);

/// Crossing test on an arbitrary block list (oracle-grade, O(n^4)).
bool is_noncrossing(const std::vector<std::vector<int>>& blocks);

/// m_n = sum over NC(n) of products of kappa_{|block|}; input kappa_1..kappa_K.
template <class T>
std::vector<T> moments_from_cumulants(const std::vector<T>& kappa) {
    int K = static_cast<int>(kappa.size());
    std::vector<T> m(K);
    for (int n = 1; n <= K; ++n) {
        T acc = T(0);
        for (const auto& pi : enumerate_nc(n)) {
            T prod = T(1);
            for (const auto& b : pi.blocks) prod = prod * kappa[b.size() - 1];
            acc = acc + prod;
        }
        m[n - 1] = acc;
    }
    return m;
}

/// Triangular inversion of the transform above; round trip is the identity.
template <class T>
std::vector<T> cumulants_from_moments(const std::vector<T>& m) {
    int K = static_cast<int>(m.size());
    std::vector<T> kappa(K);
    for (int n = 1; n <= K; ++n) {
        T acc = m[n - 1];
        for (const auto& pi : enumerate_nc(n)) {
            if (pi.blocks.size() == 1) continue; // skip the full block
            T prod = T(1);
            for (const auto& b : pi.blocks) prod = prod * kappa[b.size() - 1];
            acc = acc - prod;
        }
        kappa[n - 1] = acc;
    }
    return kappa;
}

/// Second evaluation path for phi(word): sum over non-crossing partitions,
/// blocks weighted by per-source word cumulants, mixed-tag blocks zero.
template <class S>
S word_cumulant_evaluate(const TraceFunctional<S>& f, const Word& w,
                         int bound = 12) {
    using T = scalar_traits<S>;
    int n = static_cast<int>(w.size());
    if (n > bound)
        throw resource_error("word_cumulant_evaluate: word length exceeds bound");
    if (n == 0) return T::one();

    std::vector<Letter> ls = w.letters();
    std::vector<int> tag(n);
    for (int i = 0; i < n; ++i) tag[i] = f.freeness_tag(ls[i].gen);

    // kappa[subword] for single-source subwords, by Moebius-style recursion
    std::map<Word, S> kmemo;
    std::function<S(const std::vector<int>&)> kappa = [&](const std::vector<int>& pos) -> S {
        Word sub;
        for (int p : pos) sub.append(ls[p]);
        auto it = kmemo.find(sub);
        if (it != kmemo.end()) return it->second;
        int k = static_cast<int>(pos.size());
        S acc = f.source_moment(sub);
        for (const auto& pi : enumerate_nc(k)) {
            if (pi.blocks.size() == 1) continue;
            S prod = T::one();
            for (const auto& b : pi.blocks) {
                std::vector<int> bp;
                bp.reserve(b.size());
                for (int i : b) bp.push_back(pos[i]);
                prod *= kappa(bp);
                if (T::is_zero(prod)) break;
            }
            acc -= prod;
        }
        kmemo.emplace(std::move(sub), acc);
        return acc;
    };

    S total = T::zero();
    for (const auto& pi : enumerate_nc(n)) {
        S prod = T::one();
        for (const auto& b : pi.blocks) {
            bool mixed = false;
            for (int i : b)
                if (tag[i] != tag[b[0]]) mixed = true;
            if (mixed) {
                prod = T::zero();
                break;
            }
            prod *= kappa(b);
            if (T::is_zero(prod)) break;
        }
        total += prod;
    }
    return total;
}

} // namespace freeprob
