#include "freeprob/ncpartitions.hpp"

#include <mutex>

namespace freeprob {

namespace {

using Blocks = std::vector<std::vector<int>>;

// First-block placement: the block through the first element is chosen as a
// subset; elements falling between two consecutive block members must then be
// partitioned inside their own gap, which is what makes the result
// non-crossing by construction.
std::vector<Blocks> enumerate_list(const std::vector<int>& elems) {
    if (elems.empty()) return {Blocks{}};
    std::vector<Blocks> out;
    int n = static_cast<int>(elems.size()) - 1; // candidates after the first
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> block{elems[0]};
        for (int b = 0; b < n; ++b)
            if (mask & (1u << b)) block.push_back(elems[b + 1]);
        // gap i holds the elements strictly between block[i] and block[i+1];
        // the last gap holds everything after block.back()
        std::vector<std::vector<int>> gaps(block.size());
        std::size_t g = 0;
        for (int e : elems) {
            while (g + 1 < block.size() && e >= block[g + 1]) ++g;
            if (e == block[g]) continue;
            gaps[g].push_back(e);
        }
        std::vector<std::vector<Blocks>> sub(gaps.size());
        for (std::size_t i = 0; i < gaps.size(); ++i) sub[i] = enumerate_list(gaps[i]);
        // cartesian product over gaps
        std::vector<std::size_t> idx(gaps.size(), 0);
        for (;;) {
            Blocks part{block};
            for (std::size_t i = 0; i < gaps.size(); ++i)
                for (const auto& b : sub[i][idx[i]]) part.push_back(b);
            out.push_back(std::move(part));
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == sub[i].size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
    }
    return out;
}

} // namespace

bool is_noncrossing(const std::vector<std::vector<int>>& blocks) {
    for (std::size_t a = 0; a < blocks.size(); ++a)
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (a == b) continue;
            for (int i : blocks[a])
                for (int k : blocks[a])
                    for (int j : blocks[b])
                        for (int l : blocks[b])
                            if (i < j && j < k && k < l) return false;
        }
    return true;
}

const std::vector<NonCrossingPartition>& enumerate_nc(int n) {
    if (n < 0 || n > 14) throw resource_error("enumerate_nc: n out of range (max 14)");
    static std::map<int, std::vector<NonCrossingPartition>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<int> elems(n);
    for (int i = 0; i < n; ++i) elems[i] = i;
    std::vector<NonCrossingPartition> out;
    for (auto& bl : enumerate_list(elems)) {
        NonCrossingPartition p;
        p.blocks = std::move(bl);
        out.push_back(std::move(p));
    }
    return cache.emplace(n, std::move(out)).first->second;
}

} // namespace freeprob
