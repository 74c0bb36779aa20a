#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "freeprob/errors.hpp"
#include "freeprob/polynomial.hpp"
#include "freeprob/scalar.hpp"
#include "freeprob/word.hpp"

namespace freeprob {

enum class SourceKind { Measure, Haar, WordTable, MatrixUnits };

enum class PolarSide { Left, Right }; // u*p vs p*u realization

/// Tracial *-moment functional on words over free generators.  Each source is
/// a freely independent chunk; evaluation merges adjacent same-source letters,
/// centers syllables and uses the vanishing of alternating centered products
/// across sources.  Exact when the scalar type is exact.
template <class S>
class TraceFunctional {
    using T = scalar_traits<S>;

public:
    S evaluate(const Word& w) const {
        if (static_cast<int>(w.size()) > degree_bound_)
            throw resource_error("word length " + std::to_string(w.size()) +
                                 " exceeds degree bound " +
                                 std::to_string(degree_bound_));
        std::vector<Letter> flat = expand(w);
        Canon c = canonicalize(flat);
        if (c.zero) return T::zero();
        return eval_canon(c.syls);
    }

    S evaluate(const Polynomial<S>& p) const {
        S acc = T::zero();
        for (const auto& [w, coeff] : p.terms()) acc += coeff * evaluate(w);
        return acc;
    }

    GenId id(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw input_error("unknown generator '" + name + "'");
        return it->second;
    }
    const std::string& name(GenId g) const { return gens_.at(g).name; }
    bool has(const std::string& n) const { return by_name_.count(n) > 0; }
    int degree_bound() const { return degree_bound_; }

    /// Freeness tag: generators with the same tag live in one source chunk.
    int freeness_tag(GenId g) const { return gens_.at(g).tag; }

    Word parse_word(const std::string& text) const {
        Word w;
        std::stringstream ss(text);
        std::string tok;
        while (ss >> tok) {
            if (tok == "1") continue;
            bool star = false;
            if (tok.size() > 1 && tok.back() == '*') {
                star = true;
                tok.pop_back();
            }
            w.append(Letter{id(tok), star});
        }
        return w;
    }

    std::string to_string(const Word& w) const {
        if (w.empty()) return "1";
        std::string s;
        for (std::size_t i = 0; i < w.size(); ++i) {
            Letter l = w.letter(i);
            if (i) s += ' ';
            s += name(l.gen);
            if (l.star) s += '*';
        }
        return s;
    }

    /// Evaluate a word whose letters all carry one freeness tag, seen as a
    /// moment of that source alone (used by the cumulant evaluation path).
    S source_moment(const Word& w) const { return evaluate(w); }

private:
    struct GenInfo {
        std::string name;
        int source = -1; // concrete source index, -1 for aliases
        int tag = 0;     // freeness tag
        bool selfadjoint = false;
        std::vector<Letter> expand_plain, expand_star; // alias expansion
    };

    struct SourceData {
        SourceKind kind = SourceKind::Measure;
        std::vector<S> moments;  // Measure: m_0..m_K
        std::map<Word, S> table; // WordTable, keyed on global-id words
        int unit_dim = 0;        // MatrixUnits
        GenId first_gen = 0;     // MatrixUnits: id of v_{1,1}
    };

    struct Syl {
        int source;
        std::vector<Letter> letters;
    };

    struct Canon {
        bool zero = false;
        std::vector<Syl> syls;
    };

    std::vector<Letter> expand(const Word& w) const {
        std::vector<Letter> out;
        out.reserve(2 * w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            Letter l = w.letter(i);
            if (l.gen >= gens_.size()) throw input_error("unknown generator id");
            const GenInfo& gi = gens_[l.gen];
            if (gi.source >= 0) {
                out.push_back(l);
            } else {
                const auto& exp = l.star ? gi.expand_star : gi.expand_plain;
                out.insert(out.end(), exp.begin(), exp.end());
            }
        }
        return out;
    }

    // Local normal form of one syllable; empty result means the syllable is
    // the unit, zero=true kills the whole word.
    bool canonicalize_local(Syl& s, bool& zero) const {
        const SourceData& src = sources_[s.source];
        switch (src.kind) {
            case SourceKind::Measure: {
                GenId g = s.letters.front().gen;
                std::size_t k = s.letters.size();
                s.letters.assign(k, Letter{g, false});
                return true;
            }
            case SourceKind::Haar: {
                GenId g = s.letters.front().gen;
                long net = 0;
                for (const Letter& l : s.letters) net += l.star ? -1 : 1;
                if (net == 0) {
                    s.letters.clear();
                    return true;
                }
                s.letters.assign(static_cast<std::size_t>(std::abs(net)),
                                 Letter{g, net < 0});
                return true;
            }
            case SourceKind::MatrixUnits: {
                int d = src.unit_dim;
                auto decode = [&](Letter l) {
                    int q = static_cast<int>(l.gen - src.first_gen);
                    int i = q / d, j = q % d;
                    if (l.star) std::swap(i, j);
                    return std::pair<int, int>{i, j};
                };
                auto [ci, cj] = decode(s.letters.front());
                for (std::size_t k = 1; k < s.letters.size(); ++k) {
                    auto [ni, nj] = decode(s.letters[k]);
                    if (cj != ni) {
                        zero = true;
                        return true;
                    }
                    cj = nj;
                }
                s.letters.assign(
                    1, Letter{src.first_gen + static_cast<GenId>(ci * d + cj), false});
                return true;
            }
            case SourceKind::WordTable:
                return true;
        }
        return true;
    }

    Canon canonicalize(const std::vector<Letter>& flat) const {
        Canon c;
        for (const Letter& l : flat) {
            Syl s{gens_[l.gen].source, {l}};
            // push with merging
            for (;;) {
                if (!c.syls.empty() && c.syls.back().source == s.source) {
                    s.letters.insert(s.letters.begin(), c.syls.back().letters.begin(),
                                     c.syls.back().letters.end());
                    c.syls.pop_back();
                    continue;
                }
                break;
            }
            canonicalize_local(s, c.zero);
            if (c.zero) return c;
            if (!s.letters.empty()) c.syls.push_back(std::move(s));
        }
        return c;
    }

    S local_phi(const Syl& s) const {
        const SourceData& src = sources_[s.source];
        switch (src.kind) {
            case SourceKind::Measure: {
                std::size_t k = s.letters.size();
                if (k >= src.moments.size())
                    throw resource_error(
                        "moment order " + std::to_string(k) +
                        " beyond precomputed table; raise the degree bound");
                return src.moments[k];
            }
            case SourceKind::Haar:
                return T::zero(); // canonical syllable has nonzero net power
            case SourceKind::MatrixUnits: {
                int d = src.unit_dim;
                int q = static_cast<int>(s.letters.front().gen - src.first_gen);
                return (q / d == q % d) ? T::div_int(T::one(), d) : T::zero();
            }
            case SourceKind::WordTable: {
                Word w(s.letters);
                auto it = src.table.find(w);
                return it == src.table.end() ? T::zero() : it->second;
            }
        }
        return T::zero();
    }

    static Word key_of(const std::vector<Syl>& syls) {
        Word w;
        for (const Syl& s : syls)
            for (const Letter& l : s.letters) w.append(l);
        return w;
    }

    S eval_canon(const std::vector<Syl>& syls) const {
        if (syls.empty()) return T::one();
        if (syls.size() == 1) return local_phi(syls.front());

        Word key = key_of(syls);
        {
            std::lock_guard<std::mutex> lock(cache_->mu);
            auto it = cache_->map.find(key);
            if (it != cache_->map.end()) return it->second;
        }

        std::size_t m = syls.size();
        std::vector<S> mean(m);
        std::vector<int> nz;
        for (std::size_t j = 0; j < m; ++j) {
            mean[j] = local_phi(syls[j]);
            if (!T::is_zero(mean[j])) nz.push_back(static_cast<int>(j));
        }
        if (nz.size() > 24)
            throw resource_error("centering recursion: too many nonzero-mean syllables");

        // phi(w) = sum over nonempty removal sets R of (-1)^{|R|+1} prod(means) phi(w \ R)
        S total = T::zero();
        std::size_t z = nz.size();
        for (std::size_t mask = 1; mask < (1ull << z); ++mask) {
            S coeff = T::one();
            std::vector<bool> removed(m, false);
            int bits = 0;
            for (std::size_t b = 0; b < z; ++b)
                if (mask & (1ull << b)) {
                    removed[nz[b]] = true;
                    coeff *= mean[nz[b]];
                    ++bits;
                }
            std::vector<Letter> rest;
            for (std::size_t j = 0; j < m; ++j)
                if (!removed[j])
                    rest.insert(rest.end(), syls[j].letters.begin(),
                                syls[j].letters.end());
            Canon c = canonicalize(rest);
            S sub = c.zero ? T::zero() : eval_canon(c.syls);
            S term = coeff * sub;
            if (bits % 2 == 1)
                total += term;
            else
                total -= term;
        }

        {
            std::lock_guard<std::mutex> lock(cache_->mu);
            cache_->map.emplace(std::move(key), total);
        }
        return total;
    }

    std::vector<GenInfo> gens_;
    std::vector<SourceData> sources_;
    std::map<std::string, GenId> by_name_;
    int degree_bound_ = 12;

    struct CacheBox {
        std::unordered_map<Word, S, WordHash> map;
        std::mutex mu;
    };
    mutable std::shared_ptr<CacheBox> cache_ = std::make_shared<CacheBox>();

    template <class>
    friend class FunctionalBuilder;
};

/// Assembles the free product of sources.  Tags are distinct per added source,
/// so everything added separately is mutually free.
template <class S>
class FunctionalBuilder {
    using T = scalar_traits<S>;
    using TF = TraceFunctional<S>;

public:
    explicit FunctionalBuilder(int degree_bound = 12) {
        f_.degree_bound_ = degree_bound;
    }

    /// Selfadjoint generator with the given moment table m_0..m_K.
    GenId add_selfadjoint(const std::string& name, std::vector<S> moments) {
        int src = new_source();
        auto& sd = f_.sources_[src];
        sd.kind = SourceKind::Measure;
        sd.moments = std::move(moments);
        if (sd.moments.empty() || !(sd.moments[0] == T::one()))
            throw input_error("moment table must start with m_0 = 1");
        return new_gen(name, src, src, true);
    }

    GenId add_haar_unitary(const std::string& name) {
        int src = new_source();
        f_.sources_[src].kind = SourceKind::Haar;
        return new_gen(name, src, src, false);
    }

    /// R-diagonal generator with prescribed distribution of a*a.  Realized as
    /// u p (or p u) with hidden Haar u and even p, p^2 distributed by the
    /// given moments; the letter 'a' is an alias expanded during evaluation.
    GenId add_rdiagonal(const std::string& name, const std::vector<S>& nu_moments,
                        PolarSide side = PolarSide::Left) {
        GenId u = add_haar_unitary(name + ".u");
        std::vector<S> pm(2 * nu_moments.size() - 1, T::zero());
        for (std::size_t k = 0; k < nu_moments.size(); ++k) pm[2 * k] = nu_moments[k];
        GenId p = add_selfadjoint(name + ".p", std::move(pm));
        int tag = f_.gens_[u].source; // u and p form one freeness chunk
        f_.gens_[u].tag = tag;
        f_.gens_[p].tag = tag;
        GenId a = new_gen(name, -1, tag, false);
        auto& gi = f_.gens_[a];
        if (side == PolarSide::Left) {
            gi.expand_plain = {Letter{u, false}, Letter{p, false}};
            gi.expand_star = {Letter{p, false}, Letter{u, true}};
        } else {
            gi.expand_plain = {Letter{p, false}, Letter{u, false}};
            gi.expand_star = {Letter{u, true}, Letter{p, false}};
        }
        return a;
    }

    /// Circular generator of the given variance (R-diagonal with quarter
    /// circular a*a law: moments v^k Catalan(k)).
    GenId add_circular(const std::string& name, const S& variance, int max_k = 16) {
        std::vector<S> nu(max_k + 1);
        S vk = T::one();
        for (int k = 0; k <= max_k; ++k) {
            nu[k] = vk * T::from_int(catalan_long(k));
            vk *= variance;
        }
        return add_rdiagonal(name, nu);
    }

    /// Matrix-unit family v_{ij}, 1-based names "<prefix>11".."<prefix>dd".
    std::vector<GenId> add_matrix_units(const std::string& prefix, int d) {
        int src = new_source();
        auto& sd = f_.sources_[src];
        sd.kind = SourceKind::MatrixUnits;
        sd.unit_dim = d;
        std::vector<GenId> ids;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                GenId g = new_gen(prefix + std::to_string(i + 1) + std::to_string(j + 1),
                                  src, src, i == j);
                ids.push_back(g);
            }
        sd.first_gen = ids.front();
        return ids;
    }

    std::vector<GenId> add_word_table(const std::vector<std::string>& names) {
        int src = new_source();
        f_.sources_[src].kind = SourceKind::WordTable;
        std::vector<GenId> ids;
        for (const auto& n : names) ids.push_back(new_gen(n, src, src, false));
        pending_table_src_ = src;
        return ids;
    }
    void set_table_value(const Word& w, const S& v) {
        if (pending_table_src_ < 0) throw input_error("no word-table source pending");
        f_.sources_[pending_table_src_].table[w] = v;
    }

    TF build() { return std::move(f_); }

private:
    static long catalan_long(int n) {
        long c = 1;
        for (int k = 1; k <= n; ++k) c = c * 2 * (2 * k - 1) / (k + 1);
        return c;
    }
    int new_source() {
        f_.sources_.emplace_back();
        return static_cast<int>(f_.sources_.size()) - 1;
    }
    GenId new_gen(const std::string& name, int src, int tag, bool sa) {
        if (f_.by_name_.count(name))
            throw input_error("duplicate generator name '" + name + "'");
        typename TF::GenInfo gi;
        gi.name = name;
        gi.source = src;
        gi.tag = tag;
        gi.selfadjoint = sa;
        f_.gens_.push_back(std::move(gi));
        GenId id = static_cast<GenId>(f_.gens_.size()) - 1;
        f_.by_name_[name] = id;
        return id;
    }

    TF f_;
    int pending_table_src_ = -1;
};

} // namespace freeprob
