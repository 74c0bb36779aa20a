#include "freeprob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "freeprob/errors.hpp"
#include "freeprob/quadrature.hpp"

namespace freeprob {

namespace {

constexpr double kMassTol = 1e-10;
constexpr double kMomentTol = 1e-11;

Rational rational_pow(const Rational& base, int k) {
    Rational r(1);
    for (int i = 0; i < k; ++i) r *= base;
    return r;
}

Rational rational_binom(unsigned long n, unsigned long k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

Rational rational_catalan(int n) {
    return rational_binom(2 * static_cast<unsigned long>(n), n) / (n + 1);
}

// Cubic spline through (t_i, y_i) with end slopes estimated from the four
// nearest points (keeps O(h^4) accuracy at the boundaries, unlike the natural
// spline).  Pieces evaluate only inside their interval.
struct Spline {
    std::vector<double> t, y, m; // m: second derivatives

    static double lagrange_deriv4(const double* x, const double* f, double at) {
        double d = 0.0;
        for (int i = 0; i < 4; ++i) {
            double num = 0.0;
            for (int j = 0; j < 4; ++j) {
                if (j == i) continue;
                double prod = 1.0;
                for (int k = 0; k < 4; ++k) {
                    if (k == i || k == j) continue;
                    prod *= at - x[k];
                }
                num += prod;
            }
            double den = 1.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) den *= x[i] - x[j];
            d += f[i] * num / den;
        }
        return d;
    }

    static Spline build(std::vector<double> t, std::vector<double> y) {
        Spline s;
        s.t = std::move(t);
        s.y = std::move(y);
        std::size_t n = s.t.size();
        s.m.assign(n, 0.0);
        if (n < 4) return s;
        double d0 = lagrange_deriv4(s.t.data(), s.y.data(), s.t.front());
        double dn = lagrange_deriv4(s.t.data() + n - 4, s.y.data() + n - 4,
                                    s.t.back());
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        {
            double h0 = s.t[1] - s.t[0];
            b[0] = h0 / 3.0;
            c[0] = h0 / 6.0;
            d[0] = (s.y[1] - s.y[0]) / h0 - d0;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double h0 = s.t[i] - s.t[i - 1], h1 = s.t[i + 1] - s.t[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (s.y[i + 1] - s.y[i]) / h1 - (s.y[i] - s.y[i - 1]) / h0;
        }
        {
            double h = s.t[n - 1] - s.t[n - 2];
            a[n - 1] = h / 6.0;
            b[n - 1] = h / 3.0;
            d[n - 1] = dn - (s.y[n - 1] - s.y[n - 2]) / h;
        }
        for (std::size_t i = 1; i < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        s.m[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i >= 1; --i)
            s.m[i - 1] = (d[i - 1] - c[i - 1] * s.m[i]) / b[i - 1];
        return s;
    }

    double operator()(double x) const {
        std::size_t n = t.size();
        if (n == 1) return y[0];
        auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t i = std::min<std::size_t>(
            n - 2, it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1);
        double h = t[i + 1] - t[i];
        double u = (x - t[i]) / h;
        double v = 1.0 - u;
        return v * y[i] + u * y[i + 1] +
               h * h / 6.0 *
                   ((v * v * v - v) * m[i] + (u * u * u - u) * m[i + 1]);
    }
};

bool piece_has_exact_moments(const CompactMeasure::Piece& p) {
    using PK = CompactMeasure::PieceKind;
    switch (p.kind) {
        case PK::Semicircle:
        case PK::QuarterCircle:
        case PK::Uniform:
        case PK::Poly:
            return true;
        default:
            return false;
    }
}

Rational exact_piece_moment(const CompactMeasure::Piece& p, int k) {
    using PK = CompactMeasure::PieceKind;
    Rational w(p.weight);
    switch (p.kind) {
        case PK::Semicircle: {
            // params: {r, center}; m_{2j} of the centered law is C_j (r^2/4)^j
            Rational r2q = Rational(p.params[0]) * Rational(p.params[0]) / 4;
            Rational c(p.params[1]);
            Rational s(0);
            for (int j = 0; j <= k; j += 2) {
                Rational base = rational_catalan(j / 2) * rational_pow(r2q, j / 2);
                s += rational_binom(k, j) * rational_pow(c, k - j) * base;
            }
            return w * s;
        }
        case PK::QuarterCircle: {
            Rational a4 = Rational(p.params[0]) / 4;
            return w * rational_catalan(k) * rational_pow(a4, k);
        }
        case PK::Uniform: {
            Rational a(p.lo), b(p.hi);
            Rational s(0);
            for (int i = 0; i <= k; ++i)
                s += rational_pow(a, i) * rational_pow(b, k - i);
            return w * s / (k + 1);
        }
        case PK::Poly: {
            // density is literally sum c_i t^i on [lo,hi]; weight not reapplied
            Rational a(p.lo), b(p.hi);
            Rational s(0);
            for (std::size_t i = 0; i < p.params.size(); ++i) {
                int e = k + static_cast<int>(i) + 1;
                s += Rational(p.params[i]) * (rational_pow(b, e) - rational_pow(a, e)) / e;
            }
            return s;
        }
        default:
            throw input_error("piece has no exact moments");
    }
}

} // namespace

long catalan_number(int n) {
    if (n < 0 || n > 33) throw resource_error("catalan_number: n out of range");
    long c = 1;
    for (int k = 1; k <= n; ++k) c = c * 2 * (2 * k - 1) / (k + 1);
    return c;
}

CompactMeasure::CompactMeasure(std::vector<Atom> atoms, std::vector<Piece> pieces,
                               double radius)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)), radius_(radius) {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });
    validate();
    bool exact_ok = true;
    for (const Piece& p : pieces_)
        if (!piece_has_exact_moments(p)) exact_ok = false;
    if (exact_ok) {
        auto atoms = atoms_;
        auto pieces = pieces_;
        exact_ = [atoms, pieces](int k) {
            Rational s(0);
            for (const Atom& a : atoms)
                s += Rational(a.mass) * rational_pow(Rational(a.x), k);
            for (const Piece& p : pieces) s += exact_piece_moment(p, k);
            return s;
        };
    }
}

void CompactMeasure::validate() const {
    double r = radius_ + 1e-9;
    for (const Atom& a : atoms_) {
        if (a.mass <= 0.0) throw input_error("atom with nonpositive mass");
        if (std::abs(a.x) > r) throw input_error("atom outside declared support radius");
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        if (!(p.lo < p.hi)) throw input_error("density piece with empty interval");
        if (p.lo < -r || p.hi > r)
            throw input_error("density piece outside declared support radius");
        if (i + 1 < pieces_.size() && pieces_[i + 1].lo < p.hi - 1e-12)
            throw input_error("density pieces overlap");
        // nonnegativity spot check on the interior
        for (int j = 1; j <= 16; ++j) {
            double t = p.lo + (p.hi - p.lo) * j / 17.0;
            if (p.rho(t) < -1e-12) throw input_error("negative density");
        }
    }
    double mass = total_mass();
    if (std::abs(mass - 1.0) > kMassTol * 100 + kMassTol) {
        // allow small quadrature slack on top of the declared tolerance
        if (std::abs(mass - 1.0) > 1e-8)
            throw input_error("total mass " + std::to_string(mass) + " != 1");
    }
}

double CompactMeasure::piece_mass(std::size_t i) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->masses.empty()) cache_->masses.assign(pieces_.size(), -1.0);
    if (cache_->masses[i] < 0.0) {
        const Piece& p = pieces_[i];
        cache_->masses[i] = quad::integrate_or_throw(p.rho, p.lo, p.hi, p.exp_lo,
                                                     p.exp_hi, 1e-13, "piece mass");
    }
    return cache_->masses[i];
}

double CompactMeasure::total_mass() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass;
    for (std::size_t i = 0; i < pieces_.size(); ++i) s += piece_mass(i);
    return s;
}

double CompactMeasure::moment(int k) const {
    if (k < 0) throw input_error("negative moment order");
    if (k == 0) return 1.0;
    if (symmetric_ && k % 2 == 1) return 0.0;
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        if (static_cast<int>(cache_->moments.size()) > k &&
            !std::isnan(cache_->moments[k]))
            return cache_->moments[k];
    }
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass * std::pow(a.x, k);
    for (const Piece& p : pieces_) {
        auto f = [&p, k](double t) { return std::pow(t, k) * p.rho(t); };
        s += quad::integrate_or_throw(f, p.lo, p.hi, p.exp_lo, p.exp_hi, kMomentTol,
                                      "moment");
    }
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        if (static_cast<int>(cache_->moments.size()) <= k)
            cache_->moments.resize(k + 1, std::nan(""));
        cache_->moments[k] = s;
    }
    return s;
}

bool CompactMeasure::nonnegative_support() const {
    for (const Atom& a : atoms_)
        if (a.x < -1e-12) return false;
    for (const Piece& p : pieces_)
        if (p.lo < -1e-12) return false;
    return true;
}

std::optional<Rational> CompactMeasure::exact_moment(int k) const {
    if (!exact_) return std::nullopt;
    if (symmetric_ && k % 2 == 1) return Rational(0);
    return exact_(k);
}

// --- cdf / quantile -------------------------------------------------------

double CompactMeasure::piece_partial_mass(std::size_t i, double t) const {
    const Piece& p = pieces_[i];
    if (t <= p.lo) return 0.0;
    if (t >= p.hi) return piece_mass(i);
    constexpr int kGrid = 256;
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        if (cache_->cums.empty()) cache_->cums.resize(pieces_.size());
        if (cache_->cums[i].empty()) {
            std::vector<double> cum(kGrid + 1, 0.0);
            double h = (p.hi - p.lo) / kGrid;
            for (int j = 0; j < kGrid; ++j) {
                double a = p.lo + j * h, b = p.lo + (j + 1) * h;
                double el = (j == 0) ? p.exp_lo : 0.0;
                double eh = (j == kGrid - 1) ? p.exp_hi : 0.0;
                cum[j + 1] =
                    cum[j] + quad::integrate_singular(p.rho, a, b, el, eh, 1e-13).value;
            }
            cache_->cums[i] = std::move(cum);
        }
    }
    const std::vector<double>& cum = cache_->cums[i];
    double h = (p.hi - p.lo) / kGrid;
    int j = std::min<int>(kGrid - 1, static_cast<int>((t - p.lo) / h));
    double a = p.lo + j * h;
    double el = (j == 0) ? p.exp_lo : 0.0;
    return cum[j] + quad::integrate_singular(p.rho, a, t, el, 0.0, 1e-13).value;
}

double CompactMeasure::cdf(double t) const {
    double s = 0.0;
    for (const Atom& a : atoms_)
        if (a.x <= t) s += a.mass;
    for (std::size_t i = 0; i < pieces_.size(); ++i) s += piece_partial_mass(i, t);
    return s;
}

double CompactMeasure::quantile(double q) const {
    if (q < 0.0 || q > 1.0) throw input_error("quantile level outside [0,1]");
    double lo = -radius_ - 1.0, hi = radius_ + 1.0;
    if (q <= 0.0) {
        // smallest support point
        double m = hi;
        for (const Atom& a : atoms_) m = std::min(m, a.x);
        for (const Piece& p : pieces_) m = std::min(m, p.lo);
        return m;
    }
    for (int it = 0; it < 100 && hi - lo > 1e-14 * (radius_ + 1.0); ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= q)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// --- named measures ---------------------------------------------------------

CompactMeasure CompactMeasure::semicircle(double r, double center) {
    if (r <= 0.0) throw input_error("semicircle radius must be positive");
    Piece p;
    p.lo = center - r;
    p.hi = center + r;
    p.kind = PieceKind::Semicircle;
    p.params = {r, center};
    p.exp_lo = p.exp_hi = 0.5;
    p.rho = [r, center](double t) {
        double u = r * r - (t - center) * (t - center);
        return u <= 0.0 ? 0.0 : 2.0 / (M_PI * r * r) * std::sqrt(u);
    };
    CompactMeasure m({}, {p}, std::abs(center) + r);
    m.symmetric_ = (center == 0.0);
    return m;
}

CompactMeasure CompactMeasure::quartercircle(double alpha) {
    if (alpha <= 0.0) throw input_error("quartercircle parameter must be positive");
    Piece p;
    p.lo = 0.0;
    p.hi = alpha;
    p.kind = PieceKind::QuarterCircle;
    p.params = {alpha};
    p.exp_lo = -0.5;
    p.exp_hi = 0.5;
    p.rho = [alpha](double t) {
        if (t <= 0.0 || t >= alpha) return 0.0;
        return 2.0 / (alpha * M_PI) * std::sqrt((alpha - t) / t);
    };
    return CompactMeasure({}, {p}, alpha);
}

CompactMeasure CompactMeasure::uniform(double a, double b) {
    if (!(a < b)) throw input_error("uniform needs a < b");
    Piece p;
    p.lo = a;
    p.hi = b;
    p.kind = PieceKind::Uniform;
    double h = 1.0 / (b - a);
    p.rho = [h](double) { return h; };
    CompactMeasure m({}, {p}, std::max(std::abs(a), std::abs(b)));
    m.symmetric_ = (a == -b);
    return m;
}

CompactMeasure CompactMeasure::point_mass(double c) {
    CompactMeasure m({Atom{c, 1.0}}, {}, std::abs(c));
    m.symmetric_ = (c == 0.0);
    return m;
}

CompactMeasure CompactMeasure::beta_like(double a, double b, double p, double q) {
    if (!(a < b)) throw input_error("beta_like needs a < b");
    auto raw = [a, b, p, q](double t) {
        double u = t - a, v = b - t;
        if (u <= 0.0 || v <= 0.0) return 0.0;
        return std::pow(u, p) * std::pow(v, q);
    };
    double z = quad::integrate_or_throw(raw, a, b, p, q, 1e-13, "beta normalization");
    Piece pc;
    pc.lo = a;
    pc.hi = b;
    pc.kind = PieceKind::Derived;
    pc.params = {a, b, p, q};
    pc.exp_lo = p;
    pc.exp_hi = q;
    pc.rho = [raw, z](double t) { return raw(t) / z; };
    return CompactMeasure({}, {pc}, std::max(std::abs(a), std::abs(b)));
}

// --- constructions ----------------------------------------------------------

CompactMeasure CompactMeasure::symmetric_square_root() const {
    for (const Atom& a : atoms_)
        if (a.x < -1e-12) throw input_error("symmetric_square_root: negative support");
    for (const Piece& p : pieces_)
        if (p.lo < -1e-12) throw input_error("symmetric_square_root: negative support");

    // recognized closed forms keep their named kind
    if (atoms_.empty() && pieces_.size() == 1 &&
        pieces_[0].kind == PieceKind::QuarterCircle && pieces_[0].weight == 1.0) {
        CompactMeasure m = semicircle(std::sqrt(pieces_[0].params[0]));
        if (exact_) {
            auto parent = exact_;
            m.exact_ = [parent](int k) {
                return k % 2 == 1 ? Rational(0) : parent(k / 2);
            };
        }
        return m;
    }

    std::vector<Atom> atoms;
    std::vector<Piece> pieces;
    for (const Atom& a : atoms_) {
        if (a.x <= 1e-300)
            atoms.push_back(Atom{0.0, a.mass});
        else {
            double s = std::sqrt(a.x);
            atoms.push_back(Atom{s, a.mass / 2});
            atoms.push_back(Atom{-s, a.mass / 2});
        }
    }
    for (const Piece& p : pieces_) {
        double lo = std::max(0.0, p.lo);
        double slo = std::sqrt(lo), shi = std::sqrt(p.hi);
        auto parent = p.rho;
        auto rho = [parent](double t) { return std::abs(t) * parent(t * t); };
        double inner_exp = 0.0;
        if (lo == 0.0) {
            double e = 2.0 * p.exp_lo + 1.0;
            inner_exp = (e >= 1.0 && e == std::floor(e)) ? 0.0 : e;
        }
        Piece plus;
        plus.lo = slo;
        plus.hi = shi;
        plus.rho = rho;
        plus.exp_lo = inner_exp;
        plus.exp_hi = p.exp_hi;
        plus.kind = PieceKind::Derived;
        Piece minus;
        minus.lo = -shi;
        minus.hi = -slo;
        minus.rho = rho;
        minus.exp_lo = p.exp_hi;
        minus.exp_hi = inner_exp;
        minus.kind = PieceKind::Derived;
        pieces.push_back(minus);
        pieces.push_back(plus);
    }
    CompactMeasure m(std::move(atoms), std::move(pieces), std::sqrt(radius_));
    m.symmetric_ = true;
    if (exact_) {
        auto parent = exact_;
        m.exact_ = [parent](int k) {
            return k % 2 == 1 ? Rational(0) : parent(k / 2);
        };
    }
    return m;
}

CompactMeasure CompactMeasure::push_square() const {
    if (atoms_.empty() && pieces_.size() == 1 &&
        pieces_[0].kind == PieceKind::Semicircle && pieces_[0].params[1] == 0.0 &&
        pieces_[0].weight == 1.0) {
        double r = pieces_[0].params[0];
        CompactMeasure m = quartercircle(r * r);
        if (exact_) {
            auto parent = exact_;
            m.exact_ = [parent](int k) { return parent(2 * k); };
        }
        return m;
    }

    std::vector<Atom> atoms;
    for (const Atom& a : atoms_) {
        double s = a.x * a.x;
        bool merged = false;
        for (Atom& e : atoms)
            if (std::abs(e.x - s) < 1e-14 * (1.0 + s)) {
                e.mass += a.mass;
                merged = true;
                break;
            }
        if (!merged) atoms.push_back(Atom{s, a.mass});
    }

    // split pieces at 0, collect branch intervals on the positive axis
    struct Branch {
        double lo, hi; // positive-axis interval (of |t|)
        std::function<double(double)> rho;
        bool negative;  // branch comes from the mirror side
        double exp_in;  // exponent at lo end of |t| interval
        double exp_out; // exponent at hi end
    };
    std::vector<Branch> branches;
    std::vector<double> breaks{0.0};
    for (const Piece& p : pieces_) {
        auto add = [&](double lo, double hi, bool neg, double ei, double eo) {
            if (hi - lo < 1e-300) return;
            branches.push_back(Branch{lo, hi, p.rho, neg, ei, eo});
            breaks.push_back(lo * lo);
            breaks.push_back(hi * hi);
        };
        if (p.hi <= 0.0)
            add(-p.hi, -p.lo, true, p.exp_hi, p.exp_lo);
        else if (p.lo >= 0.0)
            add(p.lo, p.hi, false, p.exp_lo, p.exp_hi);
        else {
            add(0.0, -p.lo, true, 0.0, p.exp_lo);
            add(0.0, p.hi, false, 0.0, p.exp_hi);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) {
                                 return std::abs(a - b) < 1e-13 * (1.0 + b);
                             }),
                 breaks.end());

    std::vector<Piece> pieces;
    for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
        double s0 = breaks[c], s1 = breaks[c + 1];
        double tmid = std::sqrt(0.5 * (s0 + s1));
        std::vector<Branch> active;
        for (const Branch& br : branches)
            if (br.lo <= tmid + 1e-12 && tmid <= br.hi + 1e-12) active.push_back(br);
        if (active.empty()) continue;
        Piece p;
        p.lo = s0;
        p.hi = s1;
        p.kind = PieceKind::Derived;
        p.rho = [active](double s) {
            if (s <= 0.0) return 0.0;
            double t = std::sqrt(s);
            double v = 0.0;
            for (const Branch& br : active) v += br.rho(br.negative ? -t : t);
            return v / (2.0 * t);
        };
        double e0 = 0.0, e1 = 0.0;
        for (const Branch& br : active) {
            double t0 = std::sqrt(s0), t1 = std::sqrt(s1);
            if (s0 == 0.0) {
                double a = (std::abs(br.lo) < 1e-12) ? br.exp_in : 0.0;
                e0 = std::min(e0, (a - 1.0) / 2.0);
            } else if (std::abs(br.lo - t0) < 1e-10 * (1.0 + t0)) {
                e0 = std::min(e0, br.exp_in);
            }
            if (std::abs(br.hi - t1) < 1e-10 * (1.0 + t1)) e1 = std::min(e1, br.exp_out);
        }
        p.exp_lo = e0;
        p.exp_hi = e1;
        pieces.push_back(p);
    }

    CompactMeasure m(std::move(atoms), std::move(pieces), radius_ * radius_);
    if (exact_) {
        auto parent = exact_;
        m.exact_ = [parent](int k) { return parent(2 * k); };
    }
    return m;
}

CompactMeasure CompactMeasure::dilate(double lambda) const {
    if (!(lambda > 0.0)) throw input_error("dilate needs lambda > 0");
    std::vector<Atom> atoms;
    for (const Atom& a : atoms_) atoms.push_back(Atom{lambda * a.x, a.mass});
    std::vector<Piece> pieces;
    for (const Piece& p : pieces_) {
        Piece q = p;
        q.lo = lambda * p.lo;
        q.hi = lambda * p.hi;
        switch (p.kind) {
            case PieceKind::Semicircle:
                q.params = {lambda * p.params[0], lambda * p.params[1]};
                q.rho = [r = q.params[0], c = q.params[1], w = p.weight](double t) {
                    double u = r * r - (t - c) * (t - c);
                    return u <= 0.0 ? 0.0 : w * 2.0 / (M_PI * r * r) * std::sqrt(u);
                };
                break;
            case PieceKind::QuarterCircle:
                q.params = {lambda * p.params[0]};
                q.rho = [al = q.params[0], w = p.weight](double t) {
                    if (t <= 0.0 || t >= al) return 0.0;
                    return w * 2.0 / (al * M_PI) * std::sqrt((al - t) / t);
                };
                break;
            case PieceKind::Uniform:
                q.rho = [h = p.weight / (q.hi - q.lo)](double) { return h; };
                break;
            case PieceKind::Poly: {
                std::vector<double> cs(p.params.size());
                double s = 1.0 / lambda;
                double f = s;
                for (std::size_t i = 0; i < p.params.size(); ++i) {
                    cs[i] = p.params[i] * f;
                    f *= s;
                }
                q.params = cs;
                q.rho = [cs](double t) {
                    double v = 0.0, tp = 1.0;
                    for (double c : cs) {
                        v += c * tp;
                        tp *= t;
                    }
                    return v;
                };
                break;
            }
            case PieceKind::Table: {
                std::vector<double> ts(p.table_t);
                std::vector<double> ys(p.table_rho);
                for (double& t : ts) t *= lambda;
                for (double& y : ys) y /= lambda;
                q.table_t = ts;
                q.table_rho = ys;
                auto sp = std::make_shared<Spline>(Spline::build(ts, ys));
                q.rho = [sp](double t) { return std::max(0.0, (*sp)(t)); };
                break;
            }
            case PieceKind::Derived: {
                auto parent = p.rho;
                q.rho = [parent, lambda](double t) {
                    return parent(t / lambda) / lambda;
                };
                break;
            }
        }
        pieces.push_back(q);
    }
    CompactMeasure m(std::move(atoms), std::move(pieces), lambda * radius_);
    m.symmetric_ = symmetric_;
    if (exact_) {
        auto parent = exact_;
        Rational lq(lambda);
        m.exact_ = [parent, lq](int k) -> Rational {
            return rational_pow(lq, k) * parent(k);
        };
    }
    return m;
}

// --- JSON -------------------------------------------------------------------

namespace {

CompactMeasure::Piece piece_from_json(const nlohmann::json& j) {
    using PK = CompactMeasure::PieceKind;
    CompactMeasure::Piece p;
    p.lo = j.at("lo").get<double>();
    p.hi = j.at("hi").get<double>();
    p.weight = j.value("weight", 1.0);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "semicircle") {
        double r = j.value("r", (p.hi - p.lo) / 2.0);
        double c = j.value("center", 0.5 * (p.lo + p.hi));
        p.kind = PK::Semicircle;
        p.params = {r, c};
        p.exp_lo = p.exp_hi = 0.5;
        double w = p.weight;
        p.rho = [r, c, w](double t) {
            double u = r * r - (t - c) * (t - c);
            return u <= 0.0 ? 0.0 : w * 2.0 / (M_PI * r * r) * std::sqrt(u);
        };
    } else if (kind == "quartercircle") {
        double al = j.value("alpha", p.hi);
        p.kind = PK::QuarterCircle;
        p.params = {al};
        p.exp_lo = -0.5;
        p.exp_hi = 0.5;
        double w = p.weight;
        p.rho = [al, w](double t) {
            if (t <= 0.0 || t >= al) return 0.0;
            return w * 2.0 / (al * M_PI) * std::sqrt((al - t) / t);
        };
    } else if (kind == "uniform") {
        p.kind = PK::Uniform;
        double h = p.weight / (p.hi - p.lo);
        p.rho = [h](double) { return h; };
    } else if (kind == "poly") {
        p.kind = PK::Poly;
        std::vector<double> cs = j.at("coeffs").get<std::vector<double>>();
        p.params = cs;
        p.rho = [cs](double t) {
            double v = 0.0, tp = 1.0;
            for (double c : cs) {
                v += c * tp;
                tp *= t;
            }
            return v;
        };
    } else if (kind == "table") {
        p.kind = PK::Table;
        p.table_t = j.at("t").get<std::vector<double>>();
        p.table_rho = j.at("rho").get<std::vector<double>>();
        if (p.table_t.size() != p.table_rho.size() || p.table_t.size() < 2)
            throw input_error("table piece needs matching t/rho arrays");
        if (!std::is_sorted(p.table_t.begin(), p.table_t.end()))
            throw input_error("table piece needs monotone t");
        p.exp_lo = j.value("sing_lo", 0.0);
        p.exp_hi = j.value("sing_hi", 0.0);
        auto sp = std::make_shared<Spline>(Spline::build(p.table_t, p.table_rho));
        p.rho = [sp](double t) { return std::max(0.0, (*sp)(t)); };
    } else {
        throw input_error("unknown piece kind '" + kind + "'");
    }
    return p;
}

nlohmann::json piece_to_json(const CompactMeasure::Piece& p) {
    using PK = CompactMeasure::PieceKind;
    nlohmann::json j;
    j["lo"] = p.lo;
    j["hi"] = p.hi;
    if (p.weight != 1.0) j["weight"] = p.weight;
    switch (p.kind) {
        case PK::Semicircle:
            j["kind"] = "semicircle";
            j["r"] = p.params[0];
            j["center"] = p.params[1];
            break;
        case PK::QuarterCircle:
            j["kind"] = "quartercircle";
            j["alpha"] = p.params[0];
            break;
        case PK::Uniform:
            j["kind"] = "uniform";
            break;
        case PK::Poly:
            j["kind"] = "poly";
            j["coeffs"] = p.params;
            break;
        case PK::Table:
            j["kind"] = "table";
            j["t"] = p.table_t;
            j["rho"] = p.table_rho;
            if (p.exp_lo != 0.0) j["sing_lo"] = p.exp_lo;
            if (p.exp_hi != 0.0) j["sing_hi"] = p.exp_hi;
            break;
        case PK::Derived: {
            // sample to a table; exact closed form is not serializable
            j["kind"] = "table";
            int n = 257;
            std::vector<double> ts(n), ys(n);
            for (int i = 0; i < n; ++i) {
                double u = (i + 0.5) / n;
                ts[i] = p.lo + (p.hi - p.lo) * u;
                ys[i] = p.rho(ts[i]);
            }
            j["t"] = ts;
            j["rho"] = ys;
            if (p.exp_lo != 0.0) j["sing_lo"] = p.exp_lo;
            if (p.exp_hi != 0.0) j["sing_hi"] = p.exp_hi;
            j["sampled"] = true;
            break;
        }
    }
    return j;
}

} // namespace

CompactMeasure CompactMeasure::from_json(const nlohmann::json& j) {
    std::vector<Atom> atoms;
    if (j.contains("atoms"))
        for (const auto& a : j.at("atoms"))
            atoms.push_back(Atom{a.at(0).get<double>(), a.at(1).get<double>()});
    std::vector<Piece> pieces;
    if (j.contains("pieces"))
        for (const auto& pj : j.at("pieces")) pieces.push_back(piece_from_json(pj));
    double radius = 0.0;
    if (j.contains("radius"))
        radius = j.at("radius").get<double>();
    else {
        for (const Atom& a : atoms) radius = std::max(radius, std::abs(a.x));
        for (const Piece& p : pieces)
            radius = std::max({radius, std::abs(p.lo), std::abs(p.hi)});
    }
    CompactMeasure m(std::move(atoms), std::move(pieces), radius);
    if (j.value("symmetric", false)) m.symmetric_ = true;
    return m;
}

nlohmann::json CompactMeasure::to_json() const {
    nlohmann::json j;
    j["radius"] = radius_;
    j["atoms"] = nlohmann::json::array();
    for (const Atom& a : atoms_) j["atoms"].push_back({a.x, a.mass});
    j["pieces"] = nlohmann::json::array();
    for (const Piece& p : pieces_) j["pieces"].push_back(piece_to_json(p));
    if (symmetric_) j["symmetric"] = true;
    return j;
}

CompactMeasure CompactMeasure::parse_spec(const std::string& spec) {
    auto open = spec.find('(');
    if (open != std::string::npos && spec.back() == ')') {
        std::string name = spec.substr(0, open);
        std::string args = spec.substr(open + 1, spec.size() - open - 2);
        std::vector<double> v;
        std::stringstream ss(args);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) v.push_back(std::stod(tok));
        auto need = [&](std::size_t n) {
            if (v.size() != n)
                throw input_error("measure spec '" + spec + "': wrong argument count");
        };
        if (name == "semicircle") {
            if (v.size() == 1) return semicircle(v[0]);
            need(2);
            return semicircle(v[0], v[1]);
        }
        if (name == "quartercircle") {
            need(1);
            return quartercircle(v[0]);
        }
        if (name == "uniform") {
            need(2);
            return uniform(v[0], v[1]);
        }
        if (name == "pointmass") {
            need(1);
            return point_mass(v[0]);
        }
        if (name == "beta") {
            need(4);
            return beta_like(v[0], v[1], v[2], v[3]);
        }
        throw input_error("unknown measure name '" + name + "'");
    }
    std::ifstream in(spec);
    if (!in) throw input_error("cannot open measure file '" + spec + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("malformed measure file '" + spec + "': " + e.what());
    }
    return from_json(j);
}

// --- engine bridge ----------------------------------------------------------

template <class S>
std::vector<S> measure_moments(const CompactMeasure& mu, int K) {
    std::vector<S> out(K + 1);
    if constexpr (scalar_traits<S>::exact) {
        if (!mu.has_exact_moments())
            throw input_error(
                "exact mode requires a measure with exact moments (named kinds only)");
        for (int k = 0; k <= K; ++k) out[k] = Exact(*mu.exact_moment(k));
    } else {
        for (int k = 0; k <= K; ++k) out[k] = S(mu.moment(k), 0.0);
    }
    return out;
}

template std::vector<Exact> measure_moments<Exact>(const CompactMeasure&, int);
template std::vector<std::complex<double>>
measure_moments<std::complex<double>>(const CompactMeasure&, int);

} // namespace freeprob
