#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "freeprob/scalar.hpp"

#include "json.hpp"

namespace freeprob {

/// A compactly supported probability measure on the line: finitely many atoms
/// plus piecewise-smooth density pieces.  Values are immutable after
/// construction; derived measures are new values.
class CompactMeasure {
public:
    struct Atom {
        double x = 0.0;
        double mass = 0.0;
    };

    enum class PieceKind { Semicircle, QuarterCircle, Uniform, Poly, Table, Derived };

    struct Piece {
        double lo = 0.0, hi = 0.0;
        std::function<double(double)> rho;
        // density ~ (t-lo)^exp_lo near lo and (hi-t)^exp_hi near hi
        double exp_lo = 0.0, exp_hi = 0.0;
        PieceKind kind = PieceKind::Derived;
        double weight = 1.0;               // total mass carried by the piece
        std::vector<double> params;        // kind-specific metadata
        std::vector<double> table_t, table_rho;
    };

    CompactMeasure(std::vector<Atom> atoms, std::vector<Piece> pieces,
                   double radius);

    // --- named measures -------------------------------------------------
    static CompactMeasure semicircle(double r, double center = 0.0);
    static CompactMeasure quartercircle(double alpha);
    static CompactMeasure uniform(double a, double b);
    static CompactMeasure point_mass(double c);
    /// density proportional to (t-a)^p (b-t)^q on [a,b], p,q in {0, 1/2};
    /// normalized numerically.
    static CompactMeasure beta_like(double a, double b, double p, double q);

    // --- serialization ---------------------------------------------------
    static CompactMeasure from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Accepts "semicircle(2)", "uniform(0,1)", "pointmass(1)",
    /// "quartercircle(4)" or a path to a JSON file.
    static CompactMeasure parse_spec(const std::string& spec);

    // --- queries ----------------------------------------------------------
    double moment(int k) const;                       // quadrature, cached
    std::optional<Rational> exact_moment(int k) const;
    bool nonnegative_support() const;
    bool has_exact_moments() const { return static_cast<bool>(exact_); }
    bool symmetric() const { return symmetric_; }
    bool has_atoms() const { return !atoms_.empty(); }
    double radius() const { return radius_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    double cdf(double t) const;
    double quantile(double q) const;
    double total_mass() const;

    // --- constructions ----------------------------------------------------
    CompactMeasure symmetric_square_root() const; // requires support in [0,inf)
    CompactMeasure push_square() const;
    CompactMeasure dilate(double lambda) const;

private:
    void validate() const;
    void mark_symmetric();
    double piece_mass(std::size_t i) const;
    double piece_partial_mass(std::size_t i, double t) const;

    std::vector<Atom> atoms_;
    std::vector<Piece> pieces_;
    double radius_ = 0.0;
    bool symmetric_ = false;
    std::function<Rational(int)> exact_;

    struct Cache {
        std::mutex mu;
        std::vector<double> moments;
        std::vector<double> masses;            // per piece
        std::vector<std::vector<double>> cums; // per piece prefix masses on a grid
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

    friend class MeasureBuilderAccess;
};

/// m_0..m_K as engine scalars; exact when the measure has exact moments and S
/// is the exact scalar type, structural zeros for odd moments of symmetric
/// measures in float mode.
template <class S>
std::vector<S> measure_moments(const CompactMeasure& mu, int K);

long catalan_number(int n);

} // namespace freeprob
