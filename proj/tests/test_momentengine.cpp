#include <complex>
#include <random>

#include "doctest.h"

#include <Eigen/Dense>

#include "freeprob/checks.hpp"
#include "freeprob/functional.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/ncpartitions.hpp"
#include "freeprob/polymatrix.hpp"

using namespace freeprob;
using Cplx = std::complex<double>;

namespace {

TraceFunctional<Exact> semicircular_plus_haar(int bound = 24) {
    FunctionalBuilder<Exact> b(bound);
    b.add_selfadjoint("s", measure_moments<Exact>(CompactMeasure::semicircle(2.0), 40));
    b.add_haar_unitary("u");
    return b.build();
}

Exact q(long p, long r = 1) { return Exact(ratio(p, r)); }

} // namespace

TEST_CASE("haar unitary moments") {
    auto f = semicircular_plus_haar();
    CHECK(f.evaluate(f.parse_word("u u u")) == q(0));
    CHECK(f.evaluate(f.parse_word("u u*")) == q(1));
    CHECK(f.evaluate(f.parse_word("u* u")) == q(1));
    CHECK(f.evaluate(f.parse_word("u u u* u u* u*")) == q(1));
    CHECK(f.evaluate(f.parse_word("u* u u")) == q(0));
}

TEST_CASE("semicircular moments are Catalan") {
    auto f = semicircular_plus_haar();
    CHECK(f.evaluate(f.parse_word("s s")) == q(1));
    CHECK(f.evaluate(f.parse_word("s s s s")) == q(2));
    CHECK(f.evaluate(f.parse_word("s s s s s s")) == q(5));
    CHECK(f.evaluate(f.parse_word("s")) == q(0));
}

TEST_CASE("free conditioning over a Haar conjugation") {
    // phi(x u y u*) = phi(x) phi(y) for {u} free from {x, y}
    auto f = semicircular_plus_haar();
    CHECK(f.evaluate(f.parse_word("s u s u*")) == q(0));
    CHECK(f.evaluate(f.parse_word("s s u s s u*")) == q(1));
    CHECK(f.evaluate(f.parse_word("s s s s u s s u*")) == q(2));
}

TEST_CASE("r-diagonal functional from named measures") {
    SUBCASE("nu = delta_1 gives a Haar-type element") {
        FunctionalBuilder<Exact> b(24);
        std::vector<Exact> nu(9, q(1)); // point mass at 1: all moments 1
        GenId a = b.add_rdiagonal("a", nu);
        auto f = b.build();
        Word aas = f.parse_word("a a*");
        for (int k = 1; k <= 4; ++k) CHECK(f.evaluate(aas.pow(k)) == q(1));
        CHECK(f.evaluate(f.parse_word("a a")) == q(0));
        (void)a;
    }
    SUBCASE("nu = quarter circle gives the circular element") {
        FunctionalBuilder<Exact> b(24);
        b.add_rdiagonal("a", measure_moments<Exact>(CompactMeasure::quartercircle(4.0), 12));
        auto f = b.build();
        CHECK(f.evaluate(f.parse_word("a* a")) == q(1));
        CHECK(f.evaluate(f.parse_word("a* a a* a")) == q(2));
        CHECK(f.evaluate(f.parse_word("a")) == q(0));
        CHECK(f.evaluate(f.parse_word("a a")) == q(0));
        // phi(c* c c* c) = 2 for a circular element of variance 1
        CHECK(f.evaluate(f.parse_word("a* a a* a")) == q(2));
    }
}

TEST_CASE("circular convenience source matches the quarter-circle route") {
    FunctionalBuilder<Exact> b(24);
    b.add_circular("c", q(1));
    auto f = b.build();
    CHECK(f.evaluate(f.parse_word("c* c")) == q(1));
    CHECK(f.evaluate(f.parse_word("c c*")) == q(1));
    CHECK(f.evaluate(f.parse_word("c c")) == q(0));
    CHECK(f.evaluate(f.parse_word("c* c c* c")) == q(2));
}

TEST_CASE("traciality on random word pairs") {
    FunctionalBuilder<Exact> b(24);
    b.add_selfadjoint("s", measure_moments<Exact>(CompactMeasure::semicircle(2.0), 40));
    b.add_rdiagonal("a", measure_moments<Exact>(CompactMeasure::quartercircle(4.0), 20));
    auto f = b.build();
    std::vector<Letter> alphabet = {Letter{f.id("s"), false}, Letter{f.id("a"), false},
                                    Letter{f.id("a"), true}};
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int rep = 0; rep < 60; ++rep) {
        int n1 = 1 + rep % 4, n2 = 1 + (rep / 4) % 4;
        Word w, v;
        for (int i = 0; i < n1; ++i) w.append(alphabet[pick(rng)]);
        for (int i = 0; i < n2; ++i) v.append(alphabet[pick(rng)]);
        CHECK(f.evaluate(w * v) == f.evaluate(v * w));
    }
}

TEST_CASE("adjoint symmetry of the state") {
    auto f = semicircular_plus_haar();
    std::mt19937 rng(11);
    std::vector<Letter> alphabet = {Letter{f.id("s"), false}, Letter{f.id("u"), false},
                                    Letter{f.id("u"), true}};
    std::uniform_int_distribution<int> pick(0, 2);
    for (int rep = 0; rep < 40; ++rep) {
        Word w;
        for (int i = 0; i <= rep % 6; ++i) w.append(alphabet[pick(rng)]);
        Exact lhs = f.evaluate(w.adjoint());
        Exact rhs = f.evaluate(w);
        CHECK(lhs == Exact(rhs.re, -rhs.im));
    }
}

TEST_CASE("gram positivity spot check") {
    FunctionalBuilder<Cplx> b(24);
    b.add_rdiagonal("a",
                    measure_moments<Cplx>(CompactMeasure::quartercircle(4.0), 20));
    auto f = b.build();
    std::vector<Word> words{Word{}};
    std::vector<Letter> alphabet = {Letter{f.id("a"), false}, Letter{f.id("a"), true}};
    std::size_t start = 0;
    for (int len = 1; len <= 3; ++len) {
        std::size_t end = words.size();
        for (std::size_t i = start; i < end; ++i)
            for (const Letter& l : alphabet) {
                Word w = words[i];
                w.append(l);
                words.push_back(w);
            }
        start = end;
    }
    Eigen::MatrixXcd G(words.size(), words.size());
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = 0; j < words.size(); ++j)
            G(i, j) = f.evaluate(words[i].adjoint() * words[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("cumulant evaluation path agrees with the centering recursion") {
    FunctionalBuilder<Exact> b(16);
    b.add_selfadjoint("s", measure_moments<Exact>(CompactMeasure::semicircle(2.0), 40));
    b.add_haar_unitary("u");
    auto f = b.build();
    std::vector<Letter> alphabet = {Letter{f.id("s"), false}, Letter{f.id("u"), false},
                                    Letter{f.id("u"), true}};
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> len(1, 8);
    for (int rep = 0; rep < 200; ++rep) {
        Word w;
        int n = len(rng);
        for (int i = 0; i < n; ++i) w.append(alphabet[pick(rng)]);
        CHECK(word_cumulant_evaluate(f, w) == f.evaluate(w));
    }
}

TEST_CASE("r-diagonal realization is unique across polar sides") {
    FunctionalBuilder<Exact> bl(16), br(16);
    auto nu = measure_moments<Exact>(CompactMeasure::uniform(0.0, 1.0), 12);
    bl.add_rdiagonal("a", nu, PolarSide::Left);
    br.add_rdiagonal("a", nu, PolarSide::Right);
    auto fl = bl.build();
    auto fr = br.build();
    // all *-moments up to degree 10 agree
    for (std::uint32_t len = 1; len <= 10; ++len) {
        std::uint64_t count = 1ull << len;
        for (std::uint64_t bits = 0; bits < count; ++bits) {
            Word w;
            for (std::uint32_t i = 0; i < len; ++i)
                w.append(Letter{fl.id("a"), ((bits >> i) & 1) != 0});
            CHECK(fl.evaluate(w) == fr.evaluate(w));
        }
    }
}

TEST_CASE("alternating centered words vanish exactly for r-diagonal sources") {
    FunctionalBuilder<Exact> b(32);
    GenId a = b.add_rdiagonal(
        "a", measure_moments<Exact>(CompactMeasure::quartercircle(4.0), 16));
    auto f = b.build();
    auto rep = check_alternating_vanishing(f, a, 3, 2);
    CHECK(rep.max_abs_violation == 0.0);
    CHECK(rep.exact_mode);
    CHECK(rep.relations_checked > 0);
}

TEST_CASE("shifted semicircular fails the alternating sweep at n=1") {
    FunctionalBuilder<Exact> b(32);
    GenId a = b.add_selfadjoint(
        "a", measure_moments<Exact>(CompactMeasure::semicircle(2.0, 1.0), 40));
    auto f = b.build();
    // phi(w_{12;1}) = phi(a) = 1
    auto rep = check_alternating_vanishing(f, a, 1, 1);
    CHECK(rep.max_abs_violation == doctest::Approx(1.0));
}

TEST_CASE("haar unitary passes the alternating sweep") {
    FunctionalBuilder<Exact> b(32);
    GenId u = b.add_haar_unitary("u");
    auto f = b.build();
    auto rep = check_alternating_vanishing(f, u, 3, 2);
    CHECK(rep.max_abs_violation == 0.0);
}

TEST_CASE("block-diagonal amalgamated freeness both directions") {
    SUBCASE("r-diagonal passes") {
        FunctionalBuilder<Exact> b(32);
        GenId a = b.add_rdiagonal(
            "a", measure_moments<Exact>(CompactMeasure::quartercircle(4.0), 16));
        auto f = b.build();
        auto rep = check_amalgamated_freeness_D(f, a, 2, 2);
        CHECK(rep.max_abs_violation == 0.0);
    }
    SUBCASE("shifted semicircular fails") {
        FunctionalBuilder<Exact> b(32);
        GenId a = b.add_selfadjoint(
            "a", measure_moments<Exact>(CompactMeasure::semicircle(2.0, 1.0), 40));
        auto f = b.build();
        auto rep = check_amalgamated_freeness_D(f, a, 2, 2);
        CHECK(rep.max_abs_violation > 0.5);
    }
}

TEST_CASE("freeness sweeps") {
    FunctionalBuilder<Exact> b(24);
    b.add_selfadjoint("s", measure_moments<Exact>(CompactMeasure::semicircle(2.0), 40));
    b.add_haar_unitary("u");
    auto f = b.build();
    SUBCASE("distinct sources are free") {
        auto rep = check_freeness(
            f, {Letter{f.id("s"), false}},
            {Letter{f.id("u"), false}, Letter{f.id("u"), true}}, 6);
        CHECK(rep.max_abs_violation == 0.0);
    }
    SUBCASE("an element is not free from itself") {
        auto rep = check_freeness(f, {Letter{f.id("s"), false}},
                                  {Letter{f.id("s"), false}}, 4);
        CHECK(rep.max_abs_violation > 0.1);
    }
}

TEST_CASE("block embedding of the r-diagonal element") {
    FunctionalBuilder<Exact> b(24);
    GenId a = b.add_rdiagonal(
        "a", measure_moments<Exact>(CompactMeasure::quartercircle(4.0), 16));
    auto f = b.build();
    auto A = block_embed<Exact>(a);
    CHECK(phi_d(f, A * A) == q(1));
    CHECK(phi_d(f, A * A * A) == q(0));
    CHECK(phi_d(f, (A * A) * (A * A)) == q(2));
    auto ed = expect_diagonal(f, A);
    CHECK(ed.is_zero());
    // phi_2 of a matrix unit
    CHECK(phi_d(f, PolyMatrix<Exact>::unit(2, 0, 0)) == q(1, 2));
}

TEST_CASE("eta flips") {
    PolyMatrix<Exact> X(2);
    X.at(0, 0) = Polynomial<Exact>::constant(q(1));
    X.at(0, 1) = Polynomial<Exact>::constant(q(2));
    X.at(1, 0) = Polynomial<Exact>::constant(q(3));
    X.at(1, 1) = Polynomial<Exact>::constant(q(4));
    auto Y = eta_flip(X);
    CHECK(Y.at(0, 0) == Polynomial<Exact>::constant(q(4)));
    CHECK(Y.at(1, 1) == Polynomial<Exact>::constant(q(1)));
    CHECK(Y.at(0, 1).is_zero());
    auto D = PolyMatrix<Exact>(2);
    D.at(0, 0) = Polynomial<Exact>::constant(q(5));
    D.at(1, 1) = Polynomial<Exact>::constant(q(7));
    auto E = eta0_flip(D);
    CHECK(E.at(0, 0) == Polynomial<Exact>::constant(q(7)));
    CHECK(E.at(1, 1) == Polynomial<Exact>::constant(q(5)));
    CHECK_THROWS_AS(eta0_flip(X), input_error);
}

TEST_CASE("matrix unit sources model compressions") {
    FunctionalBuilder<Exact> b(24);
    auto units = b.add_matrix_units("v", 2);
    b.add_selfadjoint("x", measure_moments<Exact>(CompactMeasure::semicircle(2.0), 40));
    auto f = b.build();
    CHECK(f.evaluate(f.parse_word("v11")) == q(1, 2));
    CHECK(f.evaluate(f.parse_word("v12")) == q(0));
    CHECK(f.evaluate(f.parse_word("v12 v21")) == q(1, 2));
    CHECK(f.evaluate(f.parse_word("v12 v12")) == q(0));
    CHECK(f.evaluate(f.parse_word("v12* v12")) == q(1, 2)); // v21 v12 = v22
    // the mixed moment phi(x v11 x v22) = (m2 - m1^2)/4 for x free from units
    CHECK(f.evaluate(f.parse_word("x v11 x v22")) == q(1, 4));
    (void)units;
}

TEST_CASE("word tables give explicit sources") {
    FunctionalBuilder<Exact> b(8);
    auto ids = b.add_word_table({"t"});
    Word t = Word::single(ids[0], false);
    b.set_table_value(t, q(1, 3));
    b.set_table_value(t * t, q(1, 2));
    auto f = b.build();
    CHECK(f.evaluate(t) == q(1, 3));
    CHECK(f.evaluate(t * t) == q(1, 2));
    CHECK(f.evaluate(t * t * t) == q(0));
}

TEST_CASE("degree guard") {
    auto f = semicircular_plus_haar(6);
    Word w = f.parse_word("s s s s s s s");
    CHECK_THROWS_AS(f.evaluate(w), resource_error);
    CHECK_THROWS_AS(f.id("nope"), input_error);
}

TEST_CASE("free family functional assembles prescribed sources") {
    FunctionalBuilder<Exact> b(20);
    b.add_circular("c11", q(1));
    b.add_circular("c12", q(1));
    b.add_circular("c21", q(1));
    b.add_circular("c22", q(1));
    auto f = b.build();
    PolyMatrix<Exact> C(2);
    C.at(0, 0) = Polynomial<Exact>::from_letter(f.id("c11"));
    C.at(0, 1) = Polynomial<Exact>::from_letter(f.id("c12"));
    C.at(1, 0) = Polynomial<Exact>::from_letter(f.id("c21"));
    C.at(1, 1) = Polynomial<Exact>::from_letter(f.id("c22"));
    CHECK(phi_d(f, C.adjoint() * C) == q(2)); // circular of variance d = 2
    // single-source reduction: a 1x1 matrix is the source itself
    PolyMatrix<Exact> one(1);
    one.at(0, 0) = Polynomial<Exact>::from_letter(f.id("c11"));
    CHECK(phi_d(f, one.adjoint() * one) == q(1));
}

TEST_CASE("selfadjoint matrix with semicircular diagonal and circular corner") {
    FunctionalBuilder<Exact> b(20);
    auto moms = measure_moments<Exact>(CompactMeasure::semicircle(2.0), 40);
    b.add_selfadjoint("s11", moms);
    b.add_selfadjoint("s22", moms);
    b.add_circular("c", q(1));
    auto f = b.build();
    PolyMatrix<Exact> S(2);
    S.at(0, 0) = Polynomial<Exact>::from_letter(f.id("s11"));
    S.at(0, 1) = Polynomial<Exact>::from_letter(f.id("c"));
    S.at(1, 0) = Polynomial<Exact>::from_letter(f.id("c"), true);
    S.at(1, 1) = Polynomial<Exact>::from_letter(f.id("s22"));
    // selfadjointness holds at the state level: || S - S* ||_2 = 0 (stars on
    // selfadjoint letters are only resolved during evaluation)
    auto D = S - S.adjoint();
    CHECK(phi_d(f, D.adjoint() * D) == q(0));
    CHECK(phi_d(f, S * S) == q(2)); // semicircular of variance d = 2
    CHECK(phi_d(f, S) == q(0));
    CHECK(phi_d(f, S * S * S) == q(0));
    CHECK(phi_d(f, (S * S) * (S * S)) == q(8)); // Catalan(2) * d^2
}
