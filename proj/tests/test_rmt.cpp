#include <cmath>
#include <complex>

#include "doctest.h"

#include "freeprob/errors.hpp"
#include "freeprob/functional.hpp"
#include "freeprob/functionals.hpp"
#include "freeprob/rmt.hpp"

using namespace freeprob;
using namespace freeprob::rmt;

TEST_CASE("haar unitaries") {
    SUBCASE("N=1 is a uniform phase") {
        auto u = haar_unitary(1, 5);
        CHECK(std::abs(u.mat(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unitarity and determinism") {
        auto u1 = haar_unitary(64, 42);
        auto u2 = haar_unitary(64, 42);
        CHECK((u1.mat - u2.mat).cwiseAbs().maxCoeff() == 0.0);
        auto err = (u1.mat.adjoint() * u1.mat -
                    Eigen::MatrixXcd::Identity(64, 64))
                       .cwiseAbs()
                       .maxCoeff();
        CHECK(err < 1e-12);
        auto u3 = haar_unitary(64, 43);
        CHECK((u1.mat - u3.mat).cwiseAbs().maxCoeff() > 1e-3);
    }
    SUBCASE("normalized trace concentrates at zero, Var(Tr U) is 1") {
        int N = 64, trials = 200;
        std::complex<double> mean = 0.0;
        double var_tr = 0.0;
        for (int t = 0; t < trials; ++t) {
            auto u = haar_unitary(N, substream(1000, t));
            std::complex<double> tr = u.mat.trace();
            mean += tr / double(N);
            var_tr += std::norm(tr);
        }
        mean /= double(trials);
        var_tr /= trials;
        CHECK(std::abs(mean) < 3.0 / std::sqrt(double(trials) * N));
        CHECK(var_tr == doctest::Approx(1.0).epsilon(0.35));
    }
}

TEST_CASE("diagonal samples from measures") {
    SUBCASE("point mass gives the identity") {
        auto d = diag_from_measure(16, CompactMeasure::point_mass(1.0), 1);
        CHECK((d.mat - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <
              1e-12);
    }
    SUBCASE("stratified semicircle matches the second moment closely") {
        auto d = diag_from_measure(1000, CompactMeasure::semicircle(2.0), 1);
        double m2 = (d.mat * d.mat).trace().real() / 1000.0;
        CHECK(m2 == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("iid mode fluctuates within the CLT envelope") {
        int trials = 20, N = 256;
        double acc = 0.0;
        for (int t = 0; t < trials; ++t) {
            auto d = diag_from_measure(N, CompactMeasure::semicircle(2.0),
                                       substream(7, t), SamplingMode::Iid);
            acc += (d.mat * d.mat).trace().real() / N;
        }
        acc /= trials;
        // Var(x^2) = m4 - m2^2 = 1, so the mean has sd 1/sqrt(trials*N)
        CHECK(std::abs(acc - 1.0) < 4.0 / std::sqrt(double(trials) * N));
    }
}

TEST_CASE("r-diagonal matrix model") {
    SUBCASE("nu = delta_1 gives a unitary") {
        auto a = rdiagonal_matrix(32, CompactMeasure::point_mass(1.0), 3);
        auto err = (a.mat.adjoint() * a.mat -
                    Eigen::MatrixXcd::Identity(32, 32))
                       .cwiseAbs()
                       .maxCoeff();
        CHECK(err < 1e-10);
    }
    SUBCASE("quarter-circle model matches symbolic *-moments") {
        auto a = rdiagonal_matrix(1024, CompactMeasure::quartercircle(4.0), 11);
        Eigen::MatrixXcd AA = a.mat.adjoint() * a.mat;
        double m2 = (AA * AA).trace().real() / 1024.0;
        CHECK(m2 == doctest::Approx(2.0).epsilon(0.05));
        double sq = std::abs((a.mat * a.mat).trace()) / 1024.0;
        CHECK(sq < 0.05);
    }
}

TEST_CASE("block embedding") {
    SUBCASE("identity matrix") {
        auto B = block_embed_matrix(Eigen::MatrixXcd::Identity(3, 3));
        auto s = eigenvalues_selfadjoint(B);
        for (int i = 0; i < 3; ++i) CHECK(s.values[i] == doctest::Approx(-1.0));
        for (int i = 3; i < 6; ++i) CHECK(s.values[i] == doctest::Approx(1.0));
    }
    SUBCASE("eigenvalues are exactly the plus-minus singular values") {
        for (int rep = 0; rep < 20; ++rep) {
            int N = 2 + rep % 7;
            auto g = haar_unitary(N, substream(99, rep));
            Eigen::MatrixXcd M = g.mat * (1.0 + 0.3 * rep);
            // make it non-normal
            M(0, N - 1) += std::complex<double>(0.5, -0.25);
            auto eig = eigenvalues_selfadjoint(block_embed_matrix(M));
            auto pm = block_embed_spectrum(M);
            REQUIRE(eig.values.size() == pm.values.size());
            for (std::size_t i = 0; i < eig.values.size(); ++i)
                CHECK(std::abs(eig.values[i] - pm.values[i]) < 1e-10);
        }
    }
}

TEST_CASE("compressed entries") {
    SUBCASE("d=1 reproduces the stratified spectrum") {
        auto mu = CompactMeasure::semicircle(2.0);
        auto m = compressed_entries(mu, 1, 64, 5);
        auto eig = eigenvalues_selfadjoint(m.X0);
        for (int k = 0; k < 64; ++k)
            CHECK(eig.values[k] ==
                  doctest::Approx(mu.quantile((k + 0.5) / 64)).epsilon(1e-8));
    }
    SUBCASE("d=2 quantitative checks against the engine values") {
        auto mu = CompactMeasure::semicircle(2.0);
        auto m = compressed_entries(mu, 2, 256, 5);
        int Nd = 512;
        double m2 = (m.X0 * m.X0).trace().real() / Nd;
        CHECK(m2 == doctest::Approx(1.0).epsilon(0.05));
        // mixed word with the scalar matrix units: phi(B V11 B V22) = var/4
        Eigen::MatrixXcd V11 = Eigen::MatrixXcd::Zero(Nd, Nd);
        V11.topLeftCorner(256, 256) = Eigen::MatrixXcd::Identity(256, 256);
        Eigen::MatrixXcd V22 = Eigen::MatrixXcd::Zero(Nd, Nd);
        V22.bottomRightCorner(256, 256) = Eigen::MatrixXcd::Identity(256, 256);
        double mixed = (m.X0 * V11 * m.X0 * V22).trace().real() / Nd;
        CHECK(mixed == doctest::Approx(0.25).epsilon(0.2));
        // block m1: phi(b11) = phi(x) = 0 within sampling error
        double b11m1 = m.block(0, 0).trace().real() / 256.0;
        CHECK(std::abs(b11m1) < 0.05);
    }
}

TEST_CASE("empirical fisher") {
    SUBCASE("stratified semicircle sample recovers 1") {
        auto d = diag_from_measure(2000, CompactMeasure::semicircle(2.0), 1);
        SpectralSample s;
        for (int i = 0; i < 2000; ++i) s.values.push_back(d.mat(i, i).real());
        auto est = empirical_fisher(s, default_kappa(), {}, {{-2.0, 2.0}}, 10, 3);
        CHECK(est.value == doctest::Approx(1.0).epsilon(0.05));
        CHECK(est.stderr_boot < 0.2);
    }
    SUBCASE("degenerate sample flags infinity") {
        SpectralSample s;
        s.values.assign(500, 1.0);
        auto est = empirical_fisher(s, default_kappa());
        CHECK(est.degenerate);
        CHECK(std::isinf(est.value));
    }
    SUBCASE("too few points is an input error") {
        SpectralSample s;
        s.values.assign(50, 0.0);
        CHECK_THROWS_AS(empirical_fisher(s, default_kappa()), input_error);
    }
}

TEST_CASE("empirical log energy") {
    SUBCASE("stratified semicircle approaches -1/4") {
        auto d = diag_from_measure(2000, CompactMeasure::semicircle(2.0), 1);
        SpectralSample s;
        for (int i = 0; i < 2000; ++i) s.values.push_back(d.mat(i, i).real());
        auto est = empirical_log_energy(s);
        CHECK(est.value == doctest::Approx(-0.25).epsilon(0.04));
    }
    SUBCASE("two points") {
        SpectralSample s;
        s.values = {0.0, 1.0};
        CHECK(empirical_log_energy(s).value == doctest::Approx(0.0));
    }
    SUBCASE("dilation adds log lambda") {
        SpectralSample s, s2;
        for (int i = 0; i < 500; ++i) {
            double v = std::cos(0.013 * i) + 0.002 * i;
            s.values.push_back(v);
            s2.values.push_back(2.0 * v);
        }
        // exact identity on samples, with the (N-1)/N factor of the
        // self-term-omitting normalization
        CHECK(empirical_log_energy(s2).value -
                  empirical_log_energy(s).value ==
              doctest::Approx(std::log(2.0) * 499.0 / 500.0).epsilon(1e-9));
    }
    SUBCASE("ties get jittered and reported") {
        SpectralSample s;
        s.values = {1.0, 1.0, 2.0};
        auto est = empirical_log_energy(s);
        CHECK(est.ties_jittered == 1);
        CHECK(std::isfinite(est.value));
    }
}

TEST_CASE("ks distance against the semicircle law") {
    auto d = diag_from_measure(1024, CompactMeasure::semicircle(2.0), 1);
    SpectralSample s;
    for (int i = 0; i < 1024; ++i) s.values.push_back(d.mat(i, i).real());
    double ks = ks_distance(s, [](double t) { return semicircle_cdf(2.0, t); });
    CHECK(ks < 0.01); // stratified sample: only discretization error
    CHECK(semicircle_cdf(2.0, 0.0) == doctest::Approx(0.5));
    CHECK(semicircle_cdf(2.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("word traces match direct products") {
    auto a = rdiagonal_matrix(24, CompactMeasure::quartercircle(4.0), 9);
    int max_len = 4;
    auto traces = word_traces(a.mat, max_len);
    auto labels = word_trace_labels(max_len);
    REQUIRE(traces.size() == labels.size());
    Eigen::MatrixXcd Ms = a.mat.adjoint();
    for (std::size_t idx = 0; idx < labels.size(); ++idx) {
        auto [len, bits] = labels[idx];
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(24, 24);
        for (int i = len - 1; i >= 0; --i)
            P = P * (((bits >> i) & 1u) ? Ms : a.mat);
        std::complex<double> expect = P.trace() / 24.0;
        CHECK(std::abs(traces[idx] - expect) < 1e-12);
    }
}

TEST_CASE("monte carlo *-moments track the symbolic engine") {
    using freeprob::Exact;
    const int N = 256, n_seeds = 8, max_len = 4;
    for (const auto& nu :
         {CompactMeasure::quartercircle(4.0), CompactMeasure::uniform(0.0, 1.0),
          CompactMeasure::point_mass(1.0)}) {
        freeprob::FunctionalBuilder<Exact> b(12);
        freeprob::GenId a = b.add_rdiagonal("a", measure_moments<Exact>(nu, 12));
        auto f = b.build();
        auto labels = word_trace_labels(max_len);
        std::vector<std::vector<std::complex<double>>> per_seed;
        for (int t = 0; t < n_seeds; ++t) {
            auto A = rdiagonal_matrix(N, nu, substream(404, t));
            per_seed.push_back(word_traces(A.mat, max_len));
        }
        for (std::size_t wi = 0; wi < labels.size(); ++wi) {
            auto [len, bits] = labels[wi];
            freeprob::Word w;
            for (int k = len - 1; k >= 0; --k)
                w.append(freeprob::Letter{a, ((bits >> k) & 1u) != 0});
            double expect =
                freeprob::scalar_traits<Exact>::to_complex(f.evaluate(w)).real();
            std::complex<double> mean = 0.0;
            for (const auto& v : per_seed) mean += v[wi] / double(n_seeds);
            double var = 0.0;
            for (const auto& v : per_seed) var += std::norm(v[wi] - mean);
            double se = std::sqrt(var / (n_seeds * (n_seeds - 1.0))) + 1.0 / N;
            CHECK(std::abs(mean - std::complex<double>(expect, 0.0)) <= 3.0 * se);
        }
    }
}

TEST_CASE("phase-twisted model keeps the singular values") {
    auto nu = CompactMeasure::quartercircle(4.0);
    auto a = rdiagonal_matrix(128, nu, 21);
    auto b = phase_diag_model(128, nu, 21);
    auto sa = singular_values(a.mat);
    auto sb = singular_values(b.mat);
    for (std::size_t i = 0; i < sa.values.size(); ++i)
        CHECK(sa.values[i] == doctest::Approx(sb.values[i]).epsilon(1e-9));
}
