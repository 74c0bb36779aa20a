#include "freeprob/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "freeprob/errors.hpp"
#include "freeprob/quadrature.hpp"

namespace freeprob::rmt {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s), b = splitmix64(s);
    std::seed_seq ss{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                     static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(ss);
}

Eigen::MatrixXcd ginibre(int N, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXcd G(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) G(i, j) = std::complex<double>(nd(rng), nd(rng));
    return G;
}

} // namespace

std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x2545f4914f6cdd1dull * (stream + 1));
    return splitmix64(x);
}

EnsembleSample haar_unitary(int N, std::uint64_t seed) {
    if (N < 1) throw input_error("haar_unitary: N must be >= 1");
    auto rng = make_rng(seed);
    Eigen::MatrixXcd G = ginibre(N, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
    Eigen::MatrixXcd Q = qr.householderQ();
    Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    // plain QR is not Haar: fix the phase ambiguity using R's diagonal
    for (int j = 0; j < N; ++j) {
        std::complex<double> r = R(j, j);
        std::complex<double> ph = std::abs(r) == 0.0 ? 1.0 : r / std::abs(r);
        Q.col(j) *= ph;
    }
    double err = (Q.adjoint() * Q - Eigen::MatrixXcd::Identity(N, N))
                     .cwiseAbs()
                     .maxCoeff();
    if (err > 1e-12)
        throw numerics_error("haar_unitary: unitarity check failed", err);
    return {N, seed, std::move(Q), "haar"};
}

EnsembleSample diag_from_measure(int N, const CompactMeasure& mu,
                                 std::uint64_t seed, SamplingMode mode) {
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
    if (mode == SamplingMode::Stratified) {
        for (int k = 0; k < N; ++k)
            D(k, k) = mu.quantile((k + 0.5) / N);
    } else {
        auto rng = make_rng(seed);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        for (int k = 0; k < N; ++k) D(k, k) = mu.quantile(ud(rng));
    }
    return {N, seed, std::move(D), "diag"};
}

EnsembleSample rdiagonal_matrix(int N, const CompactMeasure& nu,
                                std::uint64_t seed) {
    CompactMeasure mu = nu.symmetric_square_root();
    EnsembleSample U = haar_unitary(N, substream(seed, 1));
    EnsembleSample P = diag_from_measure(N, mu, substream(seed, 2));
    return {N, seed, U.mat * P.mat, "rdiagonal"};
}

EnsembleSample phase_diag_model(int N, const CompactMeasure& nu,
                                std::uint64_t seed) {
    CompactMeasure mu = nu.symmetric_square_root();
    EnsembleSample P = diag_from_measure(N, mu, substream(seed, 2));
    auto rng = make_rng(substream(seed, 3));
    std::uniform_real_distribution<double> ud(0.0, 2.0 * M_PI);
    Eigen::MatrixXcd A = P.mat;
    for (int k = 0; k < N; ++k) {
        double th = ud(rng);
        A(k, k) *= std::complex<double>(std::cos(th), std::sin(th));
    }
    return {N, seed, std::move(A), "phasediag"};
}

Eigen::MatrixXcd block_embed_matrix(const Eigen::MatrixXcd& M) {
    int N = static_cast<int>(M.rows());
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    B.topRightCorner(N, N) = M;
    B.bottomLeftCorner(N, N) = M.adjoint();
    return B;
}

SpectralSample eigenvalues_selfadjoint(const Eigen::MatrixXcd& M,
                                       const std::string& kind) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    SpectralSample s;
    s.kind = kind;
    s.values.assign(es.eigenvalues().data(),
                    es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(s.values.begin(), s.values.end());
    return s;
}

SpectralSample singular_values(const Eigen::MatrixXcd& M, const std::string& kind) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
    SpectralSample s;
    s.kind = kind;
    s.values.assign(svd.singularValues().data(),
                    svd.singularValues().data() + svd.singularValues().size());
    std::sort(s.values.begin(), s.values.end());
    return s;
}

SpectralSample block_embed_spectrum(const Eigen::MatrixXcd& M) {
    SpectralSample sv = singular_values(M);
    SpectralSample s;
    s.kind = "block_embed";
    s.values.reserve(2 * sv.values.size());
    for (auto it = sv.values.rbegin(); it != sv.values.rend(); ++it)
        s.values.push_back(-*it);
    for (double v : sv.values) s.values.push_back(v);
    return s;
}

Eigen::MatrixXcd CompressedModel::block(int i, int j) const {
    return X0.block(i * N, j * N, N, N);
}

CompressedModel compressed_entries(const CompactMeasure& mu, int d, int N,
                                   std::uint64_t seed) {
    if (d < 1) throw input_error("compressed_entries: d must be >= 1");
    int Nd = N * d;
    EnsembleSample V = haar_unitary(Nd, substream(seed, 11));
    EnsembleSample D = diag_from_measure(Nd, mu, substream(seed, 12));
    CompressedModel m;
    m.d = d;
    m.N = N;
    m.X0 = V.mat * D.mat * V.mat.adjoint();
    return m;
}

namespace {

double silverman_bandwidth(const std::vector<double>& v) {
    int n = static_cast<int>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (n - 1);
    double sd = std::sqrt(var);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
    double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
    double iqr = q3 - q1;
    double scale = std::min(sd, iqr / 1.34);
    if (scale <= 0.0) scale = sd;
    return 0.9 * scale * std::pow(n, -0.2);
}

// KDE-based kappa * int rho^3 for one (sub)sample
double kde_fisher_value(const std::vector<double>& sorted, double h, double kappa,
                        std::optional<std::pair<double, double>> support) {
    int n = static_cast<int>(sorted.size());
    double lo = support ? support->first : sorted.front() - 5.0 * h;
    double hi = support ? support->second : sorted.back() + 5.0 * h;
    double window = 8.0 * h;
    double inv = 1.0 / (n * h * std::sqrt(2.0 * M_PI));
    auto rho_hat = [&](double t) {
        double acc = 0.0;
        auto lo_it = std::lower_bound(sorted.begin(), sorted.end(), t - window);
        auto hi_it = std::upper_bound(sorted.begin(), sorted.end(), t + window);
        for (auto it = lo_it; it != hi_it; ++it) {
            double u = (t - *it) / h;
            acc += std::exp(-0.5 * u * u);
        }
        if (support) {
            // reflect at declared support endpoints
            double tl = 2.0 * support->first - t;
            auto l1 = std::lower_bound(sorted.begin(), sorted.end(), tl - window);
            auto h1 = std::upper_bound(sorted.begin(), sorted.end(), tl + window);
            for (auto it = l1; it != h1; ++it) {
                double u = (tl - *it) / h;
                acc += std::exp(-0.5 * u * u);
            }
            double tr = 2.0 * support->second - t;
            auto l2 = std::lower_bound(sorted.begin(), sorted.end(), tr - window);
            auto h2 = std::upper_bound(sorted.begin(), sorted.end(), tr + window);
            for (auto it = l2; it != h2; ++it) {
                double u = (tr - *it) / h;
                acc += std::exp(-0.5 * u * u);
            }
        }
        return inv * acc;
    };
    // composite Gauss-Legendre over the support window
    int panels = 256;
    double total = 0.0;
    double step = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        double a = lo + p * step;
        total += quad::gl_panel([&](double t) {
            double r = rho_hat(t);
            return r * r * r;
        }, a, a + step, 8);
    }
    return kappa * total;
}

} // namespace

FisherEstimate empirical_fisher(const SpectralSample& s, double kappa,
                                BandwidthPolicy policy,
                                std::optional<std::pair<double, double>> support,
                                int bootstrap, std::uint64_t seed) {
    FisherEstimate est;
    est.n = static_cast<int>(s.values.size());
    if (est.n < 200) throw input_error("empirical_fisher needs at least 200 points");
    std::vector<double> sorted = s.values;
    std::sort(sorted.begin(), sorted.end());
    double h = policy.override_h ? *policy.override_h
                                 : policy.factor * silverman_bandwidth(sorted);
    if (!(h > 0.0) || sorted.back() - sorted.front() < 1e-12) {
        est.degenerate = true;
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }
    est.bandwidth = h;
    est.value = kde_fisher_value(sorted, h, kappa, support);

    if (bootstrap > 1) {
        auto rng = make_rng(substream(seed, 101));
        std::uniform_int_distribution<int> pick(0, est.n - 1);
        std::vector<double> resampled(est.n);
        double sum = 0.0, sum2 = 0.0;
        for (int b = 0; b < bootstrap; ++b) {
            for (int i = 0; i < est.n; ++i) resampled[i] = sorted[pick(rng)];
            std::sort(resampled.begin(), resampled.end());
            double hb = policy.override_h ? *policy.override_h
                                          : policy.factor * silverman_bandwidth(resampled);
            double v = kde_fisher_value(resampled, hb, kappa, support);
            sum += v;
            sum2 += v * v;
        }
        double mean = sum / bootstrap;
        est.stderr_boot = std::sqrt(std::max(0.0, sum2 / bootstrap - mean * mean));
    }
    return est;
}

LogEnergyEstimate empirical_log_energy(const SpectralSample& s) {
    LogEnergyEstimate est;
    std::vector<double> v = s.values;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n < 2) throw input_error("empirical_log_energy needs at least 2 points");
    double scale = std::max(1.0, std::abs(v.back() - v.front()));
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] - v[i - 1] < 1e-12 * scale) {
            v[i] = v[i - 1] + 1e-12 * scale;
            ++est.ties_jittered;
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) acc += std::log(v[j] - v[i]);
    est.value = 2.0 * acc / (static_cast<double>(n) * static_cast<double>(n));
    return est;
}

double ks_distance(const SpectralSample& s,
                   const std::function<double(double)>& cdf) {
    std::vector<double> v = s.values;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double F = cdf(v[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
    }
    return d;
}

double semicircle_cdf(double r, double t) {
    if (t <= -r) return 0.0;
    if (t >= r) return 1.0;
    return 0.5 + (t * std::sqrt(r * r - t * t) + r * r * std::asin(t / r)) /
                     (M_PI * r * r);
}

std::vector<std::pair<int, std::uint32_t>> word_trace_labels(int max_len) {
    std::vector<std::pair<int, std::uint32_t>> out;
    for (int len = 1; len <= max_len; ++len)
        for (std::uint32_t bits = 0; bits < (1u << len); ++bits)
            out.push_back({len, bits});
    return out;
}

std::vector<std::complex<double>> word_traces(const Eigen::MatrixXcd& M,
                                              int max_len) {
    int N = static_cast<int>(M.rows());
    double invN = 1.0 / N;
    // products of all words up to half length, then tr(L R) by entry pairing
    int half = (max_len + 1) / 2;
    std::map<std::pair<int, std::uint32_t>, Eigen::MatrixXcd> prod;
    prod[{1, 0}] = M;
    prod[{1, 1}] = M.adjoint();
    for (int len = 2; len <= half; ++len)
        for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
            const Eigen::MatrixXcd& prev = prod.at({len - 1, bits >> 1});
            prod[{len, bits}] = prev * prod.at({1, bits & 1u});
        }
    // transposed copies of the left factors keep the pairing sweep contiguous
    // in memory; only the half-length products ever sit on the left
    std::map<std::pair<int, std::uint32_t>, Eigen::MatrixXcd> prod_t;
    for (const auto& [key, P] : prod)
        if (key.first == half) prod_t[key] = P.transpose();
    // bit order: bit k of `bits` is the (k+1)-th letter from the right; we
    // define letter i (0-based, left to right) of a length-len word as bit
    // (len-1-i).  tr(word) = tr(L R) with L the left half.
    std::vector<std::complex<double>> out;
    for (int len = 1; len <= max_len; ++len) {
        int ll = std::min(len, half);
        int rl = len - ll;
        for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
            std::uint32_t lbits = bits >> rl;
            std::uint32_t rbits = bits & ((1u << rl) - 1u);
            if (rl == 0) {
                out.push_back(prod.at({ll, lbits}).trace() * invN);
            } else {
                const Eigen::MatrixXcd& LT = prod_t.at({ll, lbits});
                const Eigen::MatrixXcd& R = prod.at({rl, rbits});
                std::complex<double> tr = (LT.cwiseProduct(R)).sum();
                out.push_back(tr * invN);
            }
        }
    }
    return out;
}

} // namespace freeprob::rmt
