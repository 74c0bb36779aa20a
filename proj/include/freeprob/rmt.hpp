#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "freeprob/measure.hpp"

namespace freeprob::rmt {

struct EnsembleSample {
    int N = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXcd mat;
    std::string ensemble;
};

struct SpectralSample {
    std::vector<double> values; // sorted ascending
    std::string kind;
};

enum class SamplingMode { Iid, Stratified };

/// Derives a fresh RNG stream for (seed, stream); bit-stable across runs.
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream);

/// Exactly Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phase correction.
EnsembleSample haar_unitary(int N, std::uint64_t seed);

/// Real diagonal with entries quantile(mu, u_k); stratified mode uses
/// u_k = (k - 1/2)/N and matches the spectrum deterministically.
EnsembleSample diag_from_measure(int N, const CompactMeasure& mu,
                                 std::uint64_t seed,
                                 SamplingMode mode = SamplingMode::Stratified);

/// A = U P with U Haar and P stratified from the symmetric square root of nu.
EnsembleSample rdiagonal_matrix(int N, const CompactMeasure& nu,
                                std::uint64_t seed);

/// Comparison model with the Haar factor broken: A = diag(phases) P.  Same
/// singular values as the R-diagonal model, different *-distribution.
EnsembleSample phase_diag_model(int N, const CompactMeasure& nu,
                                std::uint64_t seed);

/// The 2N x 2N selfadjoint block matrix [[0, M], [M*, 0]].
Eigen::MatrixXcd block_embed_matrix(const Eigen::MatrixXcd& M);

SpectralSample eigenvalues_selfadjoint(const Eigen::MatrixXcd& M,
                                       const std::string& kind = "eigen");
SpectralSample singular_values(const Eigen::MatrixXcd& M,
                               const std::string& kind = "singular");

/// Spectrum of the block embedding of M via the exact identity: the
/// eigenvalues are plus-minus the singular values of M.
SpectralSample block_embed_spectrum(const Eigen::MatrixXcd& M);

/// Free compression model: X0 = V D V* of size N*d with V Haar and D
/// stratified from mu; blocks are the d x d array of N x N compressions.
struct CompressedModel {
    int d = 0, N = 0;
    Eigen::MatrixXcd X0;
    Eigen::MatrixXcd block(int i, int j) const; // N x N
};
CompressedModel compressed_entries(const CompactMeasure& mu, int d, int N,
                                   std::uint64_t seed);

struct FisherEstimate {
    double value = 0.0;
    double stderr_boot = 0.0;
    double bandwidth = 0.0;
    int n = 0;
    bool degenerate = false; // constant sample: value is +inf
};

struct BandwidthPolicy {
    double factor = 1.0;                 // multiplies the Silverman rule
    std::optional<double> override_h;    // absolute bandwidth instead
};

/// kappa * int rho_hat^3 with a Gaussian KDE, reflection at declared support
/// bounds, and a bootstrap standard error.
FisherEstimate empirical_fisher(const SpectralSample& s, double kappa,
                                BandwidthPolicy policy = {},
                                std::optional<std::pair<double, double>> support =
                                    std::nullopt,
                                int bootstrap = 40, std::uint64_t seed = 17);

struct LogEnergyEstimate {
    double value = 0.0;
    int ties_jittered = 0;
};

/// (1/N^2) sum_{i != j} log|l_i - l_j|; ties jittered by 1e-12 relative and
/// reported.  The self-pair omission is the finite-N bias of this surrogate.
LogEnergyEstimate empirical_log_energy(const SpectralSample& s);

/// Kolmogorov-Smirnov distance against a CDF.
double ks_distance(const SpectralSample& s,
                   const std::function<double(double)>& cdf);

/// CDF of the radius-r semicircle law.
double semicircle_cdf(double r, double t);

/// Normalized traces of all words in {M, M*} up to the given length, in the
/// order: index words by bit patterns per length (bit 0 = first letter, set
/// bit means starred letter).  Lengths 1..max_len concatenated.
std::vector<std::complex<double>> word_traces(const Eigen::MatrixXcd& M,
                                              int max_len);

/// Enumerates the (length, bits) labels matching word_traces order.
std::vector<std::pair<int, std::uint32_t>> word_trace_labels(int max_len);

} // namespace freeprob::rmt
