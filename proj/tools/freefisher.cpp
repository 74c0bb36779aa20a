// Command-line front end: measure calculus, information functionals,
// symbolic verification suites, theorem-bound tables and Monte Carlo
// experiments, with a JSON manifest for every run.

#include <chrono>
#include <complex>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "freeprob/checks.hpp"
#include "freeprob/conjugates.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/functional.hpp"
#include "freeprob/functionals.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/rmt.hpp"

using namespace freeprob;
using nlohmann::json;
using Cplx = std::complex<double>;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Manifest {
    std::string command;
    json params = json::object();
    double kappa = default_kappa();
    std::vector<std::uint64_t> seeds;
    json outputs = json::array();

    void add(const std::string& name, double value, const std::string& provenance) {
        outputs.push_back({{"name", name}, {"value", value}, {"provenance", provenance}});
        std::cout << "  " << std::left << std::setw(34) << name << " "
                  << std::setprecision(12) << value << "\n";
    }
    void add_json(const std::string& name, const json& value,
                  const std::string& provenance) {
        outputs.push_back({{"name", name}, {"value", value}, {"provenance", provenance}});
    }

    json to_json() const {
        auto now = std::chrono::system_clock::now();
        std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[64];
        std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
        return json{{"command", command}, {"params", params},
                    {"kappa", kappa},     {"seeds", seeds},
                    {"tool_version", kVersion}, {"timestamp", buf},
                    {"outputs", outputs}};
    }
};

void emit_manifest(const Manifest& m, const std::string& out_path) {
    json j = m.to_json();
    if (out_path.empty()) {
        std::cout << "manifest: " << j.dump() << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw input_error("cannot write manifest to '" + out_path + "'");
        out << j.dump(2) << "\n";
        std::cout << "manifest written to " << out_path << "\n";
    }
}

void write_csv(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write csv to '" + path + "'");
    out << std::setprecision(17);
    for (double v : values) out << v << "\n";
}

// scalar-mode selection: exact rationals when the measure allows it
bool pick_rational(const CompactMeasure& mu, bool force_rational, bool force_float) {
    if (force_float) return false;
    if (force_rational) {
        if (!mu.has_exact_moments())
            throw input_error("--rational requires a measure with exact moments");
        return true;
    }
    return mu.has_exact_moments();
}

struct VerifyOutcome {
    ViolationReport report;
    double tolerance;
    std::string label;
};

// the sweeps run either on the r-diagonal element built from the a*a law, or
// on a selfadjoint element with the given distribution (the counterexample
// route: e.g. a shifted semicircular violates at n = 1)
template <class S>
GenId add_sweep_element(FunctionalBuilder<S>& b, const CompactMeasure& nu,
                        const std::string& model, int max_moment) {
    if (model == "rdiagonal") {
        if (!nu.nonnegative_support())
            throw input_error("the a*a law must be supported in [0,inf)");
        return b.add_rdiagonal("a", measure_moments<S>(nu, max_moment));
    }
    if (model == "selfadjoint")
        return b.add_selfadjoint("a", measure_moments<S>(nu, 2 * max_moment));
    throw input_error("unknown verify model '" + model + "'");
}

template <class S>
VerifyOutcome run_lemma39(const CompactMeasure& nu, const std::string& model,
                          int degree, int kmax) {
    FunctionalBuilder<S> b(64);
    GenId a = add_sweep_element(b, nu, model, 2 * degree * kmax + 4);
    auto f = b.build();
    auto rep = check_alternating_vanishing(f, a, degree, kmax);
    return {rep, rep.default_tolerance(), "lemma39 alternating centered words"};
}

template <class S>
VerifyOutcome run_prop38(const CompactMeasure& nu, const std::string& model,
                         int degree, int kmax) {
    FunctionalBuilder<S> b(64);
    GenId a = add_sweep_element(b, nu, model, 2 * degree * kmax + 4);
    auto f = b.build();
    auto rep = check_amalgamated_freeness_D(f, a, degree, kmax);
    return {rep, rep.default_tolerance(), "prop38 amalgamated freeness over D"};
}

template <class S>
VerifyOutcome run_prop51(const CompactMeasure& nu, int degree) {
    using T = scalar_traits<S>;
    if (!nu.nonnegative_support())
        throw input_error("the a*a law must be supported in [0,inf)");
    FunctionalBuilder<S> b(64);
    GenId c = b.add_rdiagonal("c", measure_moments<S>(nu, 2 * degree + 4));
    GenId a = b.add_selfadjoint(
        "a", measure_moments<S>(CompactMeasure::semicircle(2.0), 4 * degree + 4));
    auto f = b.build();
    PolyMatrix<S> A(2), Sm(2);
    A.at(0, 1) = Polynomial<S>::from_letter(a, false);
    A.at(1, 0) = Polynomial<S>::from_letter(a, true);
    Sm = block_embed<S>(c);
    auto slotsA = centered_powers(f, A, degree, "A");
    auto slotsS = centered_powers(f, Sm, degree, "S");
    auto rep = check_matrix_freeness(f, slotsA, slotsS, degree);
    return {rep, rep.default_tolerance(), "prop51 freeness of the block matrices"};
}

template <class S>
VerifyOutcome run_prop36(int degree) {
    using T = scalar_traits<S>;
    FunctionalBuilder<S> b(64);
    GenId a = b.add_circular("c", T::one(), 2 * degree + 4);
    auto f = b.build();
    auto A = block_embed<S>(a);
    PolyMatrix<S> X(2);
    X.at(0, 1) = Polynomial<S>::from_letter(a, false);
    X.at(1, 0) = Polynomial<S>::from_letter(a, true);
    auto rep = verify_conjugate_eta(f, A, X, EtaMode::FullScalar, degree);
    return {rep, rep.default_tolerance(), "prop36 eta relations over scalar matrices"};
}

template <class S>
VerifyOutcome run_prop37(int degree) {
    using T = scalar_traits<S>;
    FunctionalBuilder<S> b(64);
    GenId a = b.add_circular("c", T::one(), 2 * degree + 4);
    auto f = b.build();
    auto A = block_embed<S>(a);
    PolyMatrix<S> X(2);
    X.at(0, 1) = Polynomial<S>::from_letter(a, false);
    X.at(1, 0) = Polynomial<S>::from_letter(a, true);
    auto rep = verify_conjugate_eta(f, A, X, EtaMode::Diagonal, degree);
    return {rep, rep.default_tolerance(), "prop37 eta0 relations over the diagonal"};
}

template <class S>
VerifyOutcome run_prop41(int degree) {
    using T = scalar_traits<S>;
    FunctionalBuilder<S> b(64);
    std::vector<GenId> cs;
    for (const char* n : {"c11", "c12", "c21", "c22"})
        cs.push_back(b.add_circular(n, T::one(), 2 * degree + 4));
    auto f = b.build();
    PolyMatrix<S> C(2);
    C.at(0, 0) = Polynomial<S>::from_letter(cs[0]);
    C.at(0, 1) = Polynomial<S>::from_letter(cs[1]);
    C.at(1, 0) = Polynomial<S>::from_letter(cs[2]);
    C.at(1, 1) = Polynomial<S>::from_letter(cs[3]);
    auto X = C.adjoint().scaled(scalar_traits<S>::div_int(T::one(), 2));
    auto rep = verify_matrix_conjugate(f, C, X, degree);
    return {rep, rep.default_tolerance(), "prop41 matrix conjugate relations"};
}

template <class S>
VerifyOutcome run_lemma54(int degree) {
    using T = scalar_traits<S>;
    FunctionalBuilder<S> b(64);
    std::vector<GenId> cs;
    for (const char* n : {"c11", "c12", "c21", "c22"})
        cs.push_back(b.add_circular(n, T::one(), 2 * degree + 4));
    auto f = b.build();
    PolyMatrix<S> C(2);
    C.at(0, 0) = Polynomial<S>::from_letter(cs[0]);
    C.at(0, 1) = Polynomial<S>::from_letter(cs[1]);
    C.at(1, 0) = Polynomial<S>::from_letter(cs[2]);
    C.at(1, 1) = Polynomial<S>::from_letter(cs[3]);
    S half = scalar_traits<S>::div_int(T::one(), 2);
    S mi_half = scalar_traits<S>::div_int(-T::imaginary_unit(), 2);
    auto S1 = (C + C.adjoint()).scaled(half);
    auto S2 = (C - C.adjoint()).scaled(mi_half);
    auto rep = verify_selfconjugate_family(f, {S1, S2}, degree);
    return {rep, rep.default_tolerance(), "lemma54 self-conjugate family"};
}

int finish_verify(const VerifyOutcome& v, Manifest& man, const std::string& out) {
    man.add("max_abs_violation", v.report.max_abs_violation, v.label);
    man.add("relations_checked", static_cast<double>(v.report.relations_checked),
            v.label);
    man.add_json("report", v.report.to_json(), v.label);
    bool ok = v.report.ok(v.tolerance);
    std::cout << (ok ? "PASS" : "FAIL") << ": " << v.label
              << (v.report.exact_mode ? " (exact arithmetic)" : " (float)") << "\n";
    if (!ok && !v.report.witness.empty())
        std::cout << "  witness: " << v.report.witness << "\n";
    emit_manifest(man, out);
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"free Fisher information and free entropy toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path, csv_path;
    std::uint64_t seed = 1;
    bool force_rational = false, force_float = false;
    double kappa = default_kappa();
    app.add_option("--out", out_path, "write the JSON manifest here");
    app.add_option("--csv", csv_path, "write spectral samples here");
    app.add_option("--seed", seed, "master seed");
    app.add_flag("--rational", force_rational, "force exact rational mode");
    app.add_flag("--float", force_float, "force floating-point mode");
    app.add_option("--kappa", kappa, "Fisher normalization constant");

    // measure subcommand
    auto* m_cmd = app.add_subcommand("measure", "measure-level constructions");
    std::string m_op, m_mu;
    double m_lambda = 1.0;
    int m_maxorder = 8;
    m_cmd->add_option("op", m_op, "sqrt|square|dilate|moments")->required();
    m_cmd->add_option("--mu", m_mu, "measure spec or file")->required();
    m_cmd->add_option("--lambda", m_lambda, "dilation factor");
    m_cmd->add_option("--max-order", m_maxorder, "highest moment order");

    auto* f_cmd = app.add_subcommand("fisher", "free Fisher information of a measure");
    std::string f_mu;
    f_cmd->add_option("measure", f_mu, "measure spec or file")->required();

    auto* e_cmd = app.add_subcommand("entropy", "free entropy of a measure");
    std::string e_mu;
    e_cmd->add_option("measure", e_mu, "measure spec or file")->required();

    auto* b_cmd = app.add_subcommand("bound", "theorem right-hand sides");
    std::string b_thm, b_nu;
    int b_d = 1;
    double b_value = 0.0;
    b_cmd->add_option("--theorem", b_thm, "T11|T13|T14|T12_1|T12_2|T15_1|T15_2")
        ->required();
    b_cmd->add_option("--nu", b_nu, "measure spec or file");
    b_cmd->add_option("--d", b_d, "matrix size");
    b_cmd->add_option("--value", b_value, "scalar input for T12_*/T15_*");

    auto* mo_cmd = app.add_subcommand("moments", "evaluate a *-moment word");
    std::string mo_model = "rdiagonal", mo_nu, mo_word;
    mo_cmd->add_option("--model", mo_model, "rdiagonal|haar|measure");
    mo_cmd->add_option("--nu", mo_nu, "measure spec or file");
    mo_cmd->add_option("--word", mo_word, "word like \"a a* a a*\"")->required();

    auto* v_cmd = app.add_subcommand("verify", "symbolic verification suites");
    std::string v_suite, v_nu;
    int v_degree = -1, v_kmax = 3;
    v_cmd->add_option("suite", v_suite,
                      "lemma39|prop38|prop51|prop36|prop37|prop41|lemma54")
        ->required();
    v_cmd->add_option("--nu", v_nu, "measure spec or file");
    v_cmd->add_option("--degree", v_degree, "sweep degree");
    v_cmd->add_option("--kmax", v_kmax, "power bound for w-blocks");
    std::string v_model = "rdiagonal";
    v_cmd->add_option("--model", v_model,
                      "rdiagonal (nu is the a*a law) | selfadjoint (nu is the law of a)");

    auto* s_cmd = app.add_subcommand("simulate", "random-matrix experiments");
    std::string s_model, s_nu;
    int s_N = 512, s_seeds = 1, s_d = 2;
    s_cmd->add_option("model", s_model, "rdiagonal|compress|blockembed")->required();
    s_cmd->add_option("--nu", s_nu, "measure spec or file")->required();
    s_cmd->add_option("--N", s_N, "matrix size");
    s_cmd->add_option("--seeds", s_seeds, "number of independent seeds");
    s_cmd->add_option("--d", s_d, "compression block count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        Manifest man;
        man.kappa = kappa;
        man.seeds = {seed};

        if (m_cmd->parsed()) {
            man.command = "measure " + m_op;
            man.params = {{"mu", m_mu}, {"lambda", m_lambda}, {"max_order", m_maxorder}};
            auto mu = CompactMeasure::parse_spec(m_mu);
            if (m_op == "moments") {
                for (int k = 0; k <= m_maxorder; ++k)
                    man.add("m_" + std::to_string(k), mu.moment(k), "quadrature");
            } else {
                CompactMeasure derived = mu;
                if (m_op == "sqrt")
                    derived = mu.symmetric_square_root();
                else if (m_op == "square")
                    derived = mu.push_square();
                else if (m_op == "dilate")
                    derived = mu.dilate(m_lambda);
                else
                    throw input_error("unknown measure op '" + m_op + "'");
                man.add_json("measure", derived.to_json(), "measure construction");
                std::cout << derived.to_json().dump(2) << "\n";
            }
            emit_manifest(man, out_path);
            return 0;
        }

        if (f_cmd->parsed()) {
            man.command = "fisher";
            man.params = {{"measure", f_mu}};
            auto mu = CompactMeasure::parse_spec(f_mu);
            man.add("fisher", fisher_of_measure(mu, kappa), "kappa * int rho^3");
            emit_manifest(man, out_path);
            return 0;
        }

        if (e_cmd->parsed()) {
            man.command = "entropy";
            man.params = {{"measure", e_mu}};
            auto mu = CompactMeasure::parse_spec(e_mu);
            man.add("entropy", entropy_of_measure(mu),
                    "log energy + 3/4 + log(2 pi)/2");
            man.add("log_energy", log_energy(mu), "double log-kernel integral");
            emit_manifest(man, out_path);
            return 0;
        }

        if (b_cmd->parsed()) {
            man.command = "bound";
            man.params = {{"theorem", b_thm}, {"nu", b_nu}, {"d", b_d},
                          {"value", b_value}};
            TheoremId id = theorem_id_from_string(b_thm);
            std::optional<CompactMeasure> nu;
            if (!b_nu.empty()) nu = CompactMeasure::parse_spec(b_nu);
            auto tb = theorem_bound(id, nu ? &*nu : nullptr, b_d, b_value, kappa);
            man.add(b_thm, tb.value, tb.formula_trace);
            emit_manifest(man, out_path);
            return 0;
        }

        if (mo_cmd->parsed()) {
            man.command = "moments";
            man.params = {{"model", mo_model}, {"nu", mo_nu}, {"word", mo_word}};
            std::optional<CompactMeasure> nu;
            if (!mo_nu.empty()) nu = CompactMeasure::parse_spec(mo_nu);
            bool rational =
                nu ? pick_rational(*nu, force_rational, force_float) : !force_float;
            auto run = [&](auto tag) -> double {
                using S = decltype(tag);
                FunctionalBuilder<S> b(16);
                if (mo_model == "rdiagonal") {
                    if (!nu) throw input_error("rdiagonal model needs --nu");
                    if (!nu->nonnegative_support())
                        throw input_error("the a*a law must be supported in [0,inf)");
                    b.add_rdiagonal("a", measure_moments<S>(*nu, 16));
                } else if (mo_model == "haar") {
                    b.add_haar_unitary("u");
                } else if (mo_model == "measure") {
                    if (!nu) throw input_error("measure model needs --nu");
                    b.add_selfadjoint("x", measure_moments<S>(*nu, 32));
                } else {
                    throw input_error("unknown model '" + mo_model + "'");
                }
                auto f = b.build();
                auto value = f.evaluate(f.parse_word(mo_word));
                return scalar_traits<S>::to_complex(value).real();
            };
            double value = rational ? run(Exact{}) : run(Cplx{});
            man.add("phi", value, rational ? "exact evaluation" : "float evaluation");
            emit_manifest(man, out_path);
            return 0;
        }

        if (v_cmd->parsed()) {
            man.command = "verify " + v_suite;
            CompactMeasure nu = v_nu.empty() ? CompactMeasure::quartercircle(4.0)
                                             : CompactMeasure::parse_spec(v_nu);
            bool rational = pick_rational(nu, force_rational, force_float);
            man.params = {{"suite", v_suite}, {"nu", v_nu},
                          {"degree", v_degree}, {"kmax", v_kmax},
                          {"model", v_model}, {"rational", rational}};
            auto dispatch = [&](auto tag) -> VerifyOutcome {
                using S = decltype(tag);
                int deg = v_degree;
                if (v_suite == "lemma39")
                    return run_lemma39<S>(nu, v_model, deg < 0 ? 4 : deg, v_kmax);
                if (v_suite == "prop38")
                    return run_prop38<S>(nu, v_model, deg < 0 ? 3 : deg,
                                         std::min(v_kmax, 2));
                if (v_suite == "prop51") return run_prop51<S>(nu, deg < 0 ? 8 : deg);
                if (v_suite == "prop36") return run_prop36<S>(deg < 0 ? 6 : deg);
                if (v_suite == "prop37") return run_prop37<S>(deg < 0 ? 8 : deg);
                if (v_suite == "prop41") return run_prop41<S>(deg < 0 ? 5 : deg);
                if (v_suite == "lemma54") return run_lemma54<S>(deg < 0 ? 4 : deg);
                throw input_error("unknown verify suite '" + v_suite + "'");
            };
            VerifyOutcome v = rational ? dispatch(Exact{}) : dispatch(Cplx{});
            return finish_verify(v, man, out_path);
        }

        if (s_cmd->parsed()) {
            man.command = "simulate " + s_model;
            man.params = {{"model", s_model}, {"nu", s_nu}, {"N", s_N},
                          {"seeds", s_seeds}, {"d", s_d}};
            man.seeds.clear();
            for (int t = 0; t < s_seeds; ++t)
                man.seeds.push_back(rmt::substream(seed, t));
            auto nu = CompactMeasure::parse_spec(s_nu);
            std::vector<double> all_values;

            if (s_model == "rdiagonal" || s_model == "blockembed") {
                auto mu = nu.symmetric_square_root();
                double ks_acc = 0.0, fi_acc = 0.0, le_acc = 0.0, id_max = 0.0;
                for (int t = 0; t < s_seeds; ++t) {
                    auto A = rmt::rdiagonal_matrix(s_N, nu, man.seeds[t]);
                    auto spec = rmt::block_embed_spectrum(A.mat);
                    all_values.insert(all_values.end(), spec.values.begin(),
                                      spec.values.end());
                    ks_acc += rmt::ks_distance(
                        spec, [&mu](double t2) { return mu.cdf(t2); });
                    auto fi = rmt::empirical_fisher(
                        spec, kappa, {}, {{-mu.radius(), mu.radius()}}, 20,
                        man.seeds[t]);
                    fi_acc += fi.value;
                    le_acc += rmt::empirical_log_energy(spec).value;
                    if (s_model == "blockembed") {
                        auto eig = rmt::eigenvalues_selfadjoint(
                            rmt::block_embed_matrix(A.mat));
                        for (std::size_t i = 0; i < eig.values.size(); ++i)
                            id_max = std::max(id_max, std::abs(eig.values[i] -
                                                               spec.values[i]));
                    }
                }
                man.add("ks_mean", ks_acc / s_seeds, "block spectrum vs sqrt(nu) cdf");
                man.add("empirical_fisher_mean", fi_acc / s_seeds, "kde estimate");
                man.add("empirical_log_energy_mean", le_acc / s_seeds,
                        "pair sum, self terms omitted");
                if (s_model == "blockembed")
                    man.add("eig_vs_singular_max_gap", id_max,
                            "exact block-embedding identity");
            } else if (s_model == "compress") {
                double m2_acc = 0.0, mixed_acc = 0.0;
                for (int t = 0; t < s_seeds; ++t) {
                    auto cm = rmt::compressed_entries(nu, s_d, s_N, man.seeds[t]);
                    int Nd = s_N * s_d;
                    m2_acc += (cm.X0 * cm.X0).trace().real() / Nd;
                    Eigen::MatrixXcd V11 = Eigen::MatrixXcd::Zero(Nd, Nd);
                    V11.topLeftCorner(s_N, s_N) =
                        Eigen::MatrixXcd::Identity(s_N, s_N);
                    Eigen::MatrixXcd V22 = Eigen::MatrixXcd::Zero(Nd, Nd);
                    V22.block(s_N, s_N, s_N, s_N) =
                        Eigen::MatrixXcd::Identity(s_N, s_N);
                    mixed_acc +=
                        (cm.X0 * V11 * cm.X0 * V22).trace().real() / Nd;
                    auto eig = rmt::eigenvalues_selfadjoint(cm.X0);
                    all_values.insert(all_values.end(), eig.values.begin(),
                                      eig.values.end());
                }
                man.add("m2_mean", m2_acc / s_seeds, "normalized trace of X0^2");
                man.add("mixed_word_mean", mixed_acc / s_seeds,
                        "phi(B V11 B V22) surrogate");
            } else {
                throw input_error("unknown simulate model '" + s_model + "'");
            }
            if (!csv_path.empty()) write_csv(csv_path, all_values);
            emit_manifest(man, out_path);
            return 0;
        }
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const resource_error& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return 4;
    } catch (const numerics_error& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (achieved " << e.achieved_tolerance << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
