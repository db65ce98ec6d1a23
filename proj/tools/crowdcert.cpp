// crowdcert command line: aggregation runs, optimality certificates,
// synthetic dataset generation, and grid sweeps. See README.md for the file
// formats; all outputs are deterministic given the flags (including seeds).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crowdcert/crowdcert.hpp"

using nlohmann::json;
using namespace crowdcert;

namespace {

CLI::App* g_app = nullptr;

// Options of the invoked subcommand, merged with any config file and
// serialized back to INI for provenance.
std::string config_echo() {
    CLI::App* node = g_app;
    std::string prefix;
    while (node) {
        auto parsed = node->get_subcommands([](CLI::App* s) { return s->parsed(); });
        if (parsed.empty()) break;
        prefix += parsed.front()->get_name() + " ";
        node = parsed.front();
    }
    if (!node || node == g_app) return std::string();
    std::string body = node->config_to_str(true, false);
    std::string out;
    for (std::size_t start = 0; start < body.size();) {
        std::size_t end = body.find('\n', start);
        if (end == std::string::npos) end = body.size();
        if (end > start) out += prefix + body.substr(start, end - start) + "\n";
        start = end + 1;
    }
    return out;
}

json certificate_json(const Certificate& cert) {
    json j;
    j["verdict"] = verdict_name(cert.verdict);
    j["f_bound"] = cert.f_bound;
    j["g_value"] = cert.g_value;
    j["h_bound"] = cert.h_bound;
    j["lower_margin"] = cert.g_value - cert.f_bound;
    j["upper_margin"] = cert.h_bound - cert.g_value;
    if (cert.psi) j["psi"] = *cert.psi;
    if (cert.chi) j["chi"] = *cert.chi;
    if (cert.confidence) j["confidence"] = *cert.confidence;
    j["notes"] = cert.notes;
    return j;
}

json matrix_json(const TransitionMatrix& t) { return json(t.entries); }

// JSON doc goes to the file when a path is set, otherwise to stdout; the
// human one-liner is printed only when the doc went to a file.
void emit(const json& doc, const std::string& out_path, const std::string& summary) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    auto out = detail::open_out(out_path);
    out << doc.dump(2) << '\n';
    std::cout << summary << '\n';
}

std::string meta_path_for(const std::string& out_path, const std::string& explicit_meta) {
    return explicit_meta.empty() ? out_path + ".meta.json" : explicit_meta;
}

std::string cert_summary(const char* kind, const Certificate& cert) {
    std::string s = std::string(kind) + ": " + verdict_name(cert.verdict) + " (f " +
                    format_human(cert.f_bound) + ", g " + format_human(cert.g_value) + ", h " +
                    format_human(cert.h_bound) + ")";
    return s;
}

// Accuracy over the tasks that do have gold; returns (accuracy, covered).
std::pair<double, int> partial_accuracy(const AnnotationSet& data,
                                        const AggregationResult& result) {
    int covered = 0, correct = 0;
    for (int t = 0; t < data.num_tasks(); ++t) {
        if (data.gold[t] < 0) continue;
        ++covered;
        if (result.labels[t] == data.gold[t]) ++correct;
    }
    if (covered == 0) throw Error(Errc::MissingGold, "gold file covers no tasks");
    return {(double)correct / covered, covered};
}

struct AggregateArgs {
    std::string method, annotations, gold, t_matrix, prior, out = "labels.csv", meta, format = "csv";
    int max_iters = 100;
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

void run_aggregate(const AggregateArgs& a) {
    const AnnotationSet data = load_dataset(a.annotations, a.gold);
    EmConfig cfg;
    cfg.max_iters = a.max_iters;
    cfg.tol = a.tol;
    cfg.seed = a.seed;

    AggregationResult result;
    json estimates;
    if (a.method == "mv") {
        result = majority_vote(data);
    } else if (a.method == "map") {
        if (a.t_matrix.empty() || a.prior.empty())
            throw Error(Errc::InvalidRange, "map needs --t-matrix and --prior");
        result = map_aggregate(data, read_matrix_csv(a.t_matrix), parse_prior(a.prior));
    } else if (a.method == "ds") {
        DsResult ds = dawid_skene_em(data, cfg);
        result = std::move(ds.result);
        estimates["nu_hat"] = ds.nu_hat.probs;
        json mats = json::array();
        for (const auto& m : ds.t_hat) mats.push_back(matrix_json(m));
        estimates["t_hat"] = std::move(mats);
        estimates["annotators"] = data.annotators;
    } else {
        result = iwmv(data, cfg);
    }

    json meta;
    meta["command"] = "aggregate";
    meta["method"] = result.method_name;
    meta["num_tasks"] = data.num_tasks();
    meta["num_annotators"] = data.num_annotators();
    meta["metadata"] = result.metadata;
    if (!estimates.empty()) meta["estimates"] = std::move(estimates);
    meta["effective_config"] = config_echo();

    std::string summary = result.method_name + ": " + std::to_string(data.num_tasks()) + " tasks";
    if (data.has_gold()) {
        const auto [acc, covered] = partial_accuracy(data, result);
        meta["accuracy"] = acc;
        meta["accuracy_tasks"] = covered;
        summary += ", accuracy " + format_human(acc);
    }

    if (a.format == "json") {
        json labels = json::array();
        for (int t = 0; t < data.num_tasks(); ++t)
            labels.push_back({{"task_id", data.tasks[t]}, {"label", result.labels[t]}});
        auto out = detail::open_out(a.out);
        out << json{{"labels", std::move(labels)}}.dump(2) << '\n';
    } else {
        write_labels_csv(a.out, data, result);
    }
    emit(meta, meta_path_for(a.out, a.meta), summary + " -> " + a.out);
}

struct SimulateArgs {
    int n = 0, h = 0, size_a = 0, size_b = 0;
    double t00 = 0, t11 = 0, nu0 = 0, sigma = 0;
    double a00 = 0, a11 = 0, b00 = 0, b11 = 0;
    std::string t_matrix, prior;
    std::uint64_t seed = 0;
    std::string out_annotations = "annotations.csv", out_gold = "gold.csv", meta;
};

void write_dataset(const SimulateArgs& a, const AnnotationSet& data, json meta,
                   const char* kind) {
    write_annotations_csv(a.out_annotations, data);
    write_gold_csv(a.out_gold, data);
    meta["command"] = std::string("simulate ") + kind;
    meta["num_tasks"] = data.num_tasks();
    meta["num_annotators"] = data.num_annotators();
    meta["seed"] = a.seed;
    meta["effective_config"] = config_echo();
    const std::string summary = std::string(kind) + ": wrote " +
                                std::to_string(data.num_tasks()) + " tasks x " +
                                std::to_string(data.num_annotators()) + " annotators -> " +
                                a.out_annotations + ", " + a.out_gold;
    emit(meta, meta_path_for(a.out_annotations, a.meta), summary);
}

void run_sim_fixed(const SimulateArgs& a, bool has_matrix) {
    TransitionMatrix t;
    ClassPrior prior;
    if (has_matrix) {
        if (a.prior.empty()) throw Error(Errc::InvalidRange, "--t-matrix needs --prior");
        t = read_matrix_csv(a.t_matrix);
        prior = parse_prior(a.prior);
    } else {
        t = TransitionMatrix::binary(a.t00, a.t11);
        prior = ClassPrior::binary(a.nu0);
    }
    const AnnotationSet data = gen_fixed(a.n, prior, t, a.h, a.seed);
    json meta;
    meta["t"] = matrix_json(t);
    meta["prior"] = prior.probs;
    write_dataset(a, data, std::move(meta), "fixed");
}

void run_sim_perturbed(const SimulateArgs& a) {
    const TransitionMatrix t = TransitionMatrix::binary(a.t00, a.t11);
    const ClassPrior prior = ClassPrior::binary(a.nu0);
    const PerturbedData gen = gen_perturbed(a.n, prior, t, a.h, a.sigma, a.seed);
    json meta;
    meta["t"] = matrix_json(t);
    meta["prior"] = prior.probs;
    meta["sigma"] = a.sigma;
    json mats = json::array();
    for (const auto& m : gen.matrices) mats.push_back(matrix_json(m));
    meta["realized_matrices"] = std::move(mats);
    write_dataset(a, gen.data, std::move(meta), "perturbed");
}

void run_sim_two_groups(const SimulateArgs& a) {
    const TransitionMatrix t_a = TransitionMatrix::binary(a.a00, a.a11);
    const TransitionMatrix t_b = TransitionMatrix::binary(a.b00, a.b11);
    const ClassPrior prior = ClassPrior::binary(a.nu0);
    const PerturbedData gen = gen_two_groups(a.n, prior, t_a, t_b, a.size_a, a.size_b, a.seed);
    json meta;
    meta["t_a"] = matrix_json(t_a);
    meta["t_b"] = matrix_json(t_b);
    meta["size_a"] = a.size_a;
    meta["size_b"] = a.size_b;
    meta["prior"] = prior.probs;
    write_dataset(a, gen.data, std::move(meta), "two-groups");
}

struct SweepArgs {
    std::vector<double> nu0s, t00s, t11s;
    std::vector<int> hs;
    std::string mode = "analytic", out = "grid.csv", meta, format = "csv";
    int n_samples = 0, threads = 0;
    std::uint64_t seed = 0;
    bool estimated = false;
    double anchor_fraction = 0.1;
};

json cell_json(const SweepCell& cell) {
    json j;
    j["nu0"] = cell.nu0;
    j["t00"] = cell.t00;
    j["t11"] = cell.t11;
    j["h"] = cell.h;
    j["gap"] = cell.gap;
    j["verdict"] = verdict_name(cell.verdict);
    j["degenerate"] = cell.degenerate;
    if (cell.empirical_mv) j["empirical_mv"] = *cell.empirical_mv;
    if (cell.empirical_map) j["empirical_map"] = *cell.empirical_map;
    if (cell.estimated_verdict) j["estimated_verdict"] = verdict_name(*cell.estimated_verdict);
    if (!cell.error.empty()) j["error"] = cell.error;
    return j;
}

void run_sweep(const SweepArgs& a) {
    SweepSpec spec;
    spec.nu0_values = a.nu0s;
    spec.t00_values = a.t00s;
    spec.t11_values = a.t11s;
    spec.h_values = a.hs;
    spec.mode = a.mode == "monte-carlo" ? SweepMode::MONTE_CARLO : SweepMode::ANALYTIC;
    spec.n_samples = a.n_samples;
    spec.seed = a.seed;
    spec.estimated = a.estimated;
    spec.anchor_fraction = a.anchor_fraction;
    spec.num_threads = a.threads;
    const SweepGrid grid = sweep(spec);

    int optimal = 0, degenerate = 0, failed = 0;
    for (const SweepCell& cell : grid.cells) {
        if (cell.verdict == Verdict::MV_OPTIMAL) ++optimal;
        if (cell.degenerate) ++degenerate;
        if (!cell.error.empty()) ++failed;
    }

    if (a.format == "json") {
        json cells = json::array();
        for (const SweepCell& cell : grid.cells) cells.push_back(cell_json(cell));
        auto out = detail::open_out(a.out);
        out << json{{"cells", std::move(cells)}}.dump(2) << '\n';
    } else {
        write_sweep_csv(a.out, grid);
    }

    json meta;
    meta["command"] = "sweep";
    meta["cells"] = grid.cells.size();
    meta["mv_optimal"] = optimal;
    meta["degenerate"] = degenerate;
    meta["failed"] = failed;
    meta["mode"] = a.mode;
    meta["seed"] = a.seed;
    meta["effective_config"] = config_echo();
    const std::string summary = "sweep: " + std::to_string(grid.cells.size()) + " cells (" +
                                a.mode + "), " + std::to_string(optimal) + " MV_OPTIMAL, " +
                                std::to_string(degenerate) + " degenerate, " +
                                std::to_string(failed) + " failed -> " + a.out;
    emit(meta, meta_path_for(a.out, a.meta), summary);
}

struct CertifyEstimatedArgs {
    std::string annotations, anchors, out;
    double epsilon = 0, gamma = 0, eta = 0, xi = 0;
    int h = 0;
};

void run_certify_estimated(const CertifyEstimatedArgs& a) {
    const AnnotationSet data = load_dataset(a.annotations);
    std::vector<std::pair<int, int>> anchors;
    {
        std::unordered_map<std::string, int> index;
        for (int t = 0; t < data.num_tasks(); ++t) index.emplace(data.tasks[t], t);
        for (const auto& [task, label] : read_gold_csv(a.anchors)) {
            auto it = index.find(task);
            if (it == index.end())
                throw Error(Errc::InvalidRange, "anchor refers to unknown task " + task);
            anchors.emplace_back(it->second, label);
        }
    }
    const EstimatedParams est = estimate_params(data, anchors, a.epsilon, a.gamma);
    const int h = a.h > 0 ? a.h : data.num_annotators();
    const Certificate cert = check_estimated(est, h, a.eta, a.xi, data.num_tasks());

    json doc = certificate_json(cert);
    doc["command"] = "certify estimated";
    doc["t_hat"] = matrix_json(est.t_hat);
    doc["nu_noisy_hat"] = est.nu_noisy_hat;
    doc["nu_tilde"] = est.nu_tilde;
    doc["lambda_min"] = est.condition.lambda_min;
    doc["epsilon"] = est.epsilon;
    doc["gamma"] = est.gamma;
    doc["h"] = h;
    doc["n"] = data.num_tasks();
    doc["effective_config"] = config_echo();
    emit(doc, a.out, cert_summary("estimated", cert));
}

struct OracleArgs {
    double t00 = 0, t11 = 0, nu0 = 0;
    int h = 0;
    std::string out;
};

int run_oracle_check(const OracleArgs& a) {
    const BinaryNoiseParams p(a.h, a.t00, a.t11, a.nu0);
    const OracleResult oracle = brute_force_oracle(p);

    json doc;
    doc["command"] = "oracle-check";
    doc["brute_force"] = {{"p_mv", oracle.p_mv},
                          {"p_map", oracle.p_map},
                          {"mv_diag", oracle.mv_diag},
                          {"map_diag", oracle.map_diag}};
    if (oracle.map_is_best_rule) doc["map_is_best_rule"] = *oracle.map_is_best_rule;

    double max_diff = std::abs(success_probability(mv_diag(a.h, a.t00), mv_diag(a.h, a.t11),
                                                   a.nu0) -
                               oracle.p_mv);
    bool degenerate = false;
    try {
        const double closed_map =
            success_probability(omap_diag(p, 0), omap_diag(p, 1), a.nu0);
        doc["closed_form"] = {{"p_mv", success_probability(mv_diag(a.h, a.t00),
                                                           mv_diag(a.h, a.t11), a.nu0)},
                              {"p_map", closed_map},
                              {"gap", gap(p)}};
        max_diff = std::max(max_diff, std::abs(closed_map - oracle.p_map));
    } catch (const Error& e) {
        if (e.code() != Errc::DegenerateThreshold) throw;
        degenerate = true;
        doc["degenerate"] = true;
        doc["notes"] = {std::string(e.what())};
    }
    doc["max_abs_diff"] = max_diff;
    doc["effective_config"] = config_echo();

    const bool ok = degenerate || max_diff <= 1e-12;
    emit(doc, a.out,
         std::string("oracle-check: ") + (ok ? "agree" : "MISMATCH") + " (max |diff| " +
             format_human(max_diff) + ")");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact success probabilities and optimality certificates for crowd label aggregation"};
    app.require_subcommand(1);
    // --h is an option on several subcommands, so help keeps only its long form
    app.set_help_flag("--help", "print help and exit");
    app.set_config("--config", "", "INI config file; command-line flags take precedence");
    app.allow_config_extras(false);
    int exit_code = 0;

    // aggregate
    AggregateArgs agg;
    auto* cmd_agg = app.add_subcommand("aggregate", "aggregate an annotation CSV into labels");
    cmd_agg->add_option("--method", agg.method, "mv, map, ds, or iwmv")
        ->required()
        ->check(CLI::IsMember({"mv", "map", "ds", "iwmv"}));
    cmd_agg->add_option("--annotations", agg.annotations, "CSV: task_id,annotator_id,label")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_agg->add_option("--gold", agg.gold, "CSV: task_id,label")->check(CLI::ExistingFile);
    cmd_agg->add_option("--t-matrix", agg.t_matrix, "CSV: C rows of C reals (map only)")
        ->check(CLI::ExistingFile);
    cmd_agg->add_option("--prior", agg.prior, "comma-separated prior, e.g. 0.5,0.5 (map only)");
    cmd_agg->add_option("--max-iters", agg.max_iters, "EM iteration cap (ds, iwmv)");
    cmd_agg->add_option("--tol", agg.tol, "EM parameter-change tolerance (ds)");
    cmd_agg->add_option("--seed", agg.seed, "seed recorded for reproducibility");
    cmd_agg->add_option("--out", agg.out, "output labels file");
    cmd_agg->add_option("--meta", agg.meta, "metadata JSON path (default <out>.meta.json)");
    cmd_agg->add_option("--format", agg.format, "labels file format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_agg->callback([&] { run_aggregate(agg); });

    // certify
    auto* cmd_cert = app.add_subcommand("certify", "check MV optimality conditions");
    cmd_cert->require_subcommand(1);

    struct {
        double rho = 0, nu0 = 0;
        std::string out;
    } onecoin;
    auto* cmd_one = cmd_cert->add_subcommand("one-coin", "symmetric flip noise (Theorem 3.1)");
    cmd_one->add_option("--rho", onecoin.rho, "flip probability")->required();
    cmd_one->add_option("--nu0", onecoin.nu0, "class-0 prior")->required();
    cmd_one->add_option("--out", onecoin.out, "certificate JSON path (default stdout)");
    cmd_one->callback([&] {
        const Certificate cert = check_one_coin(onecoin.rho, onecoin.nu0);
        json doc = certificate_json(cert);
        doc["command"] = "certify one-coin";
        doc["effective_config"] = config_echo();
        emit(doc, onecoin.out, cert_summary("one-coin", cert));
    });

    struct {
        double t00 = 0, t11 = 0, nu0 = 0;
        int h = 0;
        std::string out;
    } twocoin;
    auto* cmd_two = cmd_cert->add_subcommand("two-coin", "full binary condition (Theorem 3.2)");
    cmd_two->add_option("--t00", twocoin.t00, "P(report 0 | true 0)")->required();
    cmd_two->add_option("--t11", twocoin.t11, "P(report 1 | true 1)")->required();
    cmd_two->add_option("--nu0", twocoin.nu0, "class-0 prior")->required();
    cmd_two->add_option("--h", twocoin.h, "odd annotator count")->required();
    cmd_two->add_option("--out", twocoin.out, "certificate JSON path (default stdout)");
    cmd_two->callback([&] {
        const BinaryNoiseParams p(twocoin.h, twocoin.t00, twocoin.t11, twocoin.nu0);
        const Certificate cert = check_two_coin(p);
        json doc = certificate_json(cert);
        doc["command"] = "certify two-coin";
        try {
            doc["gap"] = gap(p);
        } catch (const Error& e) {
            if (e.code() != Errc::DegenerateThreshold) throw;
            doc["degenerate"] = true;
        }
        doc["effective_config"] = config_echo();
        emit(doc, twocoin.out, cert_summary("two-coin", cert));
    });

    CertifyEstimatedArgs estd;
    auto* cmd_est = cmd_cert->add_subcommand("estimated", "estimated parameters (Theorem 3.3)");
    cmd_est->add_option("--annotations", estd.annotations, "CSV: task_id,annotator_id,label")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_est->add_option("--anchors", estd.anchors, "CSV: task_id,label gold anchors")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_est->add_option("--epsilon", estd.epsilon, "assumed T-estimate error bound")->required();
    cmd_est->add_option("--gamma", estd.gamma, "T-estimate failure probability")->required();
    cmd_est->add_option("--eta", estd.eta, "prior interiority margin")->required();
    cmd_est->add_option("--xi", estd.xi, "diagonal distance from 1")->required();
    cmd_est->add_option("--h", estd.h, "odd annotator count (default: dataset width)");
    cmd_est->add_option("--out", estd.out, "certificate JSON path (default stdout)");
    cmd_est->callback([&] { run_certify_estimated(estd); });

    struct {
        double a00 = 0, a11 = 0, b00 = 0, b11 = 0, nu0 = 0;
        int h = 0, size_a = 0;
        std::string out;
    } twogrp;
    auto* cmd_grp = cmd_cert->add_subcommand("two-groups", "two annotator groups sharing rho");
    cmd_grp->add_option("--a00", twogrp.a00, "group A P(0|0)")->required();
    cmd_grp->add_option("--a11", twogrp.a11, "group A P(1|1)")->required();
    cmd_grp->add_option("--b00", twogrp.b00, "group B P(0|0)")->required();
    cmd_grp->add_option("--b11", twogrp.b11, "group B P(1|1)")->required();
    cmd_grp->add_option("--nu0", twogrp.nu0, "class-0 prior")->required();
    cmd_grp->add_option("--h", twogrp.h, "odd annotator count")->required();
    cmd_grp->add_option("--size-a", twogrp.size_a, "annotators in group A")->required();
    cmd_grp->add_option("--out", twogrp.out, "certificate JSON path (default stdout)");
    cmd_grp->callback([&] {
        const Certificate cert = check_two_groups(
            twogrp.h, twogrp.size_a, TransitionMatrix::binary(twogrp.a00, twogrp.a11),
            TransitionMatrix::binary(twogrp.b00, twogrp.b11), ClassPrior::binary(twogrp.nu0));
        json doc = certificate_json(cert);
        doc["command"] = "certify two-groups";
        doc["effective_config"] = config_echo();
        emit(doc, twogrp.out, cert_summary("two-groups", cert));
    });

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "generate synthetic annotation datasets");
    cmd_sim->require_subcommand(1);

    SimulateArgs simf;
    auto* cmd_fix = cmd_sim->add_subcommand("fixed", "one shared transition matrix");
    cmd_fix->add_option("--n", simf.n, "number of tasks")->required();
    cmd_fix->add_option("--h", simf.h, "annotators per task")->required();
    cmd_fix->add_option("--t00", simf.t00, "binary diagonal entry");
    cmd_fix->add_option("--t11", simf.t11, "binary diagonal entry");
    cmd_fix->add_option("--nu0", simf.nu0, "binary class-0 prior");
    auto* fix_matrix = cmd_fix->add_option("--t-matrix", simf.t_matrix, "matrix CSV (general C)")
                           ->check(CLI::ExistingFile);
    cmd_fix->add_option("--prior", simf.prior, "comma-separated prior (with --t-matrix)");
    cmd_fix->add_option("--seed", simf.seed, "generator seed");
    cmd_fix->add_option("--out-annotations", simf.out_annotations, "annotations CSV path");
    cmd_fix->add_option("--out-gold", simf.out_gold, "gold CSV path");
    cmd_fix->add_option("--meta", simf.meta, "metadata JSON path");
    cmd_fix->callback([&] { run_sim_fixed(simf, fix_matrix->count() > 0); });

    SimulateArgs simp;
    auto* cmd_pert = cmd_sim->add_subcommand("perturbed", "per-annotator uniform perturbation");
    cmd_pert->add_option("--n", simp.n, "number of tasks")->required();
    cmd_pert->add_option("--h", simp.h, "annotators per task")->required();
    cmd_pert->add_option("--t00", simp.t00, "base diagonal entry")->required();
    cmd_pert->add_option("--t11", simp.t11, "base diagonal entry")->required();
    cmd_pert->add_option("--nu0", simp.nu0, "class-0 prior")->required();
    cmd_pert->add_option("--sigma", simp.sigma, "perturbation half-width")->required();
    cmd_pert->add_option("--seed", simp.seed, "generator seed");
    cmd_pert->add_option("--out-annotations", simp.out_annotations, "annotations CSV path");
    cmd_pert->add_option("--out-gold", simp.out_gold, "gold CSV path");
    cmd_pert->add_option("--meta", simp.meta, "metadata JSON path");
    cmd_pert->callback([&] { run_sim_perturbed(simp); });

    SimulateArgs simg;
    auto* cmd_sgrp = cmd_sim->add_subcommand("two-groups", "two annotator groups");
    cmd_sgrp->add_option("--n", simg.n, "number of tasks")->required();
    cmd_sgrp->add_option("--a00", simg.a00, "group A P(0|0)")->required();
    cmd_sgrp->add_option("--a11", simg.a11, "group A P(1|1)")->required();
    cmd_sgrp->add_option("--b00", simg.b00, "group B P(0|0)")->required();
    cmd_sgrp->add_option("--b11", simg.b11, "group B P(1|1)")->required();
    cmd_sgrp->add_option("--nu0", simg.nu0, "class-0 prior")->required();
    cmd_sgrp->add_option("--size-a", simg.size_a, "annotators in group A")->required();
    cmd_sgrp->add_option("--size-b", simg.size_b, "annotators in group B")->required();
    cmd_sgrp->add_option("--seed", simg.seed, "generator seed");
    cmd_sgrp->add_option("--out-annotations", simg.out_annotations, "annotations CSV path");
    cmd_sgrp->add_option("--out-gold", simg.out_gold, "gold CSV path");
    cmd_sgrp->add_option("--meta", simg.meta, "metadata JSON path");
    cmd_sgrp->callback([&] { run_sim_two_groups(simg); });

    // sweep
    SweepArgs swp;
    auto* cmd_swp = app.add_subcommand("sweep", "evaluate the optimality grid");
    cmd_swp->add_option("--nu0", swp.nu0s, "nu0 grid values")->required()->delimiter(',');
    cmd_swp->add_option("--t00", swp.t00s, "t00 grid values")->required()->delimiter(',');
    cmd_swp->add_option("--t11", swp.t11s, "t11 grid values")->required()->delimiter(',');
    cmd_swp->add_option("--h", swp.hs, "odd H grid values")->required()->delimiter(',');
    cmd_swp->add_option("--mode", swp.mode, "analytic or monte-carlo")
        ->check(CLI::IsMember({"analytic", "monte-carlo"}));
    cmd_swp->add_option("--n-samples", swp.n_samples, "tasks per Monte-Carlo cell (>= 1000)");
    cmd_swp->add_option("--seed", swp.seed, "sweep seed");
    cmd_swp->add_flag("--estimated", swp.estimated, "re-run verdicts from estimated parameters");
    cmd_swp->add_option("--anchor-fraction", swp.anchor_fraction,
                        "fraction of tasks used as anchors (with --estimated)");
    cmd_swp->add_option("--threads", swp.threads,
                        "worker threads (0 = hardware; CROWDCERT_THREADS caps)");
    cmd_swp->add_option("--out", swp.out, "grid output path");
    cmd_swp->add_option("--meta", swp.meta, "metadata JSON path (default <out>.meta.json)");
    cmd_swp->add_option("--format", swp.format, "grid file format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_swp->callback([&] { run_sweep(swp); });

    // oracle-check
    OracleArgs orc;
    auto* cmd_orc = app.add_subcommand("oracle-check",
                                       "compare closed forms against the brute-force oracle");
    cmd_orc->add_option("--t00", orc.t00, "P(report 0 | true 0)")->required();
    cmd_orc->add_option("--t11", orc.t11, "P(report 1 | true 1)")->required();
    cmd_orc->add_option("--nu0", orc.nu0, "class-0 prior")->required();
    cmd_orc->add_option("--h", orc.h, "odd annotator count <= 15")->required();
    cmd_orc->add_option("--out", orc.out, "JSON output path (default stdout)");
    cmd_orc->callback([&] { exit_code = run_oracle_check(orc); });

    g_app = &app;
    auto tune_tree = [](CLI::App* node, auto&& self) -> void {
        node->set_help_flag("--help", "print help and exit");
        node->fallthrough(); // lets --config follow the subcommand name
        for (CLI::App* sub : node->get_subcommands(nullptr)) self(sub, self);
    };
    tune_tree(&app, tune_tree);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}
