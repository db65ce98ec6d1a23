#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "crowdcert/aggregate.hpp"
#include "crowdcert/certify.hpp"
#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"
#include "crowdcert/estimate.hpp"
#include "crowdcert/exact.hpp"
#include "crowdcert/rng.hpp"

namespace crowdcert {

enum class SweepMode { ANALYTIC, MONTE_CARLO };

// Cartesian grid over (nu0, t00, t11, H). Monte-Carlo cells additionally
// simulate n_samples tasks; `estimated` re-runs the verdict from
// anchor-estimated parameters on that sample.
struct SweepSpec {
    std::vector<double> nu0_values;
    std::vector<double> t00_values;
    std::vector<double> t11_values;
    std::vector<int> h_values;
    SweepMode mode = SweepMode::ANALYTIC;
    int n_samples = 0;
    std::uint64_t seed = 0;
    bool estimated = false;
    double anchor_fraction = 0.1;
    int num_threads = 0; // 0 = hardware concurrency, still capped by CROWDCERT_THREADS
};

struct SweepCell {
    double nu0 = 0.0, t00 = 0.0, t11 = 0.0;
    int h = 0;
    double gap = 0.0;
    Verdict verdict = Verdict::INCONCLUSIVE;
    bool degenerate = false;
    std::optional<double> empirical_mv;
    std::optional<double> empirical_map;
    std::optional<Verdict> estimated_verdict;
    std::string error; // empty when the cell evaluated cleanly
};

// Cells in row-major order: nu0 outermost, then t00, t11, H innermost.
struct SweepGrid {
    SweepSpec spec;
    std::vector<SweepCell> cells;
};

// Every task gets one label from each of H annotators, drawn from row y of T.
// Task ids t0..t{N-1}, annotator ids a0..a{H-1}, gold always attached.
inline AnnotationSet gen_fixed(int n, const ClassPrior& prior, const TransitionMatrix& t, int h,
                               std::uint64_t seed) {
    if (n < 1) throw Error(Errc::InvalidRange, "need at least one task");
    if (h < 1) throw Error(Errc::InvalidRange, "need at least one annotator");
    if (prior.num_classes() != t.num_classes())
        throw Error(Errc::InvalidRange, "prior and T disagree on class count");

    AnnotationSet data;
    data.num_classes = t.num_classes();
    data.tasks.reserve(n);
    data.labels.resize(n);
    data.gold.reserve(n);
    for (int j = 0; j < h; ++j) data.annotators.push_back("a" + std::to_string(j));

    Rng rng = Rng::stream(seed, "labels");
    for (int i = 0; i < n; ++i) {
        data.tasks.push_back("t" + std::to_string(i));
        const int y = rng.discrete(prior.probs);
        data.gold.push_back(y);
        data.labels[i].reserve(h);
        for (int j = 0; j < h; ++j) data.labels[i].emplace_back(j, rng.discrete(t.entries[y]));
    }
    return data;
}

struct PerturbedData {
    AnnotationSet data;
    std::vector<TransitionMatrix> matrices; // one per annotator
};

// Per-annotator T_h = T + s_h [[-1, 1], [1, -1]], s_h ~ Unif[-sigma, sigma].
// The sigma draws use their own stream, so sigma = 0 reproduces gen_fixed
// bit for bit.
inline PerturbedData gen_perturbed(int n, const ClassPrior& prior, const TransitionMatrix& t,
                                   int h, double sigma, std::uint64_t seed) {
    if (t.num_classes() != 2)
        throw Error(Errc::UnsupportedClassCount, "perturbation scheme is binary");
    if (n < 1) throw Error(Errc::InvalidRange, "need at least one task");
    if (h < 1) throw Error(Errc::InvalidRange, "need at least one annotator");
    if (sigma < 0.0) throw Error(Errc::InvalidRange, "sigma must be nonnegative");
    double margin = 1.0;
    for (const auto& row : t.entries)
        for (double e : row) margin = std::min({margin, e, 1.0 - e});
    if (sigma >= margin)
        throw Error(Errc::SigmaTooLarge, "sigma must stay below every entry's distance to {0,1}");

    Rng sigma_rng = Rng::stream(seed, "sigma");
    PerturbedData out;
    out.matrices.reserve(h);
    for (int j = 0; j < h; ++j) {
        const double s = sigma == 0.0 ? 0.0 : sigma_rng.uniform_sym(sigma);
        out.matrices.push_back(TransitionMatrix(
            {{t(0, 0) - s, t(0, 1) + s}, {t(1, 0) + s, t(1, 1) - s}}));
    }

    out.data.num_classes = 2;
    out.data.tasks.reserve(n);
    out.data.labels.resize(n);
    out.data.gold.reserve(n);
    for (int j = 0; j < h; ++j) out.data.annotators.push_back("a" + std::to_string(j));

    Rng rng = Rng::stream(seed, "labels");
    for (int i = 0; i < n; ++i) {
        out.data.tasks.push_back("t" + std::to_string(i));
        const int y = rng.discrete(prior.probs);
        out.data.gold.push_back(y);
        out.data.labels[i].reserve(h);
        for (int j = 0; j < h; ++j)
            out.data.labels[i].emplace_back(j, rng.discrete(out.matrices[j].entries[y]));
    }
    return out;
}

// First size_a annotators use T_A, the remaining size_b use T_B.
inline PerturbedData gen_two_groups(int n, const ClassPrior& prior, const TransitionMatrix& t_a,
                                    const TransitionMatrix& t_b, int size_a, int size_b,
                                    std::uint64_t seed) {
    if (size_a < 0 || size_b < 1 || (size_a + size_b) % 2 == 0)
        throw Error(Errc::InvalidSplit, "need size_a + size_b odd with size_b >= 1");
    const int h = size_a + size_b;
    if (size_a >= (h + 1) / 2)
        throw Error(Errc::InvalidSplit, "group A must be smaller than ceil(H/2)");
    if (t_a.num_classes() != t_b.num_classes() ||
        t_a.num_classes() != prior.num_classes())
        throw Error(Errc::InvalidRange, "matrices and prior disagree on class count");
    if (n < 1) throw Error(Errc::InvalidRange, "need at least one task");

    PerturbedData out;
    out.matrices.reserve(h);
    for (int j = 0; j < h; ++j) out.matrices.push_back(j < size_a ? t_a : t_b);

    out.data.num_classes = t_a.num_classes();
    out.data.tasks.reserve(n);
    out.data.labels.resize(n);
    out.data.gold.reserve(n);
    for (int j = 0; j < h; ++j) out.data.annotators.push_back("a" + std::to_string(j));

    Rng rng = Rng::stream(seed, "labels");
    for (int i = 0; i < n; ++i) {
        out.data.tasks.push_back("t" + std::to_string(i));
        const int y = rng.discrete(prior.probs);
        out.data.gold.push_back(y);
        out.data.labels[i].reserve(h);
        for (int j = 0; j < h; ++j)
            out.data.labels[i].emplace_back(j, rng.discrete(out.matrices[j].entries[y]));
    }
    return out;
}

// Worker count after applying the CROWDCERT_THREADS cap. Never above n_items,
// never below 1.
inline int effective_threads(int requested, int n_items) {
    int n = requested > 0 ? requested : (int)std::thread::hardware_concurrency();
    if (n < 1) n = 1;
    if (const char* env = std::getenv("CROWDCERT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min(n, (int)cap);
    }
    return std::max(1, std::min(n, n_items));
}

namespace detail {

inline void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.nu0_values.empty() || spec.t00_values.empty() || spec.t11_values.empty() ||
        spec.h_values.empty())
        throw Error(Errc::InvalidRange, "sweep lists must be non-empty");
    auto check_sorted = [](const auto& v, const char* what) {
        if (!std::is_sorted(v.begin(), v.end()))
            throw Error(Errc::InvalidRange, std::string(what) + " values must be sorted");
    };
    check_sorted(spec.nu0_values, "nu0");
    check_sorted(spec.t00_values, "t00");
    check_sorted(spec.t11_values, "t11");
    check_sorted(spec.h_values, "H");
    for (double v : spec.nu0_values)
        if (!(v > 0.0 && v < 1.0)) throw Error(Errc::InvalidRange, "nu0 outside (0,1)");
    for (double v : spec.t00_values)
        if (!(v > 0.5 && v < 1.0)) throw Error(Errc::InvalidRange, "t00 outside (0.5,1)");
    for (double v : spec.t11_values)
        if (!(v > 0.5 && v < 1.0)) throw Error(Errc::InvalidRange, "t11 outside (0.5,1)");
    for (int h : spec.h_values)
        if (h < 1 || h % 2 == 0) throw Error(Errc::EvenH, "H values must be odd and positive");
    if (spec.mode == SweepMode::MONTE_CARLO && spec.n_samples < 1000)
        throw Error(Errc::InvalidRange, "Monte-Carlo sweeps need n_samples >= 1000");
    if (spec.estimated && spec.mode != SweepMode::MONTE_CARLO)
        throw Error(Errc::InvalidRange, "estimated verdicts need MONTE_CARLO mode");
    if (spec.estimated && !(spec.anchor_fraction > 0.0 && spec.anchor_fraction <= 1.0))
        throw Error(Errc::InvalidRange, "anchor_fraction outside (0,1]");
}

inline void evaluate_cell(const SweepSpec& spec, std::uint64_t index, SweepCell& cell) {
    try {
        const BinaryNoiseParams p(cell.h, cell.t00, cell.t11, cell.nu0);
        cell.verdict = check_two_coin(p).verdict;
        cell.degenerate = map_threshold(p, 0).degenerate || map_threshold(p, 1).degenerate;
        if (!cell.degenerate) cell.gap = gap(p);

        if (spec.mode != SweepMode::MONTE_CARLO) return;
        const TransitionMatrix t = TransitionMatrix::binary(cell.t00, cell.t11);
        const ClassPrior prior = ClassPrior::binary(cell.nu0);
        const AnnotationSet data =
            gen_fixed(spec.n_samples, prior, t, cell.h, Rng::derive(spec.seed, index));
        cell.empirical_mv = accuracy_against_gold(majority_vote(data), data.gold);
        cell.empirical_map = accuracy_against_gold(map_aggregate(data, t, prior), data.gold);

        if (!spec.estimated) return;
        const int n_anchor = std::max(1, (int)std::ceil(spec.anchor_fraction * data.num_tasks()));
        std::vector<std::pair<int, int>> anchors;
        anchors.reserve(n_anchor);
        for (int i = 0; i < n_anchor; ++i) anchors.emplace_back(i, data.gold[i]);
        try {
            const TransitionMatrix t_hat = anchor_estimate_t(data, anchors);
            const auto nu_tilde = recover_prior(t_hat, empirical_noisy_prior(data)).first;
            const BinaryNoiseParams est(cell.h, t_hat(0, 0), t_hat(1, 1), nu_tilde[0]);
            cell.estimated_verdict = check_two_coin(est).verdict;
        } catch (const Error&) {
            // estimate landed outside the theorem's domain; no verdict possible
            cell.estimated_verdict = Verdict::INCONCLUSIVE;
        }
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
}

} // namespace detail

inline SweepGrid sweep(const SweepSpec& spec) {
    detail::validate_sweep_spec(spec);

    SweepGrid grid;
    grid.spec = spec;
    const std::size_t n_cells = spec.nu0_values.size() * spec.t00_values.size() *
                                spec.t11_values.size() * spec.h_values.size();
    grid.cells.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        std::size_t rest = i;
        SweepCell& cell = grid.cells[i];
        cell.h = spec.h_values[rest % spec.h_values.size()];
        rest /= spec.h_values.size();
        cell.t11 = spec.t11_values[rest % spec.t11_values.size()];
        rest /= spec.t11_values.size();
        cell.t00 = spec.t00_values[rest % spec.t00_values.size()];
        rest /= spec.t00_values.size();
        cell.nu0 = spec.nu0_values[rest];
    }

    const int n_threads = effective_threads(spec.num_threads, (int)n_cells);
    auto work = [&](int tid) {
        for (std::size_t i = tid; i < n_cells; i += n_threads)
            detail::evaluate_cell(spec, i, grid.cells[i]);
    };
    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    return grid;
}

} // namespace crowdcert
