#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"

namespace crowdcert {

// Iteration control for dawid_skene_em and iwmv. max_iters = 0 is accepted
// and means "no reweighting rounds" for iwmv; dawid_skene_em requires >= 1.
struct EmConfig {
    int max_iters = 100;
    double tol = 1e-6;
    std::uint64_t seed = 0;

    void validate() const {
        if (max_iters < 0) throw Error(Errc::InvalidRange, "max_iters must be nonnegative");
        if (!(tol > 0.0)) throw Error(Errc::InvalidRange, "tol must be positive");
    }
};

namespace detail {

inline void record_ties(AggregationResult& result, const AnnotationSet& data,
                        const std::vector<std::uint8_t>& tied) {
    std::size_t n = 0;
    std::string ids;
    for (std::size_t t = 0; t < tied.size(); ++t) {
        if (!tied[t]) continue;
        ++n;
        if (!ids.empty()) ids += ';';
        ids += data.tasks[t];
    }
    result.metadata["num_ties"] = std::to_string(n);
    if (n > 0) result.metadata["tie_tasks"] = ids;
    else result.metadata.erase("tie_tasks");
}

// argmax with ties broken toward the lowest class index
inline std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline int argmax_lowest(const std::vector<double>& scores, bool* tied) {
    int best = 0;
    const int n = scores.size();
    for (int c = 1; c < n; ++c)
        if (scores[c] > scores[best]) best = c;
    if (tied) {
        *tied = false;
        for (int c = 0; c < n; ++c)
            if (c != best && scores[c] == scores[best]) *tied = true;
    }
    return best;
}

inline std::vector<std::int32_t> weighted_vote(const AnnotationSet& data,
                                               const std::vector<double>& weights,
                                               std::vector<std::uint8_t>& tied) {
    std::vector<std::int32_t> labels(data.num_tasks());
    tied.assign(data.num_tasks(), 0);
    std::vector<double> score(data.num_classes);
    for (int t = 0; t < data.num_tasks(); ++t) {
        const auto& votes = data.labels[t];
        if (votes.empty())
            throw Error(Errc::UnannotatedTask, "task " + data.tasks[t] + " has no annotations");
        std::fill(score.begin(), score.end(), 0.0);
        for (const auto& [annotator, label] : votes) score[label] += weights[annotator];
        bool tie = false;
        labels[t] = argmax_lowest(score, &tie);
        if (tie) tied[t] = 1;
    }
    return labels;
}

} // namespace detail

// Per task, the class with the most votes; ties go to the lowest class index
// and are flagged in metadata.
inline AggregationResult majority_vote(const AnnotationSet& data) {
    AggregationResult result;
    result.method_name = "mv";
    std::vector<std::uint8_t> tied;
    std::vector<double> uniform(data.num_annotators(), 1.0);
    result.labels = detail::weighted_vote(data, uniform, tied);
    detail::record_ties(result, data, tied);
    return result;
}

// MAP with per-annotator transition matrices: argmax_c of
// log nu_c + sum_h log T_h[c][x_h].
inline AggregationResult map_aggregate(const AnnotationSet& data,
                                       const std::vector<TransitionMatrix>& t_per_annotator,
                                       const ClassPrior& prior) {
    const int c_num = data.num_classes;
    if (prior.num_classes() != c_num)
        throw Error(Errc::InvalidRange, "prior class count does not match dataset");
    if ((int)t_per_annotator.size() != data.num_annotators())
        throw Error(Errc::InvalidRange, "need one transition matrix per annotator");
    for (const auto& t : t_per_annotator)
        if (t.num_classes() != c_num)
            throw Error(Errc::InvalidRange, "transition matrix class count does not match dataset");

    AggregationResult result;
    result.method_name = "map";
    result.labels.resize(data.num_tasks());
    std::vector<std::uint8_t> tied(data.num_tasks(), 0);
    std::vector<double> lp(c_num);
    for (int t = 0; t < data.num_tasks(); ++t) {
        const auto& votes = data.labels[t];
        if (votes.empty())
            throw Error(Errc::UnannotatedTask, "task " + data.tasks[t] + " has no annotations");
        for (int c = 0; c < c_num; ++c) {
            double v = std::log(prior[c]);
            for (const auto& [annotator, label] : votes)
                v += std::log(t_per_annotator[annotator](c, label));
            lp[c] = v;
        }
        if (*std::max_element(lp.begin(), lp.end()) == -std::numeric_limits<double>::infinity())
            throw Error(Errc::ZeroLikelihood,
                        "every class has a zero-probability vote on task " + data.tasks[t]);
        bool tie = false;
        result.labels[t] = detail::argmax_lowest(lp, &tie);
        if (tie) tied[t] = 1;
    }
    detail::record_ties(result, data, tied);
    return result;
}

// MAP with one shared transition matrix.
inline AggregationResult map_aggregate(const AnnotationSet& data, const TransitionMatrix& t,
                                       const ClassPrior& prior) {
    std::vector<TransitionMatrix> per(data.num_annotators(), t);
    return map_aggregate(data, per, prior);
}

// Dawid-Skene EM output: per-annotator confusion estimates, prior estimate,
// posterior-argmax labels.
struct DsResult {
    std::vector<TransitionMatrix> t_hat;
    ClassPrior nu_hat;
    AggregationResult result;
};

inline DsResult dawid_skene_em(const AnnotationSet& data, const EmConfig& cfg) {
    cfg.validate();
    if (cfg.max_iters < 1) throw Error(Errc::InvalidRange, "dawid_skene_em needs max_iters >= 1");
    const int c_num = data.num_classes;
    if (c_num < 2) throw Error(Errc::UnsupportedClassCount, "need at least 2 classes");
    const int n_tasks = data.num_tasks();
    const int n_annot = data.num_annotators();

    // responsibilities start as one-hot MV labels
    AggregationResult mv = majority_vote(data);
    std::vector<std::vector<double>> resp(n_tasks, std::vector<double>(c_num, 0.0));
    for (int t = 0; t < n_tasks; ++t) resp[t][mv.labels[t]] = 1.0;

    std::vector<std::vector<std::vector<double>>> t_hat(
        n_annot, std::vector<std::vector<double>>(c_num, std::vector<double>(c_num, 0.0)));
    std::vector<double> nu(c_num, 0.0);
    std::vector<double> prev_flat, cur_flat;

    auto m_step = [&]() {
        std::fill(nu.begin(), nu.end(), 0.0);
        for (int t = 0; t < n_tasks; ++t)
            for (int c = 0; c < c_num; ++c) nu[c] += resp[t][c];
        for (double& x : nu) x /= n_tasks;

        // Laplace smoothing: 1 pseudo-count per confusion cell keeps sparse
        // annotators away from zero rows.
        for (auto& mat : t_hat)
            for (auto& row : mat) std::fill(row.begin(), row.end(), 1.0);
        for (int t = 0; t < n_tasks; ++t)
            for (const auto& [annotator, label] : data.labels[t])
                for (int c = 0; c < c_num; ++c) t_hat[annotator][c][label] += resp[t][c];
        for (auto& mat : t_hat)
            for (auto& row : mat) {
                double sum = 0.0;
                for (double x : row) sum += x;
                for (double& x : row) x /= sum;
            }
    };

    auto flatten = [&](std::vector<double>& out) {
        out.assign(nu.begin(), nu.end());
        for (const auto& mat : t_hat)
            for (const auto& row : mat) out.insert(out.end(), row.begin(), row.end());
    };

    // E-step; returns the observed-data log-likelihood of the current params.
    auto e_step = [&]() {
        double ll = 0.0;
        std::vector<double> lp(c_num);
        for (int t = 0; t < n_tasks; ++t) {
            for (int c = 0; c < c_num; ++c) {
                double v = std::log(nu[c]);
                for (const auto& [annotator, label] : data.labels[t])
                    v += std::log(t_hat[annotator][c][label]);
                lp[c] = v;
            }
            const double top = *std::max_element(lp.begin(), lp.end());
            double sum = 0.0;
            for (int c = 0; c < c_num; ++c) {
                resp[t][c] = std::exp(lp[c] - top);
                sum += resp[t][c];
            }
            for (int c = 0; c < c_num; ++c) resp[t][c] /= sum;
            ll += top + std::log(sum);
        }
        return ll;
    };

    // The smoothed M-step ascends the data log-likelihood plus the log of the
    // pseudo-count term on the confusion rows, not the data term alone, so the
    // monotonicity guard tracks that penalized objective.
    auto log_penalty = [&]() {
        double pen = 0.0;
        for (const auto& mat : t_hat)
            for (const auto& row : mat)
                for (double x : row) pen += std::log(x);
        return pen;
    };

    m_step();
    flatten(prev_flat);
    double prev_obj = -std::numeric_limits<double>::infinity();
    double delta = std::numeric_limits<double>::infinity();
    int iters = 0;
    while (iters < cfg.max_iters) {
        const double obj = e_step() + log_penalty();
        if (obj < prev_obj - std::max(1e-8, 1e-12 * std::abs(prev_obj)))
            throw std::logic_error("EM objective decreased");
        prev_obj = obj;
        m_step();
        ++iters;
        flatten(cur_flat);
        delta = 0.0;
        for (std::size_t i = 0; i < cur_flat.size(); ++i)
            delta = std::max(delta, std::abs(cur_flat[i] - prev_flat[i]));
        std::swap(prev_flat, cur_flat);
        if (delta < cfg.tol) break;
    }
    const double final_ll = e_step(); // labels from the final parameters

    DsResult out;
    out.result.method_name = "ds";
    out.result.labels.resize(n_tasks);
    std::vector<std::uint8_t> tied(n_tasks, 0);
    for (int t = 0; t < n_tasks; ++t) {
        bool tie = false;
        out.result.labels[t] = detail::argmax_lowest(resp[t], &tie);
        if (tie) tied[t] = 1;
    }
    detail::record_ties(out.result, data, tied);
    out.result.metadata["iterations"] = std::to_string(iters);
    out.result.metadata["final_delta"] = detail::fmt_g17(delta);
    out.result.metadata["converged"] = delta < cfg.tol ? "true" : "false";
    out.result.metadata["log_likelihood"] = detail::fmt_g17(final_ll);
    out.nu_hat = ClassPrior(nu);
    out.t_hat.reserve(n_annot);
    for (int h = 0; h < n_annot; ++h) out.t_hat.emplace_back(t_hat[h]);
    return out;
}

// Iterative weighted majority vote. Round 0 is plain MV; each later round
// weights annotator h by log((C-1) acc_h / (1-acc_h)) against the current
// labels and re-aggregates, until the labels stop changing.
inline AggregationResult iwmv(const AnnotationSet& data, const EmConfig& cfg) {
    cfg.validate();
    const int c_num = data.num_classes;
    AggregationResult result = majority_vote(data);
    result.method_name = "iwmv";

    std::vector<double> weights(data.num_annotators(), 1.0);
    std::vector<double> agree(data.num_annotators());
    std::vector<double> total(data.num_annotators());
    std::vector<std::uint8_t> tied;
    int iters = 0;
    bool converged = cfg.max_iters == 0;
    while (iters < cfg.max_iters) {
        std::fill(agree.begin(), agree.end(), 0.0);
        std::fill(total.begin(), total.end(), 0.0);
        for (int t = 0; t < data.num_tasks(); ++t)
            for (const auto& [annotator, label] : data.labels[t]) {
                total[annotator] += 1.0;
                if (label == result.labels[t]) agree[annotator] += 1.0;
            }
        for (std::size_t h = 0; h < weights.size(); ++h) {
            double acc = total[h] > 0.0 ? agree[h] / total[h] : 1.0 / c_num;
            acc = std::clamp(acc, 1.0 / c_num + 1e-6, 1.0 - 1e-6);
            weights[h] = std::clamp(std::log((c_num - 1) * acc / (1.0 - acc)), -10.0, 10.0);
        }
        std::vector<std::int32_t> next = detail::weighted_vote(data, weights, tied);
        ++iters;
        if (next == result.labels) {
            converged = true;
            break;
        }
        result.labels = std::move(next);
        detail::record_ties(result, data, tied);
    }
    result.metadata["iterations"] = std::to_string(iters);
    result.metadata["converged"] = converged ? "true" : "false";
    return result;
}

} // namespace crowdcert
