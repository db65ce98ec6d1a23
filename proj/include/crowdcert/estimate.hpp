#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"
#include "crowdcert/linalg.hpp"

namespace crowdcert {

// Conditioning record attached to a recovered prior.
struct ConditionReport {
    double lambda_min = 0.0; // smallest singular value of T~
    bool clipped = false;    // some entry left [0,1] and was clipped/renormalized
    bool asymmetric = false; // T~ != T~^T beyond 1e-12, the conventions differ
};

// Everything Theorem 3.3 consumes: estimated T, the empirical noisy label
// distribution, the recovered prior, and the caller-supplied (epsilon, gamma)
// guarantee of the T estimate.
struct EstimatedParams {
    TransitionMatrix t_hat;
    std::vector<double> nu_noisy_hat;
    std::vector<double> nu_tilde;
    double epsilon = 0.0;
    double gamma = 0.0;
    ConditionReport condition;
};

// Shared T estimated from tasks with trusted gold labels: entry (i, j) is the
// fraction of annotations on gold-i anchors that voted j.
// Anchors are (task index, gold class) pairs.
inline TransitionMatrix anchor_estimate_t(const AnnotationSet& data,
                                          const std::vector<std::pair<int, int>>& anchors) {
    const int c = data.num_classes;
    std::vector<std::vector<double>> counts(c, std::vector<double>(c, 0.0));
    std::vector<double> row_total(c, 0.0);
    for (const auto& [task, gold] : anchors) {
        if (task < 0 || task >= data.num_tasks())
            throw Error(Errc::InvalidRange, "anchor task index out of range");
        if (gold < 0 || gold >= c)
            throw Error(Errc::LabelOutOfRange, "anchor gold label out of range");
        for (const auto& [annotator, label] : data.labels[task]) {
            counts[gold][label] += 1.0;
            row_total[gold] += 1.0;
        }
    }
    for (int i = 0; i < c; ++i) {
        if (row_total[i] == 0.0)
            throw Error(Errc::MissingClassAnchors,
                        "no annotated anchor with gold class " + std::to_string(i));
        for (int j = 0; j < c; ++j)
            counts[i][j] /= row_total[i];
    }
    return TransitionMatrix(std::move(counts));
}

// Class frequencies over all annotations of all tasks.
inline std::vector<double> empirical_noisy_prior(const AnnotationSet& data) {
    std::vector<double> freq(data.num_classes, 0.0);
    double total = 0.0;
    for (const auto& task_votes : data.labels)
        for (const auto& [annotator, label] : task_votes) {
            freq[label] += 1.0;
            total += 1.0;
        }
    if (total == 0.0) throw Error(Errc::EmptyDataset, "no annotations");
    for (double& f : freq) f /= total;
    return freq;
}

// Recovers the clean prior from the noisy marginal under the generative
// convention P(noisy = j) = sum_i nu_i T[i][j], i.e. solves T~^T nu = nu_hat.
// Entries outside [0,1] are clipped and the vector renormalized, loudly.
inline std::pair<std::vector<double>, ConditionReport>
recover_prior(const TransitionMatrix& t_hat, const std::vector<double>& nu_noisy_hat) {
    ConditionReport report;
    report.lambda_min = smallest_singular_value(t_hat);
    if (report.lambda_min <= 1e-8)
        throw Error(Errc::SingularMatrix, "smallest singular value of T~ is below 1e-8");

    const int c = t_hat.num_classes();
    for (int i = 0; i < c; ++i)
        for (int j = i + 1; j < c; ++j)
            if (std::abs(t_hat(i, j) - t_hat(j, i)) > 1e-12) report.asymmetric = true;

    std::vector<double> nu = solve_transposed(t_hat, nu_noisy_hat);
    double sum = 0.0;
    for (double& x : nu) {
        if (x < -1e-12 || x > 1.0 + 1e-12) report.clipped = true;
        x = std::min(1.0, std::max(0.0, x));
        sum += x;
    }
    if (sum <= 1e-12) throw Error(Errc::SingularMatrix, "recovered prior has no mass");
    if (std::abs(sum - 1.0) > 1e-9) report.clipped = true;
    for (double& x : nu) x /= sum;
    return {std::move(nu), report};
}

// Convenience composition used by the CLI and the sweep: anchors -> T~, data
// -> nu_hat, then the recovered prior, bundled with the (epsilon, gamma)
// assumption on the T estimate.
inline EstimatedParams estimate_params(const AnnotationSet& data,
                                       const std::vector<std::pair<int, int>>& anchors,
                                       double epsilon, double gamma) {
    if (epsilon < 0.0) throw Error(Errc::InvalidRange, "epsilon must be nonnegative");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(Errc::InvalidRange, "gamma outside [0,1)");
    EstimatedParams est;
    est.t_hat = anchor_estimate_t(data, anchors);
    est.nu_noisy_hat = empirical_noisy_prior(data);
    auto [nu, report] = recover_prior(est.t_hat, est.nu_noisy_hat);
    est.nu_tilde = std::move(nu);
    est.condition = report;
    est.epsilon = epsilon;
    est.gamma = gamma;
    return est;
}

} // namespace crowdcert
