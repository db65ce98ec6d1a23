#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crowdcert/error.hpp"

namespace crowdcert {

// Row-stochastic C x C confusion matrix, entries[i][j] = P(reported j | true i).
struct TransitionMatrix {
    std::vector<std::vector<double>> entries;

    TransitionMatrix() = default;
    explicit TransitionMatrix(std::vector<std::vector<double>> rows) : entries(std::move(rows)) {
        validate();
    }

    // Binary matrix from its diagonal.
    static TransitionMatrix binary(double t00, double t11) {
        return TransitionMatrix({{t00, 1.0 - t00}, {1.0 - t11, t11}});
    }

    int num_classes() const { return static_cast<int>(entries.size()); }
    double operator()(int i, int j) const { return entries[i][j]; }

    void validate() const {
        const std::size_t c = entries.size();
        if (c == 0) throw Error(Errc::InvalidRange, "transition matrix is empty");
        for (const auto& row : entries) {
            if (row.size() != c)
                throw Error(Errc::InvalidRange, "transition matrix is not square");
            double sum = 0.0;
            for (double x : row) {
                if (!(x >= 0.0 && x <= 1.0))
                    throw Error(Errc::InvalidRange, "transition entry outside [0,1]");
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw Error(Errc::InvalidRange, "transition row does not sum to 1");
        }
    }
};

// Probability simplex over classes, probs[i] = P(y = i).
struct ClassPrior {
    std::vector<double> probs;

    ClassPrior() = default;
    explicit ClassPrior(std::vector<double> p) : probs(std::move(p)) { validate(); }

    static ClassPrior binary(double nu0) { return ClassPrior({nu0, 1.0 - nu0}); }

    int num_classes() const { return static_cast<int>(probs.size()); }
    double operator[](int i) const { return probs[i]; }

    void validate() const {
        if (probs.empty()) throw Error(Errc::InvalidRange, "prior is empty");
        double sum = 0.0;
        for (double x : probs) {
            if (!(x >= 0.0 && x <= 1.0))
                throw Error(Errc::InvalidRange, "prior entry outside [0,1]");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw Error(Errc::InvalidRange, "prior does not sum to 1");
    }
};

// Unvalidated ingestion shape: one triple per annotation, external string ids.
struct RawAnnotations {
    std::vector<std::tuple<std::string, std::string, int>> triples; // task, annotator, label
    int num_classes = 0;                                            // 0 = infer from labels
    std::vector<std::pair<std::string, int>> gold;                  // optional task -> class
};

// Validated dataset. Tasks and annotators are canonicalized to dense 0-based
// indices; the id vectors record the mapping back to the external names.
struct AnnotationSet {
    std::vector<std::string> tasks;
    std::vector<std::string> annotators;
    int num_classes = 0;
    // labels[t] = (annotator index, label) pairs sorted by annotator index.
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> labels;
    // gold[t] = class index or -1; empty vector when no gold at all.
    std::vector<std::int32_t> gold;

    int num_tasks() const { return static_cast<int>(tasks.size()); }
    int num_annotators() const { return static_cast<int>(annotators.size()); }
    bool has_gold() const { return !gold.empty(); }
    std::size_t num_annotations() const {
        std::size_t n = 0;
        for (const auto& v : labels) n += v.size();
        return n;
    }
};

// Result of one aggregation run over an AnnotationSet.
struct AggregationResult {
    std::vector<std::int32_t> labels; // indexed by task, same order as the input set
    std::string method_name;
    std::map<std::string, std::string> metadata;
};

inline AnnotationSet validate_annotation_set(const RawAnnotations& raw) {
    if (raw.triples.empty()) throw Error(Errc::EmptyDataset, "no annotations");

    AnnotationSet out;
    std::unordered_map<std::string, std::int32_t> task_index, annotator_index;
    int max_label = -1;
    for (const auto& [task, annotator, label] : raw.triples) {
        auto [ti, tnew] = task_index.try_emplace(task, static_cast<std::int32_t>(out.tasks.size()));
        if (tnew) {
            out.tasks.push_back(task);
            out.labels.emplace_back();
        }
        auto [ai, anew] =
            annotator_index.try_emplace(annotator, static_cast<std::int32_t>(out.annotators.size()));
        if (anew) out.annotators.push_back(annotator);
        if (label < 0 || (raw.num_classes > 0 && label >= raw.num_classes))
            throw Error(Errc::LabelOutOfRange,
                        "label " + std::to_string(label) + " on task " + task);
        max_label = std::max(max_label, label);
        out.labels[ti->second].emplace_back(ai->second, label);
    }
    out.num_classes = raw.num_classes > 0 ? raw.num_classes : max_label + 1;

    for (auto& v : out.labels) {
        std::sort(v.begin(), v.end());
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i].first == v[i - 1].first)
                throw Error(Errc::DuplicatePair,
                            "annotator " + out.annotators[v[i].first] + " labeled a task twice");
    }

    if (!raw.gold.empty()) {
        out.gold.assign(out.tasks.size(), -1);
        for (const auto& [task, label] : raw.gold) {
            auto it = task_index.find(task);
            if (it == task_index.end())
                throw Error(Errc::InvalidRange, "gold refers to unknown task " + task);
            if (label < 0 || label >= out.num_classes)
                throw Error(Errc::LabelOutOfRange, "gold label out of range on task " + task);
            out.gold[it->second] = label;
        }
    }
    return out;
}

// Idempotent form: re-checks an already-canonical set and returns it unchanged.
inline AnnotationSet validate_annotation_set(const AnnotationSet& set) {
    if (set.tasks.empty() || set.num_annotations() == 0)
        throw Error(Errc::EmptyDataset, "no annotations");
    if (set.labels.size() != set.tasks.size())
        throw Error(Errc::InvalidRange, "label rows do not match task count");
    for (std::size_t t = 0; t < set.labels.size(); ++t) {
        const auto& v = set.labels[t];
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].first < 0 || v[i].first >= set.num_annotators())
                throw Error(Errc::InvalidRange, "annotator index out of range");
            if (v[i].second < 0 || v[i].second >= set.num_classes)
                throw Error(Errc::LabelOutOfRange, "label out of range on task " + set.tasks[t]);
            if (i > 0 && v[i].first == v[i - 1].first)
                throw Error(Errc::DuplicatePair, "duplicate annotator on task " + set.tasks[t]);
        }
    }
    if (set.has_gold()) {
        if (set.gold.size() != set.tasks.size())
            throw Error(Errc::InvalidRange, "gold does not match task count");
        for (std::int32_t g : set.gold)
            if (g < -1 || g >= set.num_classes)
                throw Error(Errc::LabelOutOfRange, "gold label out of range");
    }
    return set;
}

// Fraction of tasks whose aggregated label equals gold (gold indexed by task).
inline double accuracy_against_gold(const AggregationResult& result,
                                    const std::vector<std::int32_t>& gold) {
    if (result.labels.empty()) throw Error(Errc::EmptyDataset, "empty result");
    if (gold.size() != result.labels.size())
        throw Error(Errc::MissingGold, "gold does not cover all tasks");
    std::size_t correct = 0;
    for (std::size_t t = 0; t < result.labels.size(); ++t) {
        if (gold[t] < 0) throw Error(Errc::MissingGold, "task without gold label");
        if (result.labels[t] == gold[t]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(result.labels.size());
}

} // namespace crowdcert
