#include "curvealign/evalkit.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "curvealign/errors.hpp"
#include "curvealign/rng.hpp"

namespace curvealign {

void EvalConfig::validate() const {
    if (k_neighbors < 1) throw ConfigError("k must be at least 1");
    if (folds < 2) throw ConfigError("folds must be at least 2");
    congeal_config.validate();
}

double EvalResult::mean_fold_accuracy() const {
    if (per_fold.empty()) return accuracy;
    return std::accumulate(per_fold.begin(), per_fold.end(), 0.0) /
           static_cast<double>(per_fold.size());
}

std::vector<int> knn_classify(std::span<const Curve> train, std::span<const int> train_labels,
                              std::span<const Curve> test, int k) {
    if (train.empty()) throw DataError("knn needs a non-empty training set");
    if (train.size() != train_labels.size()) {
        throw DataError("training labels do not match training curves");
    }
    if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
        throw DataError("k=" + std::to_string(k) + " must lie in [1, " +
                        std::to_string(train.size()) + "]");
    }
    const std::size_t m = train.front().size();
    std::vector<int> predictions;
    predictions.reserve(test.size());
    std::vector<std::pair<double, std::size_t>> neighbors(train.size());
    for (const auto& query : test) {
        if (query.size() != m) throw DataError("test curve length differs from training curves");
        for (std::size_t j = 0; j < train.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double diff = query[i] - train[j][i];
                d2 += diff * diff;
            }
            neighbors[j] = {d2, j};
        }
        // Pairs order by distance, then by training index.
        std::partial_sort(neighbors.begin(), neighbors.begin() + k, neighbors.end());
        std::map<int, int> votes;
        for (int r = 0; r < k; ++r) ++votes[train_labels[neighbors[static_cast<std::size_t>(r)].second]];
        int best_label = votes.begin()->first;
        int best_votes = 0;
        for (const auto& [label, count] : votes) {
            if (count > best_votes) {
                best_label = label;
                best_votes = count;
            }
        }
        predictions.push_back(best_label);
    }
    return predictions;
}

FoldAssignment stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("folds must be at least 2");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

    FoldAssignment out;
    out.folds = folds;
    for (const auto& [label, idx] : members) {
        if (idx.size() < 2) {
            throw DataError("class " + std::to_string(label) +
                            " has a single member; stratified folds need at least 2");
        }
        if (idx.size() < static_cast<std::size_t>(out.folds)) {
            out.warnings.push_back("class " + std::to_string(label) + " has only " +
                                   std::to_string(idx.size()) + " members; reducing folds from " +
                                   std::to_string(out.folds) + " to " +
                                   std::to_string(idx.size()));
            out.folds = static_cast<int>(idx.size());
        }
    }

    Rng rng(seed);
    out.fold_of.assign(labels.size(), -1);
    std::size_t position = 0;
    for (auto& [label, idx] : members) {
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        for (std::size_t item : idx) {
            out.fold_of[item] = static_cast<int>(position % static_cast<std::size_t>(out.folds));
            ++position;
        }
    }
    return out;
}

namespace {

std::vector<int> class_ids(std::span<const int> labels) {
    std::vector<int> ids(labels.begin(), labels.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

class Scorer {
public:
    explicit Scorer(std::vector<int> classes) : classes_(std::move(classes)) {
        result_.classes = classes_;
        result_.confusion.assign(classes_.size(), std::vector<std::size_t>(classes_.size(), 0));
    }

    /// Adds one fold (or split) worth of predictions.
    void add(std::span<const int> truth, std::span<const int> predicted) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            ++result_.confusion[index_of(truth[i])][index_of(predicted[i])];
            if (truth[i] == predicted[i]) ++correct;
        }
        result_.correct += correct;
        result_.total += truth.size();
        result_.per_fold.push_back(truth.empty() ? 0.0
                                                 : static_cast<double>(correct) /
                                                       static_cast<double>(truth.size()));
    }

    EvalResult finish() {
        result_.accuracy = result_.total == 0 ? 0.0
                                              : static_cast<double>(result_.correct) /
                                                    static_cast<double>(result_.total);
        return result_;
    }

private:
    std::size_t index_of(int label) const {
        return static_cast<std::size_t>(
            std::lower_bound(classes_.begin(), classes_.end(), label) - classes_.begin());
    }

    std::vector<int> classes_;
    EvalResult result_;
};

const std::vector<int>& require_labels(const CurveSet& set, const char* what) {
    if (!set.has_labels()) throw DataError(std::string(what) + " set has no labels");
    return *set.labels();
}

EvalResult evaluate_split(std::span<const Curve> train, std::span<const int> train_labels,
                          std::span<const Curve> test, std::span<const int> test_labels,
                          std::vector<int> classes, int k) {
    const int k_used = std::min<int>(k, static_cast<int>(train.size()));
    Scorer scorer(std::move(classes));
    scorer.add(test_labels, knn_classify(train, train_labels, test, k_used));
    return scorer.finish();
}

}  // namespace

EvalResult eval_cross_validated(const CurveSet& set, std::span<const Curve> representation,
                                const FoldAssignment& folds, int k) {
    const auto& labels = require_labels(set, "evaluation");
    Scorer scorer(class_ids(labels));
    for (int f = 0; f < folds.folds; ++f) {
        std::vector<Curve> train;
        std::vector<int> train_labels;
        std::vector<Curve> test;
        std::vector<int> test_labels;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (folds.fold_of[i] == f) {
                test.push_back(representation[i]);
                test_labels.push_back(labels[i]);
            } else {
                train.push_back(representation[i]);
                train_labels.push_back(labels[i]);
            }
        }
        if (test.empty()) continue;
        const int k_used = std::min<int>(k, static_cast<int>(train.size()));
        scorer.add(test_labels, knn_classify(train, train_labels, test, k_used));
    }
    return scorer.finish();
}

EvalComparison eval_supervised(const CurveSet& train, const CurveSet& test,
                               const EvalConfig& config) {
    config.validate();
    const auto& train_labels = require_labels(train, "training");
    const auto& test_labels = require_labels(test, "test");
    if (train.length() != test.length()) {
        throw DataError("training and test curves differ in length");
    }

    std::vector<Curve> pooled = train.curves();
    pooled.insert(pooled.end(), test.curves().begin(), test.curves().end());
    std::vector<int> pooled_labels = train_labels;
    pooled_labels.insert(pooled_labels.end(), test_labels.begin(), test_labels.end());
    const std::vector<int> classes = class_ids(pooled_labels);

    EvalComparison out;
    out.baseline = evaluate_split(train.curves(), train_labels, test.curves(), test_labels,
                                  classes, config.k_neighbors);
    if (config.mode == EvalMode::NoAlignment) {
        out.aligned = out.baseline;
        return out;
    }

    CongealConfig congeal_config = config.congeal_config;
    congeal_config.seed = config.seed;
    const PerClassAlignment aligned =
        align_per_class(CurveSet(pooled, pooled_labels), congeal_config);
    for (const auto& [label, report] : aligned.by_class) {
        out.trace_violations += count_trace_violations(report);
    }
    const std::span<const Curve> all(aligned.aligned);
    out.aligned = evaluate_split(all.first(train.size()), train_labels,
                                 all.subspan(train.size()), test_labels, classes,
                                 config.k_neighbors);
    return out;
}

EvalComparison eval_supervised(const CurveSet& set, const EvalConfig& config) {
    config.validate();
    const auto& labels = require_labels(set, "evaluation");
    EvalComparison out;
    const FoldAssignment folds = stratified_folds(labels, config.folds, config.seed);
    out.warnings = folds.warnings;
    out.baseline = eval_cross_validated(set, set.curves(), folds, config.k_neighbors);
    if (config.mode == EvalMode::NoAlignment) {
        out.aligned = out.baseline;
        return out;
    }
    CongealConfig congeal_config = config.congeal_config;
    congeal_config.seed = config.seed;
    const PerClassAlignment aligned = align_per_class(set, congeal_config);
    for (const auto& [label, report] : aligned.by_class) {
        out.trace_violations += count_trace_violations(report);
    }
    out.aligned = eval_cross_validated(set, aligned.aligned, folds, config.k_neighbors);
    return out;
}

EvalComparison eval_unsupervised(const CurveSet& set, const EvalConfig& config) {
    config.validate();
    if (config.mode != EvalMode::NoAlignment &&
        !(config.congeal_config.transforms == EnabledTransforms::only_warp())) {
        throw ConfigError(
            "unsupervised evaluation aligns with nonlinear time warps only; "
            "disable amplitude scale and offset transforms");
    }
    const auto& labels = require_labels(set, "evaluation");
    EvalComparison out;
    const FoldAssignment folds = stratified_folds(labels, config.folds, config.seed);
    out.warnings = folds.warnings;
    out.baseline = eval_cross_validated(set, set.curves(), folds, config.k_neighbors);
    if (config.mode == EvalMode::NoAlignment) {
        out.aligned = out.baseline;
        return out;
    }

    // The train and test parts of every fold together form the whole set, so
    // a single transductive alignment serves all folds.
    CongealConfig congeal_config = config.congeal_config;
    congeal_config.seed = config.seed;
    const AlignmentReport report = congeal(set.unlabeled(), congeal_config);
    out.trace_violations = count_trace_violations(report);
    out.aligned = eval_cross_validated(set, report.aligned, folds, config.k_neighbors);
    return out;
}

}  // namespace curvealign
