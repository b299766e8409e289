#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvealign/congeal.hpp"
#include "curvealign/curves.hpp"

namespace curvealign {

enum class EvalMode { Supervised, Unsupervised, NoAlignment };

struct EvalConfig {
    int k_neighbors = 10;
    int folds = 10;
    EvalMode mode = EvalMode::Unsupervised;
    CongealConfig congeal_config;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EvalResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    /// Per-fold accuracies in CV mode, one entry in split mode.
    std::vector<double> per_fold;
    /// Sorted class ids indexing the confusion matrix.
    std::vector<int> classes;
    /// confusion[true][predicted] counts.
    std::vector<std::vector<std::size_t>> confusion;

    double mean_fold_accuracy() const;
};

/// Aligned evaluation next to the no-alignment baseline on identical splits.
struct EvalComparison {
    EvalResult aligned;
    EvalResult baseline;
    std::vector<std::string> warnings;
    /// Non-monotone objective trace entries over every congealing run used.
    std::size_t trace_violations = 0;

    double improvement() const {
        return aligned.mean_fold_accuracy() - baseline.mean_fold_accuracy();
    }
};

/// Majority vote of the k Euclidean-nearest training curves. Distance ties
/// go to the lower training index, vote ties to the lower class id.
std::vector<int> knn_classify(std::span<const Curve> train, std::span<const int> train_labels,
                              std::span<const Curve> test, int k);

struct FoldAssignment {
    /// Fold index of each item.
    std::vector<int> fold_of;
    int folds = 0;
    std::vector<std::string> warnings;
};

/// Per class (ascending id): seeded shuffle, then round-robin dealing that
/// continues across classes. Reduces the fold count to the smallest class
/// size (with a warning) when a class has fewer members than folds.
FoldAssignment stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

/// Aligns each class (train and test members together) independently, then
/// classifies the aligned test curves against the aligned training curves.
/// Test labels steer the per-class grouping, which leaks label information
/// into the aligned test representation; use the unsupervised protocol for
/// a label-blind estimate.
EvalComparison eval_supervised(const CurveSet& train, const CurveSet& test,
                               const EvalConfig& config);

/// Cross-validated variant: every class is aligned once over all of its
/// members, then stratified k-fold CV runs on the aligned curves.
EvalComparison eval_supervised(const CurveSet& set, const EvalConfig& config);

/// Stratified k-fold CV after one label-blind, time-warp-only joint alignment
/// of every curve. Throws ConfigError if amplitude transforms are enabled.
EvalComparison eval_unsupervised(const CurveSet& set, const EvalConfig& config);

/// Stratified k-fold CV without alignment.
EvalResult eval_cross_validated(const CurveSet& set, std::span<const Curve> representation,
                                const FoldAssignment& folds, int k);

}  // namespace curvealign
