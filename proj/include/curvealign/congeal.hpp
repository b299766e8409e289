#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "curvealign/curves.hpp"
#include "curvealign/objective.hpp"

namespace curvealign {

/// Transform families the optimizer may adjust.
struct EnabledTransforms {
    bool time_warp = true;
    bool amplitude_scale = true;
    bool amplitude_offset = true;

    bool any() const { return time_warp || amplitude_scale || amplitude_offset; }
    static EnabledTransforms only_warp() { return {true, false, false}; }
    static EnabledTransforms only_scale() { return {false, true, false}; }
    static EnabledTransforms only_offset() { return {false, false, true}; }

    friend bool operator==(const EnabledTransforms&, const EnabledTransforms&) = default;
};

/// Initial half-widths of the uniform perturbations.
struct StepSizes {
    double weight = 0.05;
    double log_alpha = 0.02;
    /// In units of the standard deviation of all input samples.
    double beta = 0.02;
};

struct CongealConfig {
    ObjectiveKind objective = ObjectiveKind::EntropySum;
    EnabledTransforms transforms;
    StepSizes steps;
    int max_iterations = 200;
    int stagnation_window = 5;
    double stagnation_tolerance = 1e-8;
    /// Step sizes are multiplied by this after a pass with no accepted move.
    double anneal_factor = 0.9;
    double weight_bound = kDefaultWeightBound;
    std::uint64_t seed = 0;
    bool recenter = true;

    /// Throws ConfigError on invalid settings.
    void validate() const;
};

struct AlignmentReport {
    /// Input curves with their final parameters (and labels, if any).
    CurveSet final_set;
    /// final_set with every transform applied.
    std::vector<Curve> aligned;
    double initial_objective = 0.0;
    /// Objective after each completed iteration.
    std::vector<double> objective_trace;
    int iterations_run = 0;
    bool converged = false;
    long accepted_moves = 0;
};

/// Jointly aligns the set by randomized coordinate descent on the objective.
///
/// Each iteration visits every curve in index order and, per curve, every
/// enabled parameter (Fourier weights, then log alpha, then beta). A
/// perturbation u ~ U[-step, step] is tried as +u and then -u, keeping the
/// first that strictly lowers the objective. After the pass the parameters
/// are recentered (rolled back if that would raise the objective) and steps
/// are annealed if nothing was accepted. Stops once the relative objective
/// change across `stagnation_window` iterations drops below tolerance.
AlignmentReport congeal(const CurveSet& set, const CongealConfig& config);

struct PerClassAlignment {
    std::map<int, AlignmentReport> by_class;
    /// Whole set, original order, final parameters.
    CurveSet final_set;
    std::vector<Curve> aligned;
};

/// Congeals each label group independently with seed `config.seed + label`.
PerClassAlignment align_per_class(const CurveSet& set, const CongealConfig& config);

/// Checks that every objective trace entry is <= its predecessor (and the
/// first <= the initial objective). Returns the number of violations.
std::size_t count_trace_violations(const AlignmentReport& report);

}  // namespace curvealign
