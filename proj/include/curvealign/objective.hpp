#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curvealign/curves.hpp"

namespace curvealign {

enum class ObjectiveKind { EntropySum, VarianceSum };

/// Floor applied to every order-statistic spacing before the logarithm.
inline constexpr double kSpacingFloor = 1e-12;

struct ObjectiveValue {
    double total = 0.0;
    std::vector<double> per_location;
};

/// Vasicek m-spacing estimate of differential entropy.
///
/// Spacings x(i+m) - x(i-m) use the boundary convention x(j) = x(1) for
/// j < 1 and x(j) = x(N) for j > N, and are floored at kSpacingFloor.
/// Requires N >= 4 and 1 <= m < N/2.
double vasicek_entropy(std::span<const double> samples, std::size_t window);

/// Same estimator on samples already sorted ascending.
double vasicek_entropy_sorted(std::span<const double> sorted, std::size_t window);

/// floor(sqrt(N)) clamped to [1, floor(N/2) - 1].
std::size_t default_vasicek_window(std::size_t n);

/// Population variance (divide by N).
double location_variance(std::span<const double> samples);

/// Population variance of samples already sorted ascending.
double location_variance_sorted(std::span<const double> sorted);

/// Estimator for one location, over sorted samples.
double location_score_sorted(std::span<const double> sorted, ObjectiveKind kind);

/// Minimum curve count the objective accepts.
std::size_t min_curves_for(ObjectiveKind kind);

/// Sum over time steps of the per-location estimator across the curves.
///
/// Curves must already be transformed. Lower is better.
ObjectiveValue joint_objective(std::span<const Curve> curves, ObjectiveKind kind);

/// Objective with columns kept sorted, so replacing one curve costs O(M N)
/// instead of O(M N log N). Totals are bit-identical to joint_objective.
class ColumnObjective {
public:
    ColumnObjective(std::span<const Curve> curves, ObjectiveKind kind);

    double total() const { return total_; }
    std::size_t curve_count() const { return rows_.size(); }

    /// Total if curve `index` were replaced by `candidate`.
    double evaluate_replacement(std::size_t index, std::span<const double> candidate) const;

    /// Replaces curve `index`; returns the new total.
    double replace(std::size_t index, std::span<const double> candidate);

private:
    double column_score(std::size_t column, double old_value, double new_value,
                        std::vector<double>& scratch) const;

    ObjectiveKind kind_;
    std::size_t length_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::vector<double>> sorted_columns_;
    std::vector<double> per_location_;
    double total_ = 0.0;
    mutable std::vector<double> scratch_;
};

}  // namespace curvealign
