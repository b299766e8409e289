#include "curvealign/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvealign/errors.hpp"

namespace curvealign {

double vasicek_entropy_sorted(std::span<const double> sorted, std::size_t window) {
    const std::size_t n = sorted.size();
    if (n < 4) {
        throw DataError("Vasicek entropy needs at least 4 samples, got " + std::to_string(n));
    }
    if (window < 1 || 2 * window >= n) {
        throw DataError("Vasicek window " + std::to_string(window) +
                        " outside [1, N/2) for N=" + std::to_string(n));
    }
    const double scale = static_cast<double>(n) / (2.0 * static_cast<double>(window));
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
    const auto m = static_cast<std::ptrdiff_t>(window);
    double sum = 0.0;
    for (std::ptrdiff_t i = 0; i <= last; ++i) {
        const double upper = sorted[static_cast<std::size_t>(std::min(i + m, last))];
        const double lower = sorted[static_cast<std::size_t>(std::max<std::ptrdiff_t>(i - m, 0))];
        const double spacing = std::max(upper - lower, kSpacingFloor);
        sum += std::log(scale * spacing);
    }
    return sum / static_cast<double>(n);
}

double vasicek_entropy(std::span<const double> samples, std::size_t window) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return vasicek_entropy_sorted(sorted, window);
}

std::size_t default_vasicek_window(std::size_t n) {
    auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const std::size_t upper = n / 2 >= 2 ? n / 2 - 1 : 1;
    return std::clamp<std::size_t>(m, 1, upper);
}

double location_variance_sorted(std::span<const double> sorted) {
    const double n = static_cast<double>(sorted.size());
    // Shifted by the first sample so constant columns give exactly zero.
    const double ref = sorted.front();
    double mean = 0.0;
    for (double x : sorted) mean += x - ref;
    mean /= n;
    double ss = 0.0;
    for (double x : sorted) {
        const double d = (x - ref) - mean;
        ss += d * d;
    }
    return ss / n;
}

double location_variance(std::span<const double> samples) {
    if (samples.size() < 2) throw DataError("variance needs at least 2 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return location_variance_sorted(sorted);
}

double location_score_sorted(std::span<const double> sorted, ObjectiveKind kind) {
    if (kind == ObjectiveKind::VarianceSum) return location_variance_sorted(sorted);
    return vasicek_entropy_sorted(sorted, default_vasicek_window(sorted.size()));
}

std::size_t min_curves_for(ObjectiveKind kind) {
    return kind == ObjectiveKind::EntropySum ? 4 : 2;
}

namespace {

void check_curve_count(std::size_t n, ObjectiveKind kind) {
    if (n < min_curves_for(kind)) {
        throw DataError(std::string(kind == ObjectiveKind::EntropySum ? "entropy" : "variance") +
                        " objective needs at least " + std::to_string(min_curves_for(kind)) +
                        " curves, got " + std::to_string(n));
    }
}

}  // namespace

ObjectiveValue joint_objective(std::span<const Curve> curves, ObjectiveKind kind) {
    check_curve_count(curves.size(), kind);
    const std::size_t m = curves.front().size();
    ObjectiveValue value;
    value.per_location.resize(m);
    std::vector<double> column(curves.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < curves.size(); ++k) column[k] = curves[k][i];
        std::sort(column.begin(), column.end());
        value.per_location[i] = location_score_sorted(column, kind);
    }
    for (double v : value.per_location) value.total += v;
    return value;
}

ColumnObjective::ColumnObjective(std::span<const Curve> curves, ObjectiveKind kind)
    : kind_(kind), length_(curves.empty() ? 0 : curves.front().size()) {
    check_curve_count(curves.size(), kind);
    rows_.reserve(curves.size());
    for (const auto& c : curves) rows_.emplace_back(c.samples().begin(), c.samples().end());
    sorted_columns_.assign(length_, std::vector<double>(curves.size()));
    per_location_.resize(length_);
    for (std::size_t i = 0; i < length_; ++i) {
        auto& column = sorted_columns_[i];
        for (std::size_t k = 0; k < rows_.size(); ++k) column[k] = rows_[k][i];
        std::sort(column.begin(), column.end());
        per_location_[i] = location_score_sorted(column, kind_);
        total_ += per_location_[i];
    }
}

double ColumnObjective::column_score(std::size_t column, double old_value, double new_value,
                                     std::vector<double>& scratch) const {
    const auto& sorted = sorted_columns_[column];
    scratch.resize(sorted.size());
    // Copy the sorted column with one instance of old_value swapped for
    // new_value, keeping ascending order.
    const auto removed = std::lower_bound(sorted.begin(), sorted.end(), old_value);
    auto out = scratch.begin();
    bool inserted = false;
    for (auto it = sorted.begin(); it != sorted.end(); ++it) {
        if (it == removed) continue;
        if (!inserted && new_value <= *it) {
            *out++ = new_value;
            inserted = true;
        }
        *out++ = *it;
    }
    if (!inserted) *out = new_value;
    return location_score_sorted(scratch, kind_);
}

double ColumnObjective::evaluate_replacement(std::size_t index,
                                             std::span<const double> candidate) const {
    const auto& row = rows_.at(index);
    double total = 0.0;
    for (std::size_t i = 0; i < length_; ++i) {
        total += row[i] == candidate[i] ? per_location_[i]
                                        : column_score(i, row[i], candidate[i], scratch_);
    }
    return total;
}

double ColumnObjective::replace(std::size_t index, std::span<const double> candidate) {
    auto& row = rows_.at(index);
    total_ = 0.0;
    for (std::size_t i = 0; i < length_; ++i) {
        if (row[i] != candidate[i]) {
            per_location_[i] = column_score(i, row[i], candidate[i], scratch_);
            sorted_columns_[i].swap(scratch_);
            row[i] = candidate[i];
        }
        total_ += per_location_[i];
    }
    return total_;
}

}  // namespace curvealign
