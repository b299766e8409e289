#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace curvealign {

/// Number of Fourier frequencies in the warp coefficient function.
inline constexpr std::size_t kNumFrequencies = 2;

/// Frequencies of the coefficient-function basis, in cycles per unit time.
inline constexpr std::array<double, kNumFrequencies> kFrequencies = {0.5, 1.0};

/// Default bound on the magnitude of every Fourier weight.
inline constexpr double kDefaultWeightBound = 5.0;

/// Shortest curve the warp and interpolation machinery accepts.
inline constexpr std::size_t kMinCurveLength = 4;

/// Amplitude samples on the uniform grid t_i = i / (M - 1).
class Curve {
public:
    Curve() = default;
    /// Throws DataError if shorter than kMinCurveLength or non-finite.
    explicit Curve(std::vector<double> samples);

    std::span<const double> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }

    friend bool operator==(const Curve&, const Curve&) = default;

private:
    std::vector<double> samples_;
};

/// Per-curve transform: nonlinear time warp followed by y -> alpha * y + beta.
struct TransformParams {
    double alpha = 1.0;
    double beta = 0.0;
    std::array<double, kNumFrequencies> sin_weights{};
    std::array<double, kNumFrequencies> cos_weights{};

    static TransformParams identity() { return {}; }

    bool has_warp() const;
    /// alpha > 0, everything finite, every weight within +-weight_bound.
    bool is_valid(double weight_bound = kDefaultWeightBound) const;

    friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

/// h(t_i) on the sample grid; h[0] = 0, h[M-1] = 1, strictly increasing.
struct WarpTable {
    std::vector<double> h_values;
};

/// N curves of a common length with their transforms and optional labels.
class CurveSet {
public:
    CurveSet() = default;
    /// Identity params, no labels.
    explicit CurveSet(std::vector<Curve> curves);
    CurveSet(std::vector<Curve> curves, std::vector<int> labels);
    CurveSet(std::vector<Curve> curves, std::vector<TransformParams> params,
             std::optional<std::vector<int>> labels);

    std::size_t size() const { return curves_.size(); }
    std::size_t length() const { return curves_.empty() ? 0 : curves_.front().size(); }

    const std::vector<Curve>& curves() const { return curves_; }
    const std::vector<TransformParams>& params() const { return params_; }
    std::vector<TransformParams>& params() { return params_; }
    const std::optional<std::vector<int>>& labels() const { return labels_; }
    bool has_labels() const { return labels_.has_value(); }

    /// Curves only, identity params, labels dropped.
    CurveSet unlabeled() const;
    /// Members at the given indices, preserving params and labels.
    CurveSet subset(std::span<const std::size_t> indices) const;
    /// Every curve with its own params applied.
    std::vector<Curve> transformed() const;

    friend bool operator==(const CurveSet&, const CurveSet&) = default;

private:
    void validate() const;

    std::vector<Curve> curves_;
    std::vector<TransformParams> params_;
    std::optional<std::vector<int>> labels_;
};

/// w(t) = sum_k phi_k sin(2 pi f_k t) + omega_k cos(2 pi f_k t), f = {1/2, 1}.
double coefficient_function(const TransformParams& params, double t);

/// Monotone warp h(t) = (1/Z) int_0^t exp(int_0^r w(s) ds) dr on an M-point
/// grid. The inner integral is evaluated in closed form, the outer one by
/// the cumulative trapezoidal rule; h is normalized so h(1) = 1.
///
/// Throws ParameterRangeError if exp of the inner integral overflows.
WarpTable warp_function(const TransformParams& params, std::size_t grid_size);

/// Samples `curve` at h(t_i) by linear interpolation, then applies alpha*y+beta.
Curve apply_transform(const Curve& curve, const TransformParams& params);

/// Time-warp half of apply_transform (amplitude untouched).
std::vector<double> warp_samples(const Curve& curve, const TransformParams& params);

/// Amplitude half of apply_transform, in place.
void apply_amplitude(std::span<double> values, const TransformParams& params);

/// Linear interpolation of grid samples at a time in [0, 1].
double interpolate(std::span<const double> samples, double t);

/// Removes the collective drift of the parameter set: zero mean weights,
/// zero mean beta, unit geometric-mean alpha.
CurveSet recenter(const CurveSet& set);
void recenter(std::span<TransformParams> params);

}  // namespace curvealign
