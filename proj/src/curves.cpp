#include "curvealign/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "curvealign/errors.hpp"

namespace curvealign {

Curve::Curve(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.size() < kMinCurveLength) {
        throw DataError("curve has " + std::to_string(samples_.size()) +
                        " samples; at least " + std::to_string(kMinCurveLength) +
                        " are required");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            throw DataError("curve sample " + std::to_string(i) + " is not finite");
        }
    }
}

bool TransformParams::has_warp() const {
    auto nonzero = [](double w) { return w != 0.0; };
    return std::ranges::any_of(sin_weights, nonzero) ||
           std::ranges::any_of(cos_weights, nonzero);
}

bool TransformParams::is_valid(double weight_bound) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) return false;
    auto in_bound = [weight_bound](double w) {
        return std::isfinite(w) && std::abs(w) <= weight_bound;
    };
    return std::ranges::all_of(sin_weights, in_bound) &&
           std::ranges::all_of(cos_weights, in_bound);
}

CurveSet::CurveSet(std::vector<Curve> curves)
    : CurveSet(std::move(curves), {}, std::nullopt) {}

CurveSet::CurveSet(std::vector<Curve> curves, std::vector<int> labels)
    : CurveSet(std::move(curves), {}, std::move(labels)) {}

CurveSet::CurveSet(std::vector<Curve> curves, std::vector<TransformParams> params,
                   std::optional<std::vector<int>> labels)
    : curves_(std::move(curves)), params_(std::move(params)), labels_(std::move(labels)) {
    if (params_.empty()) params_.assign(curves_.size(), TransformParams::identity());
    validate();
}

void CurveSet::validate() const {
    if (curves_.empty()) throw DataError("curve set is empty");
    const std::size_t m = curves_.front().size();
    for (std::size_t k = 0; k < curves_.size(); ++k) {
        if (curves_[k].size() != m) {
            throw DataError("curve " + std::to_string(k) + " has length " +
                            std::to_string(curves_[k].size()) + ", expected " +
                            std::to_string(m));
        }
    }
    if (params_.size() != curves_.size()) {
        throw DataError("parameter count does not match curve count");
    }
    if (labels_ && labels_->size() != curves_.size()) {
        throw DataError("label count does not match curve count");
    }
}

CurveSet CurveSet::unlabeled() const { return CurveSet(curves_); }

CurveSet CurveSet::subset(std::span<const std::size_t> indices) const {
    std::vector<Curve> curves;
    std::vector<TransformParams> params;
    std::optional<std::vector<int>> labels;
    if (labels_) labels.emplace();
    for (std::size_t i : indices) {
        curves.push_back(curves_.at(i));
        params.push_back(params_.at(i));
        if (labels_) labels->push_back((*labels_)[i]);
    }
    return CurveSet(std::move(curves), std::move(params), std::move(labels));
}

std::vector<Curve> CurveSet::transformed() const {
    std::vector<Curve> out;
    out.reserve(curves_.size());
    for (std::size_t k = 0; k < curves_.size(); ++k) {
        out.push_back(apply_transform(curves_[k], params_[k]));
    }
    return out;
}

namespace {

double basis_argument(std::size_t k, double t) {
    return 2.0 * std::numbers::pi * kFrequencies[k] * t;
}

/// Antiderivatives of the Fourier basis, sampled on an M-point grid:
/// int_0^t sin(2 pi f s) ds and int_0^t cos(2 pi f s) ds.
struct IntegratedBasis {
    std::size_t grid_size = 0;
    std::array<std::vector<double>, kNumFrequencies> sin;
    std::array<std::vector<double>, kNumFrequencies> cos;
};

const IntegratedBasis& integrated_basis(std::size_t grid_size) {
    thread_local IntegratedBasis table;
    if (table.grid_size != grid_size) {
        table.grid_size = grid_size;
        for (std::size_t k = 0; k < kNumFrequencies; ++k) {
            const double omega = 2.0 * std::numbers::pi * kFrequencies[k];
            table.sin[k].resize(grid_size);
            table.cos[k].resize(grid_size);
            for (std::size_t i = 0; i < grid_size; ++i) {
                const double arg =
                    basis_argument(k, static_cast<double>(i) / static_cast<double>(grid_size - 1));
                table.sin[k][i] = (1.0 - std::cos(arg)) / omega;
                table.cos[k][i] = std::sin(arg) / omega;
            }
        }
    }
    return table;
}

}  // namespace

double coefficient_function(const TransformParams& params, double t) {
    double w = 0.0;
    for (std::size_t k = 0; k < kNumFrequencies; ++k) {
        const double arg = basis_argument(k, t);
        w += params.sin_weights[k] * std::sin(arg) + params.cos_weights[k] * std::cos(arg);
    }
    return w;
}

WarpTable warp_function(const TransformParams& params, std::size_t grid_size) {
    if (grid_size < kMinCurveLength) {
        throw DataError("warp grid needs at least " + std::to_string(kMinCurveLength) +
                        " points");
    }
    const std::size_t last = grid_size - 1;
    WarpTable table;
    table.h_values.resize(grid_size);

    if (!params.has_warp()) {
        for (std::size_t i = 0; i < grid_size; ++i) {
            table.h_values[i] = static_cast<double>(i) / static_cast<double>(last);
        }
        return table;
    }

    const double dt = 1.0 / static_cast<double>(last);
    const IntegratedBasis& basis = integrated_basis(grid_size);

    // W(t) = int_0^t w(s) ds is exact for the Fourier basis; the outer
    // integral of exp(W) is a cumulative trapezoid on the grid.
    double slope_prev = 1.0;
    double outer = 0.0;
    table.h_values[0] = 0.0;
    for (std::size_t i = 1; i < grid_size; ++i) {
        double inner = 0.0;
        for (std::size_t k = 0; k < kNumFrequencies; ++k) {
            inner += params.sin_weights[k] * basis.sin[k][i] + params.cos_weights[k] * basis.cos[k][i];
        }
        const double slope = std::exp(inner);
        if (!std::isfinite(slope) || slope <= 0.0) {
            throw ParameterRangeError(
                "warp slope exp(W) left the representable range at t=" +
                std::to_string(static_cast<double>(i) * dt) + "; Fourier weights are too large");
        }
        outer += 0.5 * dt * (slope_prev + slope);
        table.h_values[i] = outer;
        slope_prev = slope;
    }
    if (!std::isfinite(outer)) {
        throw ParameterRangeError("warp normalizing constant is not finite");
    }

    for (std::size_t i = 1; i < last; ++i) {
        table.h_values[i] /= outer;
        if (!(table.h_values[i] > table.h_values[i - 1])) {
            throw ParameterRangeError("warp is not strictly increasing at grid index " +
                                      std::to_string(i));
        }
    }
    table.h_values[last] = 1.0;
    if (!(table.h_values[last] > table.h_values[last - 1])) {
        throw ParameterRangeError("warp is not strictly increasing at the right endpoint");
    }
    return table;
}

double interpolate(std::span<const double> samples, double t) {
    const std::size_t last = samples.size() - 1;
    const double x = t * static_cast<double>(last);
    std::size_t j = x <= 0.0 ? 0 : static_cast<std::size_t>(x);
    if (j >= last) j = last - 1;
    const double frac = x - static_cast<double>(j);
    return samples[j] + frac * (samples[j + 1] - samples[j]);
}

std::vector<double> warp_samples(const Curve& curve, const TransformParams& params) {
    const auto samples = curve.samples();
    if (!params.has_warp()) return {samples.begin(), samples.end()};
    const WarpTable warp = warp_function(params, samples.size());
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i] = interpolate(samples, warp.h_values[i]);
    }
    return out;
}

void apply_amplitude(std::span<double> values, const TransformParams& params) {
    for (double& y : values) y = params.alpha * y + params.beta;
}

Curve apply_transform(const Curve& curve, const TransformParams& params) {
    std::vector<double> out = warp_samples(curve, params);
    apply_amplitude(out, params);
    return Curve(std::move(out));
}

void recenter(std::span<TransformParams> params) {
    if (params.size() < 2) return;
    const double n = static_cast<double>(params.size());
    const TransformParams& ref = params.front();

    // Means are accumulated as offsets from the first member so that a set of
    // identical parameters recenters exactly onto the identity.
    double beta_offset = 0.0;
    double log_alpha_offset = 0.0;
    std::array<double, kNumFrequencies> sin_offset{};
    std::array<double, kNumFrequencies> cos_offset{};
    for (const auto& p : params) {
        beta_offset += p.beta - ref.beta;
        log_alpha_offset += std::log(p.alpha) - std::log(ref.alpha);
        for (std::size_t k = 0; k < kNumFrequencies; ++k) {
            sin_offset[k] += p.sin_weights[k] - ref.sin_weights[k];
            cos_offset[k] += p.cos_weights[k] - ref.cos_weights[k];
        }
    }
    const double mean_beta = ref.beta + beta_offset / n;
    const double alpha_scale = ref.alpha * std::exp(log_alpha_offset / n);
    std::array<double, kNumFrequencies> mean_sin{};
    std::array<double, kNumFrequencies> mean_cos{};
    for (std::size_t k = 0; k < kNumFrequencies; ++k) {
        mean_sin[k] = ref.sin_weights[k] + sin_offset[k] / n;
        mean_cos[k] = ref.cos_weights[k] + cos_offset[k] / n;
    }

    for (auto& p : params) {
        p.beta -= mean_beta;
        p.alpha /= alpha_scale;
        for (std::size_t k = 0; k < kNumFrequencies; ++k) {
            p.sin_weights[k] -= mean_sin[k];
            p.cos_weights[k] -= mean_cos[k];
        }
    }
}

CurveSet recenter(const CurveSet& set) {
    if (set.size() < 2) throw DataError("recentering needs at least two curves");
    CurveSet out = set;
    recenter(std::span<TransformParams>(out.params()));
    return out;
}

}  // namespace curvealign
