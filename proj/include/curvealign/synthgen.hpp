#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "curvealign/congeal.hpp"
#include "curvealign/curves.hpp"

namespace curvealign {

enum class TransformFamily { AmplitudeScale, AmplitudeOffset, TimeWarp };

/// Length of the bundled seed curves.
inline constexpr std::size_t kBuiltinCurveLength = 150;

/// Names accepted by builtin_seed_curve, in a fixed order.
const std::vector<std::string>& builtin_seed_names();

/// One of the bundled analytic seed curves (see README for closed forms).
/// Throws ConfigError for an unknown name.
Curve builtin_seed_curve(std::string_view name, std::size_t length = kBuiltinCurveLength);

/// The optimizer transforms matching a generating family.
EnabledTransforms transforms_for(TransformFamily family);

std::string_view family_name(TransformFamily family);
/// Accepts "warp", "scale", "offset". Throws ConfigError otherwise.
TransformFamily parse_family(std::string_view name);

struct SynthSpec {
    Curve seed_curve;
    TransformFamily family = TransformFamily::TimeWarp;
    int difficulty = 1;
    int copies = 50;
    std::uint64_t rng_seed = 0;
    /// Multiplies every parameter range; 0 generates exact copies.
    double range_scale = 1.0;
    /// Shift the drawn warp weights to zero sample mean.
    bool center_warps = true;
    /// Corrupt with the inverse of each drawn warp, so the ground-truth
    /// parameters are the ones that map a copy back onto the seed.
    bool inverse_warps = true;

    void validate() const;
};

struct SynthDataset {
    CurveSet curves;
    std::vector<TransformParams> ground_truth;
    Curve seed_curve;
};

/// Emits `copies` randomly transformed versions of the seed curve, drawing
/// only the parameters of `family`:
///   scale:  alpha log-uniform on [1/(1+0.3d), 1+0.3d]
///   offset: beta uniform on [-0.4d, 0.4d] * std(seed)
///   warp:   each weight uniform on [-0.5d, 0.5d], clipped to the weight bound
SynthDataset generate(const SynthSpec& spec);

/// Resamples `curve` through the inverse of the warp h defined by `params`
/// (time warp only), so apply_transform(result, params) recovers `curve` up
/// to interpolation error.
Curve apply_inverse_warp(const Curve& curve, const TransformParams& params);

/// Mean RMSE of the aligned curves to the seed after one shared affine map
/// (least-squares fit of the mean aligned curve onto the seed) is applied.
double recovery_error(std::span<const Curve> aligned, const Curve& seed);

}  // namespace curvealign
