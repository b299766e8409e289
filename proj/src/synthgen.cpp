#include "curvealign/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvealign/errors.hpp"
#include "curvealign/rng.hpp"

namespace curvealign {

namespace {

double bump(double t, double center, double width) {
    const double z = (t - center) / width;
    return std::exp(-0.5 * z * z);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double builtin_value(std::string_view name, double t) {
    using std::numbers::pi;
    if (name == "bumps2") return bump(t, 0.3, 0.08) + 0.7 * bump(t, 0.65, 0.10);
    if (name == "bumps3") {
        return 0.8 * bump(t, 0.2, 0.05) - 0.6 * bump(t, 0.5, 0.07) + bump(t, 0.78, 0.06);
    }
    if (name == "evenbumps") return 0.85 * bump(t, 0.3, 0.08) + 0.85 * bump(t, 0.65, 0.10);
    if (name == "dampedsine") return std::exp(-3.0 * t) * std::sin(6.0 * pi * t);
    if (name == "plateau") return logistic((t - 0.3) / 0.03) - logistic((t - 0.7) / 0.03);
    if (name == "ecgbeat") {
        return 0.2 * bump(t, 0.2, 0.03) - 0.3 * bump(t, 0.36, 0.02) +
               1.2 * bump(t, 0.42, 0.025) - 0.4 * bump(t, 0.48, 0.02) +
               0.35 * bump(t, 0.72, 0.05);
    }
    throw ConfigError("unknown builtin seed curve '" + std::string(name) + "'");
}

double sample_std(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace

Curve apply_inverse_warp(const Curve& curve, const TransformParams& params) {
    if (!params.has_warp()) return curve;
    const auto samples = curve.samples();
    const std::size_t last = samples.size() - 1;
    const WarpTable warp = warp_function(params, samples.size());
    const auto& h = warp.h_values;
    std::vector<double> out(samples.size());
    std::size_t seg = 0;
    for (std::size_t j = 0; j <= last; ++j) {
        const double target = static_cast<double>(j) / static_cast<double>(last);
        while (seg + 1 < last && h[seg + 1] < target) ++seg;
        const double frac = std::clamp((target - h[seg]) / (h[seg + 1] - h[seg]), 0.0, 1.0);
        const double t = (static_cast<double>(seg) + frac) / static_cast<double>(last);
        out[j] = interpolate(samples, t);
    }
    return Curve(std::move(out));
}

const std::vector<std::string>& builtin_seed_names() {
    static const std::vector<std::string> names = {"bumps2",  "bumps3",  "dampedsine",
                                                   "plateau", "ecgbeat", "evenbumps"};
    return names;
}

Curve builtin_seed_curve(std::string_view name, std::size_t length) {
    if (length < kMinCurveLength) throw ConfigError("builtin curve length too small");
    std::vector<double> samples(length);
    for (std::size_t i = 0; i < length; ++i) {
        samples[i] = builtin_value(name, static_cast<double>(i) / static_cast<double>(length - 1));
    }
    return Curve(std::move(samples));
}

EnabledTransforms transforms_for(TransformFamily family) {
    switch (family) {
        case TransformFamily::AmplitudeScale: return EnabledTransforms::only_scale();
        case TransformFamily::AmplitudeOffset: return EnabledTransforms::only_offset();
        case TransformFamily::TimeWarp: return EnabledTransforms::only_warp();
    }
    return EnabledTransforms::only_warp();
}

std::string_view family_name(TransformFamily family) {
    switch (family) {
        case TransformFamily::AmplitudeScale: return "scale";
        case TransformFamily::AmplitudeOffset: return "offset";
        case TransformFamily::TimeWarp: return "warp";
    }
    return "warp";
}

TransformFamily parse_family(std::string_view name) {
    if (name == "scale") return TransformFamily::AmplitudeScale;
    if (name == "offset") return TransformFamily::AmplitudeOffset;
    if (name == "warp") return TransformFamily::TimeWarp;
    throw ConfigError("unknown transform family '" + std::string(name) +
                      "' (expected warp, scale or offset)");
}

void SynthSpec::validate() const {
    if (seed_curve.size() < kMinCurveLength) throw ConfigError("seed curve is missing");
    if (difficulty < 1 || difficulty > 5) throw ConfigError("difficulty must be in 1..5");
    if (copies < 2) throw ConfigError("copies must be at least 2");
    if (!(range_scale >= 0.0)) throw ConfigError("range_scale must be non-negative");
}

SynthDataset generate(const SynthSpec& spec) {
    spec.validate();
    const double d = static_cast<double>(spec.difficulty) * spec.range_scale;
    const double log_alpha_range = std::log(1.0 + 0.3 * d);
    const double beta_range = 0.4 * d * sample_std(spec.seed_curve.samples());
    const double weight_range = 0.5 * d;

    std::vector<TransformParams> truth(static_cast<std::size_t>(spec.copies));
    for (std::size_t c = 0; c < truth.size(); ++c) {
        Rng rng(derive_seed(spec.rng_seed, c));
        TransformParams& p = truth[c];
        switch (spec.family) {
            case TransformFamily::AmplitudeScale:
                p.alpha = std::exp(rng.uniform(-log_alpha_range, log_alpha_range));
                break;
            case TransformFamily::AmplitudeOffset:
                p.beta = rng.uniform(-beta_range, beta_range);
                break;
            case TransformFamily::TimeWarp:
                for (std::size_t k = 0; k < kNumFrequencies; ++k) {
                    p.sin_weights[k] = rng.uniform(-weight_range, weight_range);
                    p.cos_weights[k] = rng.uniform(-weight_range, weight_range);
                }
                break;
        }
    }

    if (spec.family == TransformFamily::TimeWarp) {
        if (spec.center_warps) {
            std::vector<TransformParams> centered = truth;
            recenter(std::span<TransformParams>(centered));
            for (std::size_t c = 0; c < truth.size(); ++c) {
                truth[c].sin_weights = centered[c].sin_weights;
                truth[c].cos_weights = centered[c].cos_weights;
            }
        }
        for (auto& p : truth) {
            for (std::size_t k = 0; k < kNumFrequencies; ++k) {
                p.sin_weights[k] = std::clamp(p.sin_weights[k], -kDefaultWeightBound, kDefaultWeightBound);
                p.cos_weights[k] = std::clamp(p.cos_weights[k], -kDefaultWeightBound, kDefaultWeightBound);
            }
        }
    }

    std::vector<Curve> curves;
    curves.reserve(truth.size());
    for (const auto& p : truth) {
        curves.push_back(spec.family == TransformFamily::TimeWarp && spec.inverse_warps
                             ? apply_inverse_warp(spec.seed_curve, p)
                             : apply_transform(spec.seed_curve, p));
    }
    return SynthDataset{CurveSet(std::move(curves)), std::move(truth), spec.seed_curve};
}

double recovery_error(std::span<const Curve> aligned, const Curve& seed) {
    if (aligned.empty()) throw DataError("recovery error needs at least one curve");
    const std::size_t m = seed.size();
    for (const auto& c : aligned) {
        if (c.size() != m) throw DataError("aligned curve length differs from the seed");
    }

    // Accumulated relative to the first curve so identical copies average exactly.
    const Curve& first = aligned.front();
    std::vector<double> mean_curve(m, 0.0);
    for (const auto& c : aligned) {
        for (std::size_t i = 0; i < m; ++i) mean_curve[i] += c[i] - first[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
        mean_curve[i] = first[i] + mean_curve[i] / static_cast<double>(aligned.size());
    }

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mean_x += mean_curve[i];
        mean_y += seed[i];
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (mean_curve[i] - mean_x) * (mean_curve[i] - mean_x);
        sxy += (mean_curve[i] - mean_x) * (seed[i] - mean_y);
    }
    const double gain = sxx > 0.0 ? sxy / sxx : 1.0;
    const double offset = mean_y - gain * mean_x;

    double total = 0.0;
    for (const auto& c : aligned) {
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = gain * c[i] + offset - seed[i];
            ss += r * r;
        }
        total += std::sqrt(ss / static_cast<double>(m));
    }
    return total / static_cast<double>(aligned.size());
}

}  // namespace curvealign
