#include "curvealign/congeal.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <string>

#include "curvealign/errors.hpp"
#include "curvealign/rng.hpp"

namespace curvealign {

void CongealConfig::validate() const {
    if (!transforms.any()) throw ConfigError("no transform family is enabled");
    if (!(steps.weight > 0.0) || !(steps.log_alpha > 0.0) || !(steps.beta > 0.0)) {
        throw ConfigError("step sizes must be positive");
    }
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (stagnation_window < 1) throw ConfigError("stagnation_window must be at least 1");
    if (!(stagnation_tolerance >= 0.0)) {
        throw ConfigError("stagnation_tolerance must be non-negative");
    }
    if (!(anneal_factor > 0.0 && anneal_factor <= 1.0)) {
        throw ConfigError("anneal_factor must lie in (0, 1]");
    }
    if (!(weight_bound > 0.0)) throw ConfigError("weight_bound must be positive");
}

namespace {

enum class Slot { PhiHalf, OmegaHalf, PhiOne, OmegaOne, LogAlpha, Beta };

const char* slot_name(Slot slot) {
    switch (slot) {
        case Slot::PhiHalf: return "phi_half";
        case Slot::OmegaHalf: return "omega_half";
        case Slot::PhiOne: return "phi_one";
        case Slot::OmegaOne: return "omega_one";
        case Slot::LogAlpha: return "log_alpha";
        case Slot::Beta: return "beta";
    }
    return "?";
}

double* weight_of(TransformParams& p, Slot slot) {
    switch (slot) {
        case Slot::PhiHalf: return &p.sin_weights[0];
        case Slot::OmegaHalf: return &p.cos_weights[0];
        case Slot::PhiOne: return &p.sin_weights[1];
        case Slot::OmegaOne: return &p.cos_weights[1];
        default: return nullptr;
    }
}

std::vector<Slot> enabled_slots(const EnabledTransforms& t) {
    std::vector<Slot> slots;
    if (t.time_warp) {
        slots.insert(slots.end(), {Slot::PhiHalf, Slot::OmegaHalf, Slot::PhiOne, Slot::OmegaOne});
    }
    if (t.amplitude_scale) slots.push_back(Slot::LogAlpha);
    if (t.amplitude_offset) slots.push_back(Slot::Beta);
    return slots;
}

double pooled_std(const std::vector<Curve>& curves) {
    double mean = 0.0;
    std::size_t count = 0;
    for (const auto& c : curves) {
        for (double y : c.samples()) mean += y;
        count += c.size();
    }
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (const auto& c : curves) {
        for (double y : c.samples()) ss += (y - mean) * (y - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    return sd > 0.0 ? sd : 1.0;
}

/// Recenters only the enabled families; disabled ones keep their values.
std::vector<TransformParams> recentered(const std::vector<TransformParams>& params,
                                        const EnabledTransforms& enabled) {
    std::vector<TransformParams> out = params;
    recenter(std::span<TransformParams>(out));
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!enabled.time_warp) {
            out[k].sin_weights = params[k].sin_weights;
            out[k].cos_weights = params[k].cos_weights;
        }
        if (!enabled.amplitude_scale) out[k].alpha = params[k].alpha;
        if (!enabled.amplitude_offset) out[k].beta = params[k].beta;
    }
    return out;
}

class Optimizer {
public:
    Optimizer(const CurveSet& set, const CongealConfig& config)
        : set_(set),
          config_(config),
          rng_(config.seed),
          params_(set.params()),
          slots_(enabled_slots(config.transforms)) {
        warped_.reserve(set.size());
        std::vector<Curve> rows;
        rows.reserve(set.size());
        for (std::size_t k = 0; k < set.size(); ++k) {
            warped_.push_back(warp_checked(k, params_[k], Slot::PhiHalf));
            rows.push_back(Curve(amplitude(warped_[k], params_[k])));
        }
        objective_.emplace(rows, config.objective);
        step_weight_ = config.steps.weight;
        step_log_alpha_ = config.steps.log_alpha;
        step_beta_ = config.steps.beta * pooled_std(set.curves());
    }

    AlignmentReport run() {
        AlignmentReport report;
        report.initial_objective = objective_->total();
        std::vector<double> history{objective_->total()};

        for (int iter = 1; iter <= config_.max_iterations; ++iter) {
            long accepted = 0;
            if (config_.recenter) {
                // Recentering is judged after the pass that follows it: the
                // pair is kept only if it does not raise the objective,
                // otherwise the pass is redone from the uncentered state.
                const double before = objective_->total();
                State saved = snapshot();
                if (apply_recenter()) {
                    accepted = run_pass();
                    if (objective_->total() > before) {
                        restore(std::move(saved));
                        accepted = run_pass();
                    }
                } else {
                    accepted = run_pass();
                }
            } else {
                accepted = run_pass();
            }

            report.accepted_moves += accepted;
            report.objective_trace.push_back(objective_->total());
            history.push_back(objective_->total());
            report.iterations_run = iter;
            if (accepted == 0) {
                step_weight_ *= config_.anneal_factor;
                step_log_alpha_ *= config_.anneal_factor;
                step_beta_ *= config_.anneal_factor;
            }

            const auto window = static_cast<std::size_t>(config_.stagnation_window);
            if (history.size() > window) {
                const double before = history[history.size() - 1 - window];
                const double now = history.back();
                const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
                if (std::abs(before - now) / scale < config_.stagnation_tolerance) {
                    report.converged = true;
                    break;
                }
            }
        }

        report.final_set = CurveSet(set_.curves(), params_, set_.labels());
        report.aligned.reserve(set_.size());
        for (std::size_t k = 0; k < set_.size(); ++k) {
            report.aligned.push_back(Curve(amplitude(warped_[k], params_[k])));
        }
        return report;
    }

private:
    std::vector<double> warp_checked(std::size_t k, const TransformParams& p, Slot slot) const {
        try {
            return warp_samples(set_.curves()[k], p);
        } catch (const NumericalError& e) {
            throw NumericalError("objective evaluation failed for curve " + std::to_string(k) +
                                 ", parameter " + slot_name(slot) + ": " + e.what());
        }
    }

    static std::vector<double> amplitude(std::vector<double> values, const TransformParams& p) {
        apply_amplitude(values, p);
        return values;
    }

    double step_for(Slot slot) const {
        if (slot == Slot::LogAlpha) return step_log_alpha_;
        if (slot == Slot::Beta) return step_beta_;
        return step_weight_;
    }

    std::optional<TransformParams> perturbed(const TransformParams& p, Slot slot,
                                             double delta) const {
        TransformParams out = p;
        if (slot == Slot::LogAlpha) {
            out.alpha = p.alpha * std::exp(delta);
            if (!(out.alpha > 0.0) || !std::isfinite(out.alpha)) return std::nullopt;
        } else if (slot == Slot::Beta) {
            out.beta = p.beta + delta;
        } else {
            double* w = weight_of(out, slot);
            *w += delta;
            if (std::abs(*w) > config_.weight_bound) return std::nullopt;
        }
        return out;
    }

    bool try_slot(std::size_t k, Slot slot) {
        const double step = step_for(slot);
        const double u = rng_.uniform(-step, step);
        const bool warp_slot = slot != Slot::LogAlpha && slot != Slot::Beta;
        for (double delta : {u, -u}) {
            const auto candidate = perturbed(params_[k], slot, delta);
            if (!candidate) continue;
            std::vector<double> warped =
                warp_slot ? warp_checked(k, *candidate, slot) : warped_[k];
            std::vector<double> row = amplitude(warped, *candidate);
            const double value = objective_->evaluate_replacement(k, row);
            if (!std::isfinite(value)) {
                throw NumericalError("objective is not finite for curve " + std::to_string(k) +
                                     ", parameter " + slot_name(slot));
            }
            if (value < objective_->total()) {
                objective_->replace(k, row);
                params_[k] = *candidate;
                warped_[k] = std::move(warped);
                return true;
            }
        }
        return false;
    }

    struct State {
        std::vector<TransformParams> params;
        std::vector<std::vector<double>> warped;
        ColumnObjective objective;
    };

    State snapshot() const { return State{params_, warped_, *objective_}; }

    void restore(State state) {
        params_ = std::move(state.params);
        warped_ = std::move(state.warped);
        objective_.emplace(std::move(state.objective));
    }

    long run_pass() {
        long accepted = 0;
        for (std::size_t k = 0; k < set_.size(); ++k) {
            for (Slot slot : slots_) accepted += try_slot(k, slot) ? 1 : 0;
        }
        return accepted;
    }

    /// Recenters the enabled families in place; false if nothing changed.
    bool apply_recenter() {
        std::vector<TransformParams> next = recentered(params_, config_.transforms);
        if (next == params_) return false;
        std::vector<Curve> rows;
        rows.reserve(set_.size());
        for (std::size_t k = 0; k < set_.size(); ++k) {
            if (config_.transforms.time_warp) warped_[k] = warp_checked(k, next[k], Slot::PhiHalf);
            rows.push_back(Curve(amplitude(warped_[k], next[k])));
        }
        params_ = std::move(next);
        objective_.emplace(rows, config_.objective);
        return true;
    }

    const CurveSet& set_;
    const CongealConfig& config_;
    Rng rng_;
    std::vector<TransformParams> params_;
    std::vector<Slot> slots_;
    std::vector<std::vector<double>> warped_;
    std::optional<ColumnObjective> objective_;
    double step_weight_ = 0.0;
    double step_log_alpha_ = 0.0;
    double step_beta_ = 0.0;
};

}  // namespace

AlignmentReport congeal(const CurveSet& set, const CongealConfig& config) {
    config.validate();
    const std::size_t needed = std::max<std::size_t>(2, min_curves_for(config.objective));
    if (set.size() < needed) {
        throw DataError("congealing needs at least " + std::to_string(needed) +
                        " curves for this objective, got " + std::to_string(set.size()));
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (!set.params()[k].is_valid(config.weight_bound)) {
            throw DataError("initial parameters of curve " + std::to_string(k) + " are invalid");
        }
    }
    return Optimizer(set, config).run();
}

PerClassAlignment align_per_class(const CurveSet& set, const CongealConfig& config) {
    if (!set.has_labels()) throw DataError("per-class alignment needs labels");
    const auto& labels = *set.labels();
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t k = 0; k < labels.size(); ++k) members[labels[k]].push_back(k);

    const std::size_t needed = std::max<std::size_t>(2, min_curves_for(config.objective));
    for (const auto& [label, idx] : members) {
        if (idx.size() < needed) {
            throw DataError("class " + std::to_string(label) + " has " +
                            std::to_string(idx.size()) + " members; at least " +
                            std::to_string(needed) + " are required");
        }
    }

    PerClassAlignment out;
    std::vector<TransformParams> params = set.params();
    out.aligned.resize(set.size());
    for (const auto& [label, idx] : members) {
        CongealConfig class_config = config;
        class_config.seed = config.seed + static_cast<std::uint64_t>(static_cast<std::int64_t>(label));
        AlignmentReport report = congeal(set.subset(idx), class_config);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            params[idx[j]] = report.final_set.params()[j];
            out.aligned[idx[j]] = report.aligned[j];
        }
        out.by_class.emplace(label, std::move(report));
    }
    out.final_set = CurveSet(set.curves(), std::move(params), set.labels());
    return out;
}

std::size_t count_trace_violations(const AlignmentReport& report) {
    std::size_t violations = 0;
    double previous = report.initial_objective;
    for (double value : report.objective_trace) {
        if (value > previous) ++violations;
        previous = value;
    }
    return violations;
}

}  // namespace curvealign
