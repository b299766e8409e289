#include <doctest.h>

#include <cmath>
#include <random>

#include "curvealign/congeal.hpp"
#include "curvealign/errors.hpp"
#include "curvealign/synthgen.hpp"
#include "test_support.hpp"

using namespace curvealign;

namespace {

Curve ramp_bump(std::size_t m, double center) {
    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(m - 1);
        s[i] = std::exp(-0.5 * std::pow((t - center) / 0.1, 2)) + 0.3 * t;
    }
    return Curve(s);
}

double mean_rmse_to(std::span<const Curve> curves, const Curve& seed) {
    double total = 0.0;
    for (const auto& c : curves) total += testing::rmse(c.samples(), seed.samples());
    return total / static_cast<double>(curves.size());
}

CongealConfig variance_config(EnabledTransforms transforms, std::uint64_t seed = 1) {
    CongealConfig cfg;
    cfg.objective = ObjectiveKind::VarianceSum;
    cfg.transforms = transforms;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    CongealConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.transforms = {false, false, false};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.steps.weight = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.steps.beta = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.stagnation_window = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.anneal_factor = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.anneal_factor = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.max_iterations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("entropy objective needs four curves") {
    const std::vector<Curve> three(3, ramp_bump(30, 0.5));
    CongealConfig cfg;
    CHECK_THROWS_AS(congeal(CurveSet(three), cfg), DataError);
    cfg.objective = ObjectiveKind::VarianceSum;
    CHECK_NOTHROW(congeal(CurveSet(three), cfg));
    CHECK_THROWS_AS(congeal(CurveSet({ramp_bump(30, 0.5)}), cfg), DataError);
}

TEST_CASE("identical curves stay at identity") {
    const std::vector<Curve> same(8, ramp_bump(60, 0.4));
    for (auto kind : {ObjectiveKind::VarianceSum, ObjectiveKind::EntropySum}) {
        CongealConfig cfg;
        cfg.objective = kind;
        const auto report = congeal(CurveSet(same), cfg);
        CHECK(report.converged);
        CHECK(report.iterations_run <= cfg.stagnation_window + 1);
        CHECK(report.accepted_moves == 0);
        for (const auto& p : report.final_set.params()) CHECK(p == TransformParams::identity());
        CHECK(count_trace_violations(report) == 0);
    }
}

TEST_CASE("two curves with an offset are brought together") {
    const Curve base = ramp_bump(80, 0.5);
    std::vector<double> shifted(base.samples().begin(), base.samples().end());
    for (double& v : shifted) v += 0.5;
    const CurveSet set({base, Curve(shifted)});

    const auto report = congeal(set, variance_config(EnabledTransforms::only_offset()));
    CHECK(testing::rmse(report.aligned[0].samples(), report.aligned[1].samples()) < 1e-3);
    const auto& p = report.final_set.params();
    CHECK(p[0].beta - p[1].beta == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(count_trace_violations(report) == 0);
}

TEST_CASE("warped copies of a seed are aligned back") {
    SynthSpec spec;
    spec.seed_curve = builtin_seed_curve("bumps2");
    spec.family = TransformFamily::TimeWarp;
    spec.difficulty = 2;
    spec.rng_seed = 11;
    const auto data = generate(spec);

    const double before = mean_rmse_to(data.curves.curves(), spec.seed_curve);
    const auto report = congeal(data.curves, variance_config(EnabledTransforms::only_warp()));
    const double after = mean_rmse_to(report.aligned, spec.seed_curve);
    CHECK(before > 0.0);
    CHECK(after <= 0.2 * before);
    CHECK(count_trace_violations(report) == 0);
    CHECK(report.iterations_run <= 200);
}

TEST_CASE("determinism and family closure") {
    SynthSpec spec;
    spec.seed_curve = builtin_seed_curve("plateau", 60);
    spec.family = TransformFamily::AmplitudeScale;
    spec.difficulty = 3;
    spec.copies = 10;
    spec.rng_seed = 5;
    const auto data = generate(spec);

    CongealConfig cfg = variance_config(EnabledTransforms::only_scale(), 9);
    cfg.max_iterations = 30;
    const auto a = congeal(data.curves, cfg);
    const auto b = congeal(data.curves, cfg);
    CHECK(a.final_set == b.final_set);
    CHECK(a.objective_trace == b.objective_trace);
    CHECK(a.accepted_moves == b.accepted_moves);
    CHECK(a.iterations_run == b.iterations_run);
    CHECK(a.iterations_run <= cfg.max_iterations);

    for (const auto& p : a.final_set.params()) {
        CHECK(p.beta == 0.0);
        CHECK_FALSE(p.has_warp());
    }

    cfg.transforms = EnabledTransforms::only_warp();
    const auto w = congeal(data.curves, cfg);
    for (const auto& p : w.final_set.params()) {
        CHECK(p.alpha == 1.0);
        CHECK(p.beta == 0.0);
    }
}

TEST_CASE("weights respect the bound") {
    SynthSpec spec;
    spec.seed_curve = builtin_seed_curve("bumps3", 60);
    spec.family = TransformFamily::TimeWarp;
    spec.difficulty = 5;
    spec.copies = 8;
    spec.rng_seed = 2;
    const auto data = generate(spec);

    CongealConfig cfg = variance_config(EnabledTransforms::only_warp());
    cfg.weight_bound = 0.05;
    cfg.steps.weight = 0.2;
    cfg.max_iterations = 25;
    cfg.recenter = false;
    const auto report = congeal(data.curves, cfg);
    for (const auto& p : report.final_set.params()) {
        for (std::size_t k = 0; k < kNumFrequencies; ++k) {
            CHECK(std::abs(p.sin_weights[k]) <= cfg.weight_bound);
            CHECK(std::abs(p.cos_weights[k]) <= cfg.weight_bound);
        }
    }
}

TEST_CASE("initial parameters outside the bound are rejected") {
    std::vector<TransformParams> params(4);
    params[2].sin_weights[0] = 7.0;
    const CurveSet set(std::vector<Curve>(4, ramp_bump(30, 0.5)), params, std::nullopt);
    CHECK_THROWS(congeal(set, variance_config(EnabledTransforms::only_warp())));
}

TEST_CASE("traces are monotone for every objective and family") {
    std::mt19937_64 gen(3);
    for (auto kind : {ObjectiveKind::VarianceSum, ObjectiveKind::EntropySum}) {
        for (auto family : {TransformFamily::TimeWarp, TransformFamily::AmplitudeScale,
                            TransformFamily::AmplitudeOffset}) {
            SynthSpec spec;
            spec.seed_curve = builtin_seed_curve("ecgbeat", 50);
            spec.family = family;
            spec.difficulty = 3;
            spec.copies = 12;
            spec.rng_seed = gen();
            const auto data = generate(spec);
            CongealConfig cfg;
            cfg.objective = kind;
            cfg.transforms = EnabledTransforms{true, true, true};
            cfg.max_iterations = 15;
            cfg.seed = gen();
            const auto report = congeal(data.curves, cfg);
            CHECK(count_trace_violations(report) == 0);
            CHECK(static_cast<int>(report.objective_trace.size()) == report.iterations_run);
            CHECK(report.objective_trace.back() <= report.initial_objective);
        }
    }
}

TEST_CASE("per-class alignment") {
    SUBCASE("single class matches plain congeal with the derived seed") {
        SynthSpec spec;
        spec.seed_curve = builtin_seed_curve("bumps2", 50);
        spec.copies = 6;
        spec.rng_seed = 4;
        const auto data = generate(spec);
        const CurveSet labeled(data.curves.curves(), std::vector<int>(6, 3));

        CongealConfig cfg = variance_config(EnabledTransforms::only_warp(), 20);
        cfg.max_iterations = 20;
        const auto per_class = align_per_class(labeled, cfg);
        auto plain_cfg = cfg;
        plain_cfg.seed = cfg.seed + 3;
        const auto plain = congeal(data.curves, plain_cfg);
        CHECK(per_class.final_set.params() == plain.final_set.params());
        CHECK(per_class.aligned == plain.aligned);
        REQUIRE(per_class.by_class.count(3) == 1);
    }

    SUBCASE("internally identical classes accept nothing") {
        std::vector<Curve> curves;
        std::vector<int> labels;
        for (int i = 0; i < 10; ++i) {
            curves.push_back(ramp_bump(40, i % 2 ? 0.3 : 0.7));
            labels.push_back(i % 2);
        }
        const auto result = align_per_class(CurveSet(curves, labels), CongealConfig{});
        for (const auto& [label, report] : result.by_class) CHECK(report.accepted_moves == 0);
        CHECK(result.aligned == curves);
        CHECK(result.final_set.labels() == labels);
    }

    SUBCASE("two synthetic classes recover their seeds") {
        std::vector<Curve> curves;
        std::vector<int> labels;
        std::vector<Curve> seeds = {builtin_seed_curve("bumps2", 80),
                                    builtin_seed_curve("plateau", 80)};
        for (int c = 0; c < 2; ++c) {
            SynthSpec spec;
            spec.seed_curve = seeds[c];
            spec.family = TransformFamily::AmplitudeOffset;
            spec.difficulty = 3;
            spec.copies = 10;
            spec.rng_seed = 30 + c;
            const auto data = generate(spec);
            for (const auto& curve : data.curves.curves()) {
                curves.push_back(curve);
                labels.push_back(c);
            }
        }
        const CurveSet set(curves, labels);
        const auto result =
            align_per_class(set, variance_config(EnabledTransforms::only_offset()));
        for (int c = 0; c < 2; ++c) {
            std::vector<Curve> before(curves.begin() + 10 * c, curves.begin() + 10 * (c + 1));
            std::vector<Curve> after(result.aligned.begin() + 10 * c,
                                     result.aligned.begin() + 10 * (c + 1));
            CHECK(recovery_error(after, seeds[c]) <= 0.2 * recovery_error(before, seeds[c]));
        }
    }

    SUBCASE("errors") {
        const std::vector<Curve> curves(5, ramp_bump(30, 0.5));
        CHECK_THROWS_AS(align_per_class(CurveSet(curves), CongealConfig{}), DataError);
        const CurveSet small(curves, {0, 0, 0, 0, 1});
        try {
            align_per_class(small, variance_config(EnabledTransforms::only_warp()));
            FAIL("expected an error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("class 1") != std::string::npos);
        }
    }
}
