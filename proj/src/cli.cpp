#include "curvealign/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "curvealign/congeal.hpp"
#include "curvealign/errors.hpp"
#include "curvealign/evalkit.hpp"
#include "curvealign/io.hpp"
#include "curvealign/synthgen.hpp"

namespace curvealign {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

EnabledTransforms parse_transforms(const std::string& list) {
    EnabledTransforms t{false, false, false};
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "warp") {
            t.time_warp = true;
        } else if (item == "scale") {
            t.amplitude_scale = true;
        } else if (item == "offset") {
            t.amplitude_offset = true;
        } else {
            throw ConfigError("--transforms: unknown transform '" + item +
                              "' (expected warp, scale, offset)");
        }
    }
    if (!t.any()) throw ConfigError("--transforms: no transform given");
    return t;
}

ObjectiveKind parse_objective(const std::string& name) {
    if (name == "entropy") return ObjectiveKind::EntropySum;
    if (name == "variance") return ObjectiveKind::VarianceSum;
    throw ConfigError("--objective: expected entropy or variance, got '" + name + "'");
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

struct CommonOptions {
    std::uint64_t seed = 0;
    bool timestamps = false;
    std::string started;
};

io::RunManifest start_manifest(std::string command, int argc, const char* const* argv,
                               const CommonOptions& common) {
    io::RunManifest manifest;
    manifest.command = std::move(command);
    for (int i = 1; i < argc; ++i) manifest.arguments.emplace_back(argv[i]);
    manifest.seed = common.seed;
    if (common.timestamps) manifest.timestamps = std::make_pair(common.started, std::string());
    return manifest;
}

void stamp_finish(io::RunManifest& manifest) {
    if (manifest.timestamps) manifest.timestamps->second = utc_now();
}

Curve load_seed_curve(const std::string& spec) {
    if (spec.rfind(kBuiltinPrefix, 0) == 0) {
        return builtin_seed_curve(std::string_view(spec).substr(kBuiltinPrefix.size()));
    }
    // A seed file may be a bare row of samples or a labeled dataset; the
    // first curve is used.
    const CurveSet set = io::read_dataset(spec, io::DatasetFormat::Csv);
    return set.curves().front();
}

struct AlignOptions {
    std::string input;
    std::string format = "ucr";
    std::string transforms = "warp,scale,offset";
    std::string objective = "entropy";
    int max_iters = 200;
    std::string out;
};

int run_align(const AlignOptions& o, const CommonOptions& common, int argc,
              const char* const* argv, std::ostream& out) {
    CongealConfig config;
    config.transforms = parse_transforms(o.transforms);
    config.objective = parse_objective(o.objective);
    config.max_iterations = o.max_iters;
    config.seed = common.seed;
    config.validate();

    const CurveSet set = io::read_dataset(o.input, io::parse_format(o.format));
    const AlignmentReport report = congeal(set, config);

    io::RunManifest manifest = start_manifest("align", argc, argv, common);
    manifest.config = io::config_to_json(config);
    manifest.config["format"] = o.format;
    manifest.inputs.emplace_back(o.input, io::file_digest(o.input));
    stamp_finish(manifest);
    io::write_report(report, o.out, manifest);

    out << "aligned " << set.size() << " curves of length " << set.length() << " in "
        << report.iterations_run << " iterations (" << (report.converged ? "converged" : "iteration limit")
        << ")\nobjective: " << io::format_real(report.initial_objective) << " -> "
        << io::format_real(report.objective_trace.back()) << "\n";
    return 0;
}

struct SynthOptions {
    std::string family;
    int difficulty = 1;
    int copies = 50;
    std::string seed_curve = "builtin:bumps2";
    std::string out;
};

int run_synth(const SynthOptions& o, const CommonOptions& common, int argc,
              const char* const* argv, std::ostream& out) {
    SynthSpec spec;
    spec.family = parse_family(o.family);
    spec.difficulty = o.difficulty;
    spec.copies = o.copies;
    spec.rng_seed = common.seed;
    spec.seed_curve = load_seed_curve(o.seed_curve);
    spec.validate();

    const SynthDataset data = generate(spec);
    const fs::path dir = o.out;
    io::ensure_directory(dir);
    io::write_dataset(data.curves, dir / "dataset.csv", io::DatasetFormat::Csv);
    io::write_params(data.ground_truth, dir / "ground_truth.csv");
    io::write_curves(std::span<const Curve>(&data.seed_curve, 1), std::nullopt, dir / "seed.csv");

    io::RunManifest manifest = start_manifest("synth", argc, argv, common);
    manifest.config["family"] = family_name(spec.family);
    manifest.config["difficulty"] = spec.difficulty;
    manifest.config["copies"] = spec.copies;
    manifest.config["seed_curve"] = o.seed_curve;
    manifest.config["center_warps"] = spec.center_warps;
    manifest.config["inverse_warps"] = spec.inverse_warps;
    if (o.seed_curve.rfind(kBuiltinPrefix, 0) != 0) {
        manifest.inputs.emplace_back(o.seed_curve, io::file_digest(o.seed_curve));
    }
    manifest.outputs = {"dataset.csv", "ground_truth.csv", "seed.csv", "manifest.json"};
    stamp_finish(manifest);
    io::write_manifest(manifest, dir / "manifest.json");

    out << "wrote " << spec.copies << " " << family_name(spec.family) << " copies at difficulty "
        << spec.difficulty << " to " << dir.string() << "\n";
    return 0;
}

struct ClassifyOptions {
    std::string input;
    std::string format = "ucr";
    std::string mode = "unsupervised";
    std::string test;
    int folds = 10;
    int k = 10;
    std::string transforms;
    std::string objective = "entropy";
    int max_iters = 200;
    std::string out;
};

nlohmann::ordered_json result_json(const EvalResult& r) {
    nlohmann::ordered_json j;
    j["accuracy"] = r.accuracy;
    j["mean_fold_accuracy"] = r.mean_fold_accuracy();
    j["correct"] = r.correct;
    j["total"] = r.total;
    j["per_fold"] = r.per_fold;
    j["classes"] = r.classes;
    j["confusion"] = r.confusion;
    return j;
}

int run_classify(const ClassifyOptions& o, const CommonOptions& common, int argc,
                 const char* const* argv, std::ostream& out, std::ostream& err) {
    EvalConfig config;
    if (o.mode == "supervised") {
        config.mode = EvalMode::Supervised;
    } else if (o.mode == "unsupervised") {
        config.mode = EvalMode::Unsupervised;
    } else if (o.mode == "none") {
        config.mode = EvalMode::NoAlignment;
    } else {
        throw ConfigError("--mode: expected supervised, unsupervised or none, got '" + o.mode + "'");
    }
    config.k_neighbors = o.k;
    config.folds = o.folds;
    config.seed = common.seed;
    const std::string transforms =
        !o.transforms.empty() ? o.transforms
                              : (config.mode == EvalMode::Supervised ? "warp,scale,offset" : "warp");
    config.congeal_config.transforms = parse_transforms(transforms);
    config.congeal_config.objective = parse_objective(o.objective);
    config.congeal_config.max_iterations = o.max_iters;
    config.validate();
    if (config.mode == EvalMode::Unsupervised &&
        !(config.congeal_config.transforms == EnabledTransforms::only_warp())) {
        throw ConfigError("--transforms: unsupervised mode allows only 'warp' "
                          "(label-blind alignment uses time warps alone)");
    }

    const auto format = io::parse_format(o.format);
    const CurveSet set = io::read_dataset(o.input, format);
    io::RunManifest manifest = start_manifest("classify", argc, argv, common);
    manifest.config = io::config_to_json(config.congeal_config);
    manifest.config["mode"] = o.mode;
    manifest.config["k"] = o.k;
    manifest.inputs.emplace_back(o.input, io::file_digest(o.input));

    EvalComparison result;
    if (!o.test.empty()) {
        const CurveSet test = io::read_dataset(o.test, format);
        manifest.inputs.emplace_back(o.test, io::file_digest(o.test));
        if (config.mode == EvalMode::Unsupervised) {
            throw ConfigError("--test: the unsupervised protocol uses --folds, not a fixed split");
        }
        result = eval_supervised(set, test, config);
    } else {
        manifest.config["folds"] = o.folds;
        result = config.mode == EvalMode::Unsupervised ? eval_unsupervised(set, config)
                                                       : eval_supervised(set, config);
    }
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";

    const fs::path dir = o.out;
    io::ensure_directory(dir);
    nlohmann::ordered_json j;
    j["mode"] = o.mode;
    j["aligned"] = result_json(result.aligned);
    j["baseline"] = result_json(result.baseline);
    j["improvement"] = result.improvement();
    j["warnings"] = result.warnings;
    {
        std::ofstream f(dir / "results.json", std::ios::binary | std::ios::trunc);
        f << j.dump(2) << '\n';
        if (!f) throw DataError("cannot write results.json");
    }
    {
        std::ofstream f(dir / "folds.csv", std::ios::binary | std::ios::trunc);
        f << "fold,aligned_accuracy,baseline_accuracy\n";
        for (std::size_t i = 0; i < result.aligned.per_fold.size(); ++i) {
            f << i << ',' << io::format_real(result.aligned.per_fold[i]) << ','
              << io::format_real(result.baseline.per_fold[i]) << '\n';
        }
        if (!f) throw DataError("cannot write folds.csv");
    }
    manifest.outputs = {"results.json", "folds.csv", "manifest.json"};
    stamp_finish(manifest);
    io::write_manifest(manifest, dir / "manifest.json");

    out << "accuracy without alignment: " << io::format_real(result.baseline.mean_fold_accuracy())
        << "\n";
    if (config.mode != EvalMode::NoAlignment) {
        out << "accuracy with alignment:    " << io::format_real(result.aligned.mean_fold_accuracy())
            << "\n";
        const double delta = result.improvement();
        out << "change: " << io::format_real(delta)
            << (delta < 0 ? "  (alignment reduced accuracy)" : "") << "\n";
    }
    return 0;
}

struct RecoverOptions {
    std::string dataset;
    std::optional<std::uint64_t> seed;
    int max_iters = 200;
};

int run_recover(const RecoverOptions& o, std::ostream& out) {
    const fs::path dir = o.dataset;
    const nlohmann::json manifest = io::read_json(dir / "manifest.json");
    if (!manifest.contains("config") || !manifest["config"].contains("family")) {
        throw DataError("'" + (dir / "manifest.json").string() + "' is not a synth manifest");
    }
    const TransformFamily family = parse_family(manifest["config"]["family"].get<std::string>());
    const CurveSet data = io::read_dataset(dir / "dataset.csv", io::DatasetFormat::Csv);
    const Curve seed_curve =
        io::read_dataset(dir / "seed.csv", io::DatasetFormat::Csv).curves().front();

    CongealConfig config;
    config.objective = ObjectiveKind::VarianceSum;
    config.transforms = transforms_for(family);
    config.max_iterations = o.max_iters;
    config.seed = o.seed.value_or(manifest.value("seed", std::uint64_t{0}));
    const AlignmentReport report = congeal(data, config);

    const double before = recovery_error(data.curves(), seed_curve);
    const double after = recovery_error(report.aligned, seed_curve);
    out << "family: " << family_name(family) << "\n"
        << "recovery_error before: " << io::format_real(before) << "\n"
        << "recovery_error after:  " << io::format_real(after) << "\n"
        << "ratio: " << io::format_real(before > 0 ? after / before : 0.0) << "\n"
        << "iterations: " << report.iterations_run << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonparametric joint alignment of 1-D curves"};
    app.require_subcommand(1);

    CommonOptions common;
    common.started = utc_now();

    AlignOptions align;
    auto* align_cmd = app.add_subcommand("align", "Jointly align a dataset of curves");
    align_cmd->add_option("--input", align.input, "Dataset file")->required();
    align_cmd->add_option("--format", align.format, "ucr or csv")->capture_default_str();
    align_cmd->add_option("--transforms", align.transforms, "Comma list of warp,scale,offset")
        ->capture_default_str();
    align_cmd->add_option("--objective", align.objective, "entropy or variance")->capture_default_str();
    align_cmd->add_option("--max-iters", align.max_iters, "Iteration limit")->capture_default_str();
    align_cmd->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    align_cmd->add_option("--out", align.out, "Output directory")->required();
    align_cmd->add_flag("--timestamps", common.timestamps, "Record wall-clock times in the manifest");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic alignment benchmark");
    synth_cmd->add_option("--family", synth.family, "warp, scale or offset")->required();
    synth_cmd->add_option("--difficulty", synth.difficulty, "1..5")->required();
    synth_cmd->add_option("--copies", synth.copies, "Transformed copies")->capture_default_str();
    synth_cmd->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--seed-curve", synth.seed_curve, "Curve file or builtin:<name>")
        ->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_flag("--timestamps", common.timestamps, "Record wall-clock times in the manifest");

    ClassifyOptions classify;
    auto* classify_cmd = app.add_subcommand("classify", "K-NN classification with and without alignment");
    classify_cmd->add_option("--input", classify.input, "Labeled dataset (training set with --test)")
        ->required();
    classify_cmd->add_option("--format", classify.format, "ucr or csv")->capture_default_str();
    classify_cmd->add_option("--mode", classify.mode, "supervised, unsupervised or none")
        ->capture_default_str();
    auto* test_opt = classify_cmd->add_option("--test", classify.test, "Test split file");
    auto* folds_opt =
        classify_cmd->add_option("--folds", classify.folds, "Stratified folds")->capture_default_str();
    test_opt->excludes(folds_opt);
    classify_cmd->add_option("--k", classify.k, "Neighbors")->capture_default_str();
    classify_cmd->add_option("--transforms", classify.transforms,
                             "Comma list of warp,scale,offset (unsupervised: warp only)");
    classify_cmd->add_option("--objective", classify.objective, "entropy or variance")
        ->capture_default_str();
    classify_cmd->add_option("--max-iters", classify.max_iters, "Iteration limit")
        ->capture_default_str();
    classify_cmd->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    classify_cmd->add_option("--out", classify.out, "Output directory")->required();
    classify_cmd->add_flag("--timestamps", common.timestamps, "Record wall-clock times in the manifest");

    RecoverOptions recover;
    auto* recover_cmd = app.add_subcommand("recover", "Align a synth output and report recovery error");
    recover_cmd->add_option("--dataset", recover.dataset, "Directory written by synth")->required();
    recover_cmd->add_option("--seed", recover.seed, "Random seed (default: the synth seed)");
    recover_cmd->add_option("--max-iters", recover.max_iters, "Iteration limit")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? 0 : 1;
    }

    try {
        if (*align_cmd) return run_align(align, common, argc, argv, out);
        if (*synth_cmd) return run_synth(synth, common, argc, argv, out);
        if (*classify_cmd) return run_classify(classify, common, argc, argv, out, err);
        if (*recover_cmd) return run_recover(recover, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace curvealign
