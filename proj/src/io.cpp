#include "curvealign/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "curvealign/errors.hpp"

namespace curvealign::io {

namespace fs = std::filesystem;

DatasetFormat parse_format(std::string_view name) {
    if (name == "ucr") return DatasetFormat::Ucr;
    if (name == "csv") return DatasetFormat::Csv;
    throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected ucr or csv)");
}

std::string format_real(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

std::optional<double> parse_real(std::string_view token) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return std::nullopt;
    double value = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, bool whitespace_too) {
    std::vector<std::string_view> fields;
    const std::string_view separators = whitespace_too ? ", \t\r" : ",";
    std::size_t pos = 0;
    while (pos <= line.size()) {
        if (whitespace_too) {
            const auto start = line.find_first_not_of(separators, pos);
            if (start == std::string_view::npos) break;
            const auto end = line.find_first_of(separators, start);
            fields.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
            if (end == std::string_view::npos) break;
            pos = end;
        } else {
            const auto end = line.find(',', pos);
            fields.push_back(trim(line.substr(pos, end == std::string_view::npos ? end : end - pos)));
            if (end == std::string_view::npos) break;
            pos = end + 1;
        }
    }
    return fields;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& message) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + message);
}

double number_at(std::string_view source, std::size_t line, std::size_t field,
                 std::string_view token) {
    const auto value = parse_real(token);
    if (!value) {
        fail(source, line, "field " + std::to_string(field + 1) + " ('" + std::string(token) +
                               "') is not a number");
    }
    if (!std::isfinite(*value)) {
        fail(source, line, "field " + std::to_string(field + 1) + " is not finite");
    }
    return *value;
}

int label_at(std::string_view source, std::size_t line, std::size_t field,
             std::string_view token) {
    const double value = number_at(source, line, field, token);
    if (value != std::floor(value) || std::abs(value) > 1e9) {
        fail(source, line, "label '" + std::string(token) + "' is not an integer");
    }
    return static_cast<int>(value);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace

CurveSet parse_dataset(std::string_view text, DatasetFormat format, std::string_view source) {
    std::vector<Curve> curves;
    std::vector<int> labels;
    std::optional<std::size_t> label_column;
    bool has_labels = format == DatasetFormat::Ucr;
    std::size_t expected = 0;
    std::size_t first_data_line = 0;
    bool header_checked = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        const auto fields = split_fields(line, format == DatasetFormat::Ucr);

        if (format == DatasetFormat::Csv && !header_checked) {
            header_checked = true;
            const bool is_header = std::any_of(fields.begin(), fields.end(), [](auto f) {
                return !parse_real(f).has_value();
            });
            if (is_header) {
                for (std::size_t f = 0; f < fields.size(); ++f) {
                    if (fields[f] == "label") label_column = f;
                }
                has_labels = label_column.has_value();
                expected = fields.size() - (has_labels ? 1 : 0);
                first_data_line = line_no;
                continue;
            }
        }

        std::vector<double> samples;
        samples.reserve(fields.size());
        std::optional<int> label;
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const bool is_label = format == DatasetFormat::Ucr ? f == 0 : label_column == f;
            if (is_label) {
                label = label_at(source, line_no, f, fields[f]);
            } else {
                samples.push_back(number_at(source, line_no, f, fields[f]));
            }
        }
        if (has_labels && !label) fail(source, line_no, "missing label");

        if (first_data_line == 0 || (expected == 0 && curves.empty())) {
            if (expected == 0) expected = samples.size();
            if (first_data_line == 0) first_data_line = line_no;
        }
        if (samples.size() != expected) {
            fail(source, line_no, "ragged row: " + std::to_string(samples.size()) +
                                      " samples, expected " + std::to_string(expected) +
                                      " (as on line " + std::to_string(first_data_line) + ")");
        }
        try {
            curves.emplace_back(std::move(samples));
        } catch (const DataError& e) {
            fail(source, line_no, e.what());
        }
        if (label) labels.push_back(*label);
    }

    if (curves.empty()) throw DataError(std::string(source) + ": dataset is empty");
    if (has_labels) return CurveSet(std::move(curves), std::move(labels));
    return CurveSet(std::move(curves));
}

CurveSet read_dataset(const fs::path& path, DatasetFormat format) {
    return parse_dataset(read_file(path), format, path.string());
}

void write_curves(std::span<const Curve> curves, const std::optional<std::vector<int>>& labels,
                  const fs::path& path) {
    auto out = open_output(path);
    const std::size_t m = curves.empty() ? 0 : curves.front().size();
    if (labels) out << "label,";
    for (std::size_t i = 0; i < m; ++i) out << (i ? ",s" : "s") << i;
    out << '\n';
    for (std::size_t k = 0; k < curves.size(); ++k) {
        if (labels) out << (*labels)[k] << ',';
        for (std::size_t i = 0; i < m; ++i) out << (i ? "," : "") << format_real(curves[k][i]);
        out << '\n';
    }
    finish_output(out, path);
}

void write_dataset(const CurveSet& set, const fs::path& path, DatasetFormat format) {
    if (format == DatasetFormat::Csv) {
        write_curves(set.curves(), set.labels(), path);
        return;
    }
    if (!set.has_labels()) throw DataError("ucr output requires class labels");
    auto out = open_output(path);
    for (std::size_t k = 0; k < set.size(); ++k) {
        out << (*set.labels())[k];
        for (double y : set.curves()[k].samples()) out << ',' << format_real(y);
        out << '\n';
    }
    finish_output(out, path);
}

void write_params(std::span<const TransformParams> params, const fs::path& path) {
    auto out = open_output(path);
    out << "curve_index,alpha,beta,phi_half,omega_half,phi_one,omega_one\n";
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& p = params[k];
        out << k << ',' << format_real(p.alpha) << ',' << format_real(p.beta) << ','
            << format_real(p.sin_weights[0]) << ',' << format_real(p.cos_weights[0]) << ','
            << format_real(p.sin_weights[1]) << ',' << format_real(p.cos_weights[1]) << '\n';
    }
    finish_output(out, path);
}

std::vector<TransformParams> read_params(const fs::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<TransformParams> params;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = trim(line);
        if (trimmed.empty() || line_no == 1) continue;
        const auto fields = split_fields(trimmed, false);
        if (fields.size() != 7) fail(path.string(), line_no, "expected 7 columns");
        std::array<double, 7> v{};
        for (std::size_t f = 0; f < 7; ++f) v[f] = number_at(path.string(), line_no, f, fields[f]);
        TransformParams p;
        p.alpha = v[1];
        p.beta = v[2];
        p.sin_weights = {v[3], v[5]};
        p.cos_weights = {v[4], v[6]};
        params.push_back(p);
    }
    return params;
}

void write_trace(std::span<const double> trace, const fs::path& path) {
    auto out = open_output(path);
    out << "iteration,total\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << (i + 1) << ',' << format_real(trace[i]) << '\n';
    }
    finish_output(out, path);
}

void write_warps(std::span<const TransformParams> params, std::size_t grid_size,
                 const fs::path& path) {
    auto out = open_output(path);
    out << "curve_index";
    for (std::size_t i = 0; i < grid_size; ++i) out << ",h_" << i;
    out << '\n';
    for (std::size_t k = 0; k < params.size(); ++k) {
        const WarpTable warp = warp_function(params[k], grid_size);
        out << k;
        for (double h : warp.h_values) out << ',' << format_real(h);
        out << '\n';
    }
    finish_output(out, path);
}

std::string file_digest(const fs::path& path) {
    const std::string bytes = read_file(path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "curvealign";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["arguments"] = arguments;
    j["seed"] = seed;
    j["config"] = config;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"fnv1a64", digest}});
    j["outputs"] = outputs;
    if (timestamps) {
        j["timestamps"] = {{"started", timestamps->first}, {"finished", timestamps->second}};
    }
    return j;
}

nlohmann::ordered_json config_to_json(const CongealConfig& config) {
    nlohmann::ordered_json j;
    j["objective"] = config.objective == ObjectiveKind::EntropySum ? "entropy" : "variance";
    nlohmann::ordered_json transforms = nlohmann::ordered_json::array();
    if (config.transforms.time_warp) transforms.push_back("warp");
    if (config.transforms.amplitude_scale) transforms.push_back("scale");
    if (config.transforms.amplitude_offset) transforms.push_back("offset");
    j["transforms"] = transforms;
    j["step_weight"] = config.steps.weight;
    j["step_log_alpha"] = config.steps.log_alpha;
    j["step_beta_std_units"] = config.steps.beta;
    j["max_iterations"] = config.max_iterations;
    j["stagnation_window"] = config.stagnation_window;
    j["stagnation_tolerance"] = config.stagnation_tolerance;
    j["anneal_factor"] = config.anneal_factor;
    j["weight_bound"] = config.weight_bound;
    j["recenter"] = config.recenter;
    j["seed"] = config.seed;
    return j;
}

void write_manifest(const RunManifest& manifest, const fs::path& path) {
    auto out = open_output(path);
    out << manifest.to_json().dump(2) << '\n';
    finish_output(out, path);
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw DataError("cannot create output directory '" + dir.string() + "'");
    }
}

std::vector<std::string> write_report(const AlignmentReport& report, const fs::path& out_dir,
                                      RunManifest manifest) {
    ensure_directory(out_dir);
    write_curves(report.aligned, report.final_set.labels(), out_dir / "aligned.csv");
    write_params(report.final_set.params(), out_dir / "params.csv");
    write_trace(report.objective_trace, out_dir / "trace.csv");
    write_warps(report.final_set.params(), report.final_set.length(), out_dir / "warps.csv");
    manifest.outputs = {"aligned.csv", "params.csv", "trace.csv", "warps.csv", "manifest.json"};
    manifest.config["iterations_run"] = report.iterations_run;
    manifest.config["converged"] = report.converged;
    manifest.config["accepted_moves"] = report.accepted_moves;
    write_manifest(manifest, out_dir / "manifest.json");
    return manifest.outputs;
}

}  // namespace curvealign::io
