#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "curvealign/congeal.hpp"
#include "curvealign/curves.hpp"

namespace curvealign::io {

enum class DatasetFormat { Ucr, Csv };

/// "ucr" or "csv"; throws ConfigError otherwise.
DatasetFormat parse_format(std::string_view name);

/// Shortest decimal text that round-trips (at most 17 significant digits).
/// Always uses '.' regardless of locale.
std::string format_real(double value);

/// Parses a complete token as a real; nullopt on any trailing garbage.
std::optional<double> parse_real(std::string_view token);

/// ucr: one series per line, label first, then samples; comma or whitespace
/// separated. csv: comma separated, optional header row, optional `label`
/// column. Throws DataError naming the line for ragged rows, non-numeric
/// fields and empty files.
CurveSet read_dataset(const std::filesystem::path& path, DatasetFormat format);
CurveSet parse_dataset(std::string_view text, DatasetFormat format,
                       std::string_view source = "<memory>");

void write_dataset(const CurveSet& set, const std::filesystem::path& path,
                   DatasetFormat format);
void write_curves(std::span<const Curve> curves, const std::optional<std::vector<int>>& labels,
                  const std::filesystem::path& path);

/// Columns: curve_index,alpha,beta,phi_half,omega_half,phi_one,omega_one.
void write_params(std::span<const TransformParams> params, const std::filesystem::path& path);
std::vector<TransformParams> read_params(const std::filesystem::path& path);

/// Columns: iteration,total (iteration counts from 1).
void write_trace(std::span<const double> trace, const std::filesystem::path& path);

/// Columns: curve_index,h_0,...,h_{M-1}.
void write_warps(std::span<const TransformParams> params, std::size_t grid_size,
                 const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

/// Everything needed to rerun a command bit-identically.
struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
    /// Input path -> digest.
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::string> outputs;
    /// Wall-clock start/end, recorded only on request so default outputs
    /// stay byte-identical across reruns.
    std::optional<std::pair<std::string, std::string>> timestamps;

    nlohmann::ordered_json to_json() const;
};

inline constexpr std::string_view kToolVersion = "1.0.0";

nlohmann::ordered_json config_to_json(const CongealConfig& config);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes aligned.csv, params.csv, trace.csv, warps.csv and manifest.json
/// into out_dir (created if missing). Returns the written file names.
std::vector<std::string> write_report(const AlignmentReport& report,
                                      const std::filesystem::path& out_dir,
                                      RunManifest manifest);

/// Creates the directory (and parents); DataError if that fails.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace curvealign::io
