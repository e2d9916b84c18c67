#pragma once

// Command-line front end, result envelopes, report emission and the spectrum
// cache.
//
// Exit codes: 0 success, 2 usage error, 3 computation error, 4 io error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sysfree/arith_surfaces.hpp"
#include "sysfree/freedom_pipeline.hpp"

namespace sysfree::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCacheDirVariable = "SYSFREE_CACHE_DIR";

enum class OutputFormat { kJson, kCsv, kPlain };

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitComputation = 3, kExitIo = 4 };

struct RunConfig {
  std::string command;  // "help" when only usage text was requested
  json params = json::object();
  OutputFormat format = OutputFormat::kJson;
  std::string output_path;
  std::string cache_dir;
  std::string help_text;
};

// argv without the program name. Throws UsageError (or IoError when a
// referenced file cannot be read).
RunConfig parse_cli(const std::vector<std::string>& args);

struct ResultEnvelope {
  std::string command;
  json params;
  json results;
  std::string version = kVersion;
  double duration_seconds = 0.0;
};

ResultEnvelope execute(const RunConfig& config);

// Deterministic serialisation: JSON keys sorted, CSV rows in computed order,
// reals with 12 significant digits.
std::string emit(const ResultEnvelope& envelope, OutputFormat format);

// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Full CLI: parse, execute, emit. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 12-significant-digit rounding applied to every real in a JSON tree.
json round_reals(const json& value, int digits = 12);
std::string format_real(double value, int digits = 12);

// Spectrum cache schema:
// {p, N, traceBound, boxBound, entries: [{absTrace, length, witnesses: [[a,b,c,d], ...]}]}
json spectrum_to_json(const arith::LengthSpectrum& spectrum);
// Validates the schema and every witness; throws CacheInvalidError.
arith::LengthSpectrum spectrum_from_json(const json& doc);

std::filesystem::path spectrum_cache_path(const std::filesystem::path& dir, std::int64_t p,
                                          std::int64_t n, std::int64_t trace_bound,
                                          std::int64_t box_bound);
void write_spectrum_cache(const arith::LengthSpectrum& spectrum,
                          const std::filesystem::path& path);
arith::LengthSpectrum read_spectrum_cache(const std::filesystem::path& path);
arith::LengthSpectrum cache_roundtrip(const arith::LengthSpectrum& spectrum,
                                      const std::filesystem::path& path);

// Reads the cached spectrum when present and valid, otherwise enumerates and
// (when a cache directory is given) writes it back.
arith::LengthSpectrum load_or_compute_spectrum(const arith::FuchsianParams& params,
                                               arith::CongruenceLevel level,
                                               std::int64_t trace_bound,
                                               std::int64_t box_bound,
                                               const std::optional<std::filesystem::path>& cache_dir,
                                               unsigned threads = 0);

// CSV columns of the freedom report.
inline constexpr const char* kReportCsvHeader = "g,n,eps,sys1_lb,sys2_lb,vol_ub,ratio_ub";

std::string report_to_csv(const pipeline::FreedomReport& report);
json report_to_json(const pipeline::FreedomReport& report);
pipeline::FreedomReport report_from_json(const json& doc);

// Flat map of named constants; unknown names and non-numeric values rejected.
pipeline::PipelineConstants constants_from_json(const json& doc);
pipeline::PipelineConstants load_constants(const std::filesystem::path& path);
json constants_to_json(const pipeline::PipelineConstants& constants);

// ceil(genus_estimate(residue order)) for each level.
std::vector<std::int64_t> genera_from_levels(const arith::FuchsianParams& params,
                                             const std::vector<std::int64_t>& levels,
                                             arith::Rational chi0);

arith::Rational parse_rational(const std::string& text);

}  // namespace sysfree::cli
