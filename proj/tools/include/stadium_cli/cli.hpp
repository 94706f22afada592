#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stadium/discretize.hpp"
#include "stadium/geometry.hpp"
#include "stadium/spectra.hpp"

namespace stadium::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitPartial = 2,
  kExitNoCrossings = 3,
  kExitValidation = 4,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a command needs. Defaults < JSON config file < command-line flags.
struct RunConfig {
  Geometry geometry = StadiumGeometry(1.0);
  double h = 1.0 / 64.0;
  GridMode mode = GridMode::Quadrant;
  std::vector<SymmetryClass> classes{SymmetryClass::EE};
  std::size_t k = 8;
  double tol = kDefaultTolerance;
  std::uint64_t seed = kDefaultSeed;
  double threshold = kDefaultSymmetryThreshold;

  std::vector<double> a_values;  // sweep abscissae; empty unless a sweep is configured
  double min_prominence = 0.5;
  double delta = 0.05;
  double refine_width = 1e-3;
  bool refine = true;  // false: detection only, no fresh solves

  std::filesystem::path output = "runs";
  std::size_t threads = 1;
};

/// Strict JSON parser: unknown keys and wrong types are ConfigErrors.
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});
std::string run_config_to_json(const RunConfig& config);
/// Science parameters only, as embedded in output files.
std::string science_config_json(const RunConfig& config);

/// Hash over the science parameters only (output directory and threads excluded).
std::string run_hash(const RunConfig& config);

/// Pre-compute checks shared by all commands; throws ConfigError.
void validate_common(const RunConfig& config);

SweepConfig to_sweep_config(const RunConfig& config);
SpectrumOptions to_spectrum_options(const RunConfig& config);

/// File name pieces: 1 -> "1", 0.785 -> "0.785", 1.5100001 -> "1.51".
std::string format_a(double a);

int cmd_solve(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& log, std::ostream& err);

struct CrossingsInput {
  std::filesystem::path curves;  // defaults to <output>/curves.json
};
int cmd_crossings(const RunConfig& config, const CrossingsInput& input, std::ostream& log, std::ostream& err);

struct RenderInput {
  std::optional<std::filesystem::path> field;   // binary field dump
  std::optional<std::filesystem::path> curves;  // curves.json
  std::vector<std::size_t> curve_indices;       // 1-based; empty = all
  std::vector<double> levels;                   // empty = default levels
  std::filesystem::path out;
};
int cmd_render(const RunConfig& config, const RenderInput& input, std::ostream& log, std::ostream& err);

using Assembler = std::function<SparseSymMatrix(const Grid&)>;

struct ValidationOptions {
  bool quick = false;
  Assembler assembler = assemble_laplacian;
  std::uint64_t seed = kDefaultSeed;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_validation(const ValidationOptions& options);
int cmd_validate(const ValidationOptions& options, std::ostream& out);

/// Full command line (argv[0] excluded). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stadium::cli
