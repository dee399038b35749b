#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tasep::experiment {

/// Schema violation; the message names the field (and line, for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { LppConvergence, HydroCompare, ProfileTable, EntropyReport, EnvelopeAudit };

std::string_view kind_name(Kind kind);

struct RunOptions {
  int jobs = 1;
  bool check = false;
  std::optional<std::uint64_t> seed;            // replaces the config's base seed
  std::uint64_t default_seed = 1;               // used when neither is given
  std::optional<std::filesystem::path> output;  // replaces the config's output directory
};

struct Outcome {
  int exit_code = 0;  // 0 ok, 1 error, 2 tolerance failure under check
  bool within_tolerance = true;
  std::string summary;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs a parsed config. Relative file references inside the config resolve
/// against `base_dir`. Throws ConfigError for schema problems.
Outcome run(std::string_view config_text, const std::filesystem::path& base_dir, const RunOptions& options);

/// Reads and runs a config file; every error becomes exit code 1 with the
/// diagnostic in `summary`.
Outcome run_file(const std::filesystem::path& config, const RunOptions& options);

/// Human-readable description of the config schema.
std::string_view schema();

}  // namespace tasep::experiment
