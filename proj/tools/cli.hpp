#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "format.hpp"
#include "pcs/core_model.hpp"

namespace pcs::cli {

inline constexpr const char* kSchemaVersion = "1";

enum class Command { analyze, spectrum, verify, sl2, bifurcation, exchange };
enum class Format { json, csv };

std::string_view to_string(Command c) noexcept;
Command parse_command(std::string_view name);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verification_failed = 1;
inline constexpr int usage = 2;
inline constexpr int numeric = 3;
}  // namespace exit_code

/// Bad flag, bad config document or an inadmissible value. The message names
/// the offending flag or field.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::analyze;
  std::optional<double> A;
  std::optional<double> B;
  double C = 0.0;
  double alpha = 1.0;
  /// analyze only: physical couplings instead of (A, B).
  std::optional<double> V1;
  std::optional<double> V2;
  Branch branch = Branch::plus;
  /// Grid overrides; the missing half comes from recommended_grid.
  std::optional<double> L;
  std::optional<int> N;
  double tol = 1e-10;
  double tol_match = 1e-6;
  double C_min = 0.0;
  double C_max = 1.0;
  int steps = 11;
  /// bifurcation only: C values that also get a numeric check.
  std::vector<double> numeric_C;
  /// Empty means stdout.
  std::string out;
  /// Unset means: csv when out ends in ".csv", json otherwise.
  std::optional<Format> format;

  Format resolved_format() const;
  SusyParams params() const;
};

/// Overlays a JSON RunConfig document. Keys: command, A, B, C, alpha, V1, V2,
/// branch, L, N, tol, tol_match, C_min, C_max, steps, numeric_C, out, format.
/// Unknown keys and wrongly typed values throw UsageError.
void apply_config(RunConfig& config, const Json& doc);
void apply_config_file(RunConfig& config, const std::string& path);

/// Checks value ranges and flag combinations after all sources are merged.
void validate(const RunConfig& config);

struct RunResult {
  int exit_code = exit_code::ok;
  /// Serialized report (JSON or CSV).
  std::string output;
};

/// Dispatches to the library. Library errors propagate.
RunResult run(const RunConfig& config);

/// Full command line handling: parse flags, overlay --config, validate, run,
/// write the report to --out or `out`, and map errors to exit codes with a
/// message on `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcs::cli
