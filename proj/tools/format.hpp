#pragma once

// Deterministic text output: shortest round-trip floats, fixed key order.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pcs/core_model.hpp"

namespace pcs::cli {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to x. -0 prints as "0";
/// non-finite values print as "nan", "inf" or "-inf".
std::string format_double(double x);

/// {"re": ..., "im": ...}
Json complex_json(Complex z);
Json complex_list_json(const std::vector<Complex>& zs);

/// Two-space indented JSON with numbers written by format_double. Non-finite
/// numbers become null. Ends with a newline.
void write_json(std::ostream& os, const Json& value);

struct CsvRow {
  double C = 0.0;
  std::string branch;
  std::string series;
  int n = 0;
  Complex energy;
  /// Blank for analytic rows.
  bool has_residual = false;
  double residual = 0.0;
};

inline constexpr std::string_view kCsvHeader = "C,branch,series,n,re_E,im_E,residual";

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

}  // namespace pcs::cli
