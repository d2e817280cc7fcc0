#include "format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace pcs::cli {
namespace {

void write_value(std::ostream& os, const Json& v, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(key).dump() << ": ";
        write_value(os, item, depth + 1);
      }
      os << '\n' << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        write_value(os, item, depth + 1);
      }
      os << '\n' << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      os << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

Json complex_json(Complex z) {
  Json j = Json::object();
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

Json complex_list_json(const std::vector<Complex>& zs) {
  Json out = Json::array();
  for (const Complex& z : zs) out.push_back(complex_json(z));
  return out;
}

void write_json(std::ostream& os, const Json& value) {
  write_value(os, value, 0);
  os << '\n';
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const CsvRow& r : rows) {
    os << format_double(r.C) << ',' << r.branch << ',' << r.series << ',' << r.n << ','
       << format_double(r.energy.real()) << ',' << format_double(r.energy.imag()) << ',';
    if (r.has_residual) os << format_double(r.residual);
    os << '\n';
  }
}

}  // namespace pcs::cli
