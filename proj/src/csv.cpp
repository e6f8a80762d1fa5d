#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "ecnv/io.hpp"

namespace ecnv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const std::vector<std::string>& norm_columns() {
  static const std::vector<std::string> cols{"l2q", "l4q4", "hhalfq", "l2u", "h1u", "h2u", "h32q", "script_h"};
  return cols;
}

std::vector<double> norm_row(double t, const NormReport& r) {
  return {t, r.q_l2_sq, r.q_l4_4, r.q_h_half_sq, r.u_l2_sq, r.u_h1_sq, r.u_h2_sq, r.q_h_three_half_sq,
          r.script_h_sq};
}

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InvariantViolation("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw InvalidParameter("cannot write '" + path + "'");
}

}  // namespace ecnv
