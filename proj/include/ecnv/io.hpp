#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecnv/dynamics.hpp"
#include "ecnv/norms.hpp"

namespace ecnv {

/// Binary snapshot, little-endian:
///   "ECNV" | u16 version = 1 | u32 N | f64 alpha | f64 t | u64 path_id
/// then q, u1, u2 coefficients as (re, im) f64 pairs in row-major FFT order.
inline constexpr std::size_t snapshot_header_bytes = 4 + 2 + 4 + 8 + 8 + 8;

struct Snapshot {
  SimState state;
  double alpha = 0.0;
  std::uint64_t path_id = 0;
};

std::vector<unsigned char> encode_snapshot(const SimState& state, double alpha, std::uint64_t path_id);
/// Throws InvariantViolation on a bad magic, version, size or a field that is
/// not mean-zero / divergence-free.
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const std::string& path, const SimState& state, double alpha,
                    std::uint64_t path_id);
Snapshot read_snapshot(const std::string& path);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Norm columns of the diagnostics file (squared norms, L4 to the fourth).
const std::vector<std::string>& norm_columns();
/// t followed by the norm columns of the report.
std::vector<double> norm_row(double t, const NormReport& r);

/// Header line, then one line per row. Throws InvariantViolation when a row
/// does not match the header width.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);
void write_text(const std::string& path, const std::string& text);

}  // namespace ecnv
