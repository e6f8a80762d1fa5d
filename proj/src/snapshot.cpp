#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ecnv/io.hpp"

namespace ecnv {

namespace {

constexpr char magic[4] = {'E', 'C', 'N', 'V'};
constexpr std::uint16_t version = 1;

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

template <class T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(in[pos + b]) << (8 * b);
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<unsigned char> encode_snapshot(const SimState& state, double alpha, std::uint64_t path_id) {
  const Grid& g = state.q.grid();
  std::vector<unsigned char> out;
  out.reserve(snapshot_header_bytes + 3 * g.size() * 16);
  out.insert(out.end(), std::begin(magic), std::end(magic));
  put_le(out, version);
  put_le(out, static_cast<std::uint32_t>(g.n()));
  put_le(out, alpha);
  put_le(out, state.t);
  put_le(out, path_id);
  for (const auto coeffs : {state.q.coeffs(), state.u.comp1().coeffs(), state.u.comp2().coeffs()})
    for (const Complex& c : coeffs) {
      put_le(out, c.real());
      put_le(out, c.imag());
    }
  return out;
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < snapshot_header_bytes || std::memcmp(bytes.data(), magic, 4) != 0)
    throw InvariantViolation("snapshot: bad magic or truncated header");
  std::size_t pos = 4;
  if (get_le<std::uint16_t>(bytes, pos) != version) throw InvariantViolation("snapshot: unsupported version");
  const auto n = get_le<std::uint32_t>(bytes, pos);
  if (n < 8 || n % 2 != 0 || n > 4096) throw InvariantViolation("snapshot: bad grid size");
  const Grid grid(static_cast<int>(n));
  if (bytes.size() != snapshot_header_bytes + 3 * grid.size() * 16)
    throw InvariantViolation("snapshot: file size does not match the header");
  Snapshot s;
  s.alpha = get_le<double>(bytes, pos);
  const double t = get_le<double>(bytes, pos);
  s.path_id = get_le<std::uint64_t>(bytes, pos);
  s.state = SimState::zero(grid);
  s.state.t = t;
  for (const auto coeffs : {s.state.q.coeffs(), s.state.u.comp1().coeffs(), s.state.u.comp2().coeffs()})
    for (Complex& c : coeffs) {
      const double re = get_le<double>(bytes, pos);
      const double im = get_le<double>(bytes, pos);
      c = Complex(re, im);
    }
  const double scale =
      1.0 + static_cast<double>(n) * std::max(s.state.u.comp1().max_abs(), s.state.u.comp2().max_abs());
  if (s.state.u.divergence_defect() > 1e-9 * scale)
    throw InvariantViolation("snapshot: velocity is not divergence-free");
  s.state.validate();
  return s;
}

void write_snapshot(const std::string& path, const SimState& state, double alpha,
                    std::uint64_t path_id) {
  const auto bytes = encode_snapshot(state, alpha, path_id);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidParameter("cannot write snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open snapshot '" + path + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace ecnv
