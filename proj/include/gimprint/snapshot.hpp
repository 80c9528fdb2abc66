// Snapshot files and CSV metrics.
//
// Snapshot layout:
//   GIMPRINT1 <n_comp> <nx> <nz> <lx> <lz> <t>\n
//   n_comp * nx * nz little-endian float64 pairs (re, im), component-major,
//   x outer, z inner.
// Floats in the header use the shortest decimal that round-trips. The grid is
// assumed centred on the origin when read back.
#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "gimprint/core.hpp"
#include "gimprint/propagator.hpp"
#include "gimprint/spinor_field.hpp"

namespace gimprint::io {

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw ValidationError("not a number: '" + s + "'");
  return v;
}

inline std::string snapshot_header(const SpinorField& f, double t) {
  const Grid2D& g = f.grid();
  std::ostringstream os;
  os << "GIMPRINT1 " << f.n_comp() << ' ' << g.nx() << ' ' << g.nz() << ' ' << format_double(g.lx())
     << ' ' << format_double(g.lz()) << ' ' << format_double(t);
  return os.str();
}

namespace detail {
inline void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (auto& c : b) {
    c = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
  os.write(b.data(), 8);
}

inline double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}
}  // namespace detail

inline void write_snapshot(std::ostream& os, const SpinorField& f, double t) {
  require(f.representation() == Representation::Position, "write_snapshot: expects a position-space field");
  os << snapshot_header(f, t) << '\n';
  for (const cplx& v : f.data()) {
    detail::put_le(os, v.real());
    detail::put_le(os, v.imag());
  }
}

inline void write_snapshot(const std::string& path, const SpinorField& f, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, f, t);
}

struct Snapshot {
  SpinorField field;
  double t;
};

inline Snapshot read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ValidationError("snapshot: missing header");
  std::istringstream hs(header);
  std::string magic, lx, lz, t;
  std::size_t n_comp = 0, nx = 0, nz = 0;
  hs >> magic >> n_comp >> nx >> nz >> lx >> lz >> t;
  if (magic != "GIMPRINT1" || !hs) throw ValidationError("snapshot: bad header '" + header + "'");
  SpinorField f(Grid2D(nx, nz, parse_double(lx), parse_double(lz)), n_comp);
  std::vector<unsigned char> raw(f.data().size() * 16);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (is.gcount() != static_cast<std::streamsize>(raw.size())) throw ValidationError("snapshot: truncated payload");
  auto data = f.data();
  for (std::size_t n = 0; n < data.size(); ++n)
    data[n] = {detail::get_le(&raw[16 * n]), detail::get_le(&raw[16 * n + 8])};
  return {std::move(f), parse_double(t)};
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

/// Metrics CSV columns: t, norm, pop_0 .. pop_{n-1}, centroid_x, centroid_z,
/// momentum_x, momentum_z, leakage.
inline void write_metrics_header(std::ostream& os, std::size_t n_comp) {
  os << "t,norm";
  for (std::size_t c = 0; c < n_comp; ++c) os << ",pop_" << c;
  os << ",centroid_x,centroid_z,momentum_x,momentum_z,leakage\n";
}

inline void write_metrics_row(std::ostream& os, const propagator::MetricsRow& r) {
  os << format_double(r.t) << ',' << format_double(r.norm);
  for (double p : r.populations) os << ',' << format_double(p);
  os << ',' << format_double(r.centroid.x) << ',' << format_double(r.centroid.z) << ','
     << format_double(r.momentum.x) << ',' << format_double(r.momentum.z) << ','
     << format_double(r.leakage) << '\n';
}

}  // namespace gimprint::io
