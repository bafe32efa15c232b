#pragma once

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "synthesis.hpp"

namespace glance::io {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw config_error("cannot open " + path + " for writing");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << fmt(v[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// GLNC1 binary grid: magic "GLNC", version 1, little-endian
struct GridFile {
  std::uint64_t nx = 0, ny = 0;
  double x0 = 0, dx = 0, y0 = 0, dy = 0;
  bool is_complex = false;
  std::vector<double> data;  // row-major, interleaved re/im when complex
};

inline constexpr std::uint32_t glnc_magic = 0x434E4C47u;  // bytes 'G','L','N','C'
inline constexpr std::uint32_t glnc_version = 1;

namespace detail {

template <class T>
void put_le(std::ostream& o, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>)
    bits = std::bit_cast<std::uint64_t>(v);
  else
    bits = std::uint64_t(v);
  for (std::size_t k = 0; k < sizeof(T); ++k) o.put(char((bits >> (8 * k)) & 0xff));
}

template <class T>
T get_le(std::istream& in) {
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    int c = in.get();
    if (c == EOF) throw config_error("GLNC1: truncated file");
    bits |= std::uint64_t(std::uint8_t(c)) << (8 * k);
  }
  if constexpr (std::is_same_v<T, double>)
    return std::bit_cast<double>(bits);
  else
    return T(bits);
}

}  // namespace detail

inline void write_grid(const std::string& path, const GridFile& g) {
  std::size_t expect = g.nx * g.ny * (g.is_complex ? 2 : 1);
  if (g.data.size() != expect) throw config_error("GLNC1: payload size does not match header");
  std::ofstream o(path, std::ios::binary);
  if (!o) throw config_error("cannot open " + path + " for writing");
  detail::put_le<std::uint32_t>(o, glnc_magic);
  detail::put_le<std::uint32_t>(o, glnc_version);
  detail::put_le<std::uint64_t>(o, g.nx);
  detail::put_le<std::uint64_t>(o, g.ny);
  detail::put_le<double>(o, g.x0);
  detail::put_le<double>(o, g.dx);
  detail::put_le<double>(o, g.y0);
  detail::put_le<double>(o, g.dy);
  detail::put_le<std::uint8_t>(o, g.is_complex ? 1 : 0);
  for (double v : g.data) detail::put_le<double>(o, v);
}

inline GridFile read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  if (detail::get_le<std::uint32_t>(in) != glnc_magic) throw config_error("GLNC1: bad magic");
  if (detail::get_le<std::uint32_t>(in) != glnc_version) throw config_error("GLNC1: unsupported version");
  GridFile g;
  g.nx = detail::get_le<std::uint64_t>(in);
  g.ny = detail::get_le<std::uint64_t>(in);
  g.x0 = detail::get_le<double>(in);
  g.dx = detail::get_le<double>(in);
  g.y0 = detail::get_le<double>(in);
  g.dy = detail::get_le<double>(in);
  g.is_complex = detail::get_le<std::uint8_t>(in) != 0;
  std::size_t n = g.nx * g.ny * (g.is_complex ? 2 : 1);
  if (n > (std::size_t(1) << 34)) throw config_error("GLNC1: header size implausible");
  g.data.resize(n);
  for (auto& v : g.data) v = detail::get_le<double>(in);
  return g;
}

inline GridFile plane_grid(const Field2D& f, std::size_t row) {
  GridFile g;
  const auto& yg = f.grid;
  g.nx = g.ny = yg.points;
  g.x0 = g.y0 = yg.y(0);
  g.dx = g.dy = yg.dy();
  g.is_complex = true;
  g.data.reserve(2 * yg.points * yg.points);
  for (std::size_t i = 0; i < yg.points; ++i)
    for (std::size_t j = 0; j < yg.points; ++j) {
      g.data.push_back(f.at(row, i, j).real());
      g.data.push_back(f.at(row, i, j).imag());
    }
  return g;
}

inline void write_wavefront_svg(const std::string& path, const WavefrontReport& rep, const YGrid& g) {
  const double px = 24.0;
  const double W = px * double(rep.cells_p), H = px * double(rep.cells_n);
  const double y0 = g.y(0), L = g.extent;
  auto sx = [&](double yp) { return (yp - y0) / L * W; };
  auto sy = [&](double yn) { return H - (yn - y0) / L * H; };
  std::ofstream o(path);
  if (!o) throw config_error("cannot open " + path + " for writing");
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(H) << "\">\n";
  for (std::size_t ci = 0; ci < rep.cells_p; ++ci)
    for (std::size_t cj = 0; cj < rep.cells_n; ++cj) {
      std::size_t c = ci * rep.cells_n + cj;
      const char* fill = rep.cls[c] == DecayClass::singular ? "#d62728"
                         : rep.cls[c] == DecayClass::inconclusive ? "#bbbbbb"
                         : rep.shadow[c]                          ? "#1f3b73"
                                                                  : "#3b6fb6";
      o << "<rect x=\"" << fmt(px * double(ci)) << "\" y=\"" << fmt(H - px * double(cj + 1)) << "\" width=\""
        << fmt(px) << "\" height=\"" << fmt(px) << "\" fill=\"" << fill << "\"/>\n";
    }
  for (const auto& p : rep.predicted)
    o << "<circle cx=\"" << fmt(sx(p[0])) << "\" cy=\"" << fmt(sy(p[1])) << "\" r=\"1\" fill=\"#ffd700\"/>\n";
  o << "</svg>\n";
}

inline const char* class_name(DecayClass c) {
  switch (c) {
    case DecayClass::smooth: return "smooth";
    case DecayClass::singular: return "singular";
    default: return "inconclusive";
  }
}

}  // namespace glance::io
