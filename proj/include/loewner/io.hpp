#pragma once

#include <loewner/inverse_solver.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace loewner {

struct ParseError : Error {
  std::size_t line;
  ParseError(const std::string& msg, std::size_t ln)
      : Error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

namespace io_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ParseError("not a number: '" + std::string(s) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value", line);
  return v;
}

// rows of exactly `cols` numbers under the given header
inline std::vector<std::vector<double>> read_table(std::istream& in, std::string_view header, std::size_t cols) {
  std::string line;
  std::size_t ln = 0;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++ln;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    if (!have_header) {
      if (s != header) throw ParseError("expected header '" + std::string(header) + "'", ln);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      row.push_back(parse_double(s.substr(start, comma - start), ln));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (row.size() != cols)
      throw ParseError("expected " + std::to_string(cols) + " fields, got " + std::to_string(row.size()), ln);
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("missing header '" + std::string(header) + "'", ln == 0 ? 1 : ln);
  if (rows.empty()) throw ParseError("no data rows", ln);
  return rows;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open " + path);
  return f;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write " + path);
  return f;
}

}  // namespace io_detail

// t,lambda
inline DrivingTerm read_driving_csv(std::istream& in) {
  const auto rows = io_detail::read_table(in, "t,lambda", 2);
  std::vector<double> t, v;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k > 0 && !(rows[k][0] > rows[k - 1][0]))
      throw ParseError("t not strictly increasing", k + 2);
    t.push_back(rows[k][0]);
    v.push_back(rows[k][1]);
  }
  if (t.front() != 0.0) throw ParseError("first t must be 0", 2);
  return DrivingTerm::from_samples(std::move(t), std::move(v));
}

inline DrivingTerm read_driving_csv(const std::string& path) {
  auto f = io_detail::open_in(path);
  return read_driving_csv(f);
}

inline void write_driving_csv(std::ostream& out, const DrivingTerm& l) {
  out << "t,lambda\n";
  for (std::size_t k = 0; k < l.t.size(); ++k) out << io_detail::fmt(l.t[k]) << ',' << io_detail::fmt(l.value[k]) << '\n';
}

// re,im with the first row on R
inline CurveSamples read_curve_csv(std::istream& in) {
  const auto rows = io_detail::read_table(in, "re,im", 2);
  CurveSamples c;
  for (const auto& r : rows) c.points.emplace_back(r[0], r[1]);
  if (c.points.front().imag() != 0.0) throw ParseError("first point must have im = 0", 2);
  for (std::size_t k = 1; k < c.points.size(); ++k)
    if (!(c.points[k].imag() > 0.0)) throw ParseError("point not in the open upper half-plane", k + 2);
  c.validate();
  return c;
}

inline CurveSamples read_curve_csv(const std::string& path) {
  auto f = io_detail::open_in(path);
  return read_curve_csv(f);
}

inline void write_curve_csv(std::ostream& out, const CurveSamples& c) {
  out << "re,im\n";
  for (const auto& z : c.points) out << io_detail::fmt(z.real()) << ',' << io_detail::fmt(z.imag()) << '\n';
}

inline Trace read_trace_csv(std::istream& in) {
  const auto rows = io_detail::read_table(in, "t,re,im", 3);
  Trace g;
  for (const auto& r : rows) g.pts.push_back({r[0], 0.0, cplx(r[1], r[2])});
  g.T = g.horizon = g.pts.back().t;
  for (auto& p : g.pts) p.rem = g.T - p.t;
  return g;
}

inline void write_trace_csv(std::ostream& out, const Trace& g) {
  out << "t,re,im\n";
  for (const auto& p : g.pts)
    out << io_detail::fmt(p.t) << ',' << io_detail::fmt(p.z.real()) << ',' << io_detail::fmt(p.z.imag()) << '\n';
}

template <class Writer, class Obj>
void write_file(const std::string& path, Writer w, const Obj& obj) {
  auto f = io_detail::open_out(path);
  w(f, obj);
}

// SVG layout, version 1: one <polyline> per curve inside an axis box, y up
inline void write_svg(std::ostream& out, const std::vector<std::vector<cplx>>& curves, int px = 640) {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  bool first = true;
  for (const auto& c : curves)
    for (const auto& z : c) {
      if (!finite(z)) continue;
      if (first) {
        x0 = x1 = z.real();
        y0 = y1 = z.imag();
        first = false;
      }
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    }
  y0 = std::min(y0, 0.0);
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double pad = 0.05 * span, sc = px / (span + 2.0 * pad);
  auto X = [&](double x) { return (x - x0 + pad) * sc; };
  auto Y = [&](double y) { return (y1 - y + pad) * sc; };
  const double w = (x1 - x0 + 2.0 * pad) * sc, h = (y1 - y0 + 2.0 * pad) * sc;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" data-layout=\"loewner-1\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<line x1=\"0\" y1=\"" << Y(0.0) << "\" x2=\"" << w << "\" y2=\"" << Y(0.0) << "\" stroke=\"#888\"/>\n";
  for (const auto& c : curves) {
    out << "<polyline fill=\"none\" stroke=\"#14c\" stroke-width=\"1\" points=\"";
    for (const auto& z : c)
      if (finite(z)) out << X(z.real()) << ',' << Y(z.imag()) << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace loewner
