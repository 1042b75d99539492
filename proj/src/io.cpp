// Copyright 2026 The orbit-tracer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "orbit_tracer/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "orbit_tracer/error.hpp"

namespace orbit_tracer::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorKind::Io, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    fail(ErrorKind::Io, "rename to " + path.string() + " failed: " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 0.0;
};

Range pad(Range r) {
  if (!(r.hi > r.lo)) {
    const double d = r.lo == 0.0 ? 1.0 : std::abs(r.lo) * 0.1;
    return {r.lo - d, r.hi + d};
  }
  const double d = 0.05 * (r.hi - r.lo);
  return {r.lo - d, r.hi + d};
}

std::vector<double> ticks(Range r) {
  const double span = r.hi - r.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double step = (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec) {
  if (series.empty()) fail(ErrorKind::InvalidArgument, "svg: no series");
  Range xr{HUGE_VAL, -HUGE_VAL}, yr{HUGE_VAL, -HUGE_VAL};
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      fail(ErrorKind::InvalidArgument, "svg: series '" + s.label + "' is empty or ragged");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.lo = std::min(xr.lo, s.x[i]);
      xr.hi = std::max(xr.hi, s.x[i]);
      yr.lo = std::min(yr.lo, s.y[i]);
      yr.hi = std::max(yr.hi, s.y[i]);
    }
  }
  if (!(xr.lo <= xr.hi)) xr = {0.0, 1.0};
  if (!(yr.lo <= yr.hi)) yr = {0.0, 1.0};
  xr = pad(xr);
  yr = pad(yr);

  const double W = spec.width, H = spec.height;
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto X = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto Y = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    os << "<text x=\"" << px(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
       << "</text>\n";
  }
  os << "<g stroke=\"#ccc\" stroke-width=\"0.5\">\n";
  for (const double t : ticks(xr)) {
    os << "<line x1=\"" << px(X(t)) << "\" y1=\"" << px(top) << "\" x2=\"" << px(X(t)) << "\" y2=\"" << px(top + ph)
       << "\"/>\n";
  }
  for (const double t : ticks(yr)) {
    os << "<line x1=\"" << px(left) << "\" y1=\"" << px(Y(t)) << "\" x2=\"" << px(left + pw) << "\" y2=\"" << px(Y(t))
       << "\"/>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const double t : ticks(xr)) {
    os << "<text x=\"" << px(X(t)) << "\" y=\"" << px(top + ph + 16) << "\" text-anchor=\"middle\">" << num(t)
       << "</text>\n";
  }
  for (const double t : ticks(yr)) {
    os << "<text x=\"" << px(left - 6) << "\" y=\"" << px(Y(t) + 4) << "\" text-anchor=\"end\">" << num(t)
       << "</text>\n";
  }
  os << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << px(H - 12) << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << px(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << px(top + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    if (s.points_only) {
      os << "<g fill=\"" << color << "\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << px(X(s.x[i])) << "\" cy=\"" << px(Y(s.y[i])) << "\" r=\"2\"/>\n";
      }
      os << "</g>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        if (!first) os << ' ';
        os << px(X(s.x[i])) << ',' << px(Y(s.y[i]));
        first = false;
      }
      os << "\"/>\n";
    }
    for (const auto i : s.markers) {
      if (i >= s.x.size()) continue;
      os << "<circle class=\"marker\" cx=\"" << px(X(s.x[i])) << "\" cy=\"" << px(Y(s.y[i]))
         << "\" r=\"5\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = top + 14 + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << px(left + pw - 150) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(left + pw - 130)
       << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << px(left + pw - 125) << "\" y=\"" << px(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg(const std::vector<Series>& series, const PlotSpec& spec, const fs::path& path) {
  write_atomic(path, render_svg(series, spec));
}

}  // namespace orbit_tracer::io
