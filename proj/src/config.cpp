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

#include "orbit_tracer/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/io.hpp"

namespace orbit_tracer::config {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) { fail(ErrorKind::Config, key + " " + what); }

// Strict view of one JSON object; every accessor records its key so that
// leftovers can be rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "config" : path_, "must be an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }
  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number()) bad(key(k), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad(key(k), "must be finite");
    return x;
  }
  double positive(const std::string& k, double def) {
    const double x = number(k, def);
    if (!(x > 0.0)) bad(key(k), "must be > 0");
    return x;
  }
  double nonneg(const std::string& k, double def) {
    const double x = number(k, def);
    if (!(x >= 0.0)) bad(key(k), "must be >= 0");
    return x;
  }
  long long integer(const std::string& k, long long def, long long min) {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number_integer()) bad(key(k), "must be an integer");
    const long long x = v.get<long long>();
    if (x < min) bad(key(k), "must be >= " + std::to_string(min));
    return x;
  }
  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_boolean()) bad(key(k), "must be true or false");
    return v.get<bool>();
  }
  std::string choice(const std::string& k, const std::string& def, const std::vector<std::string>& allowed) {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_string()) bad(key(k), "must be a string");
    const auto s = v.get<std::string>();
    for (const auto& a : allowed) {
      if (s == a) return s;
    }
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    bad(key(k), "must be one of {" + list + "}, got '" + s + "'");
  }
  RealVector vector(const std::string& k) {
    const auto& v = raw(k);
    if (!v.is_array()) bad(key(k), "must be an array of numbers");
    RealVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) bad(key(k), "must be an array of numbers");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    if (!out.allFinite()) bad(key(k), "must be finite");
    return out;
  }
  RealMatrix matrix(const std::string& k) {
    const auto& v = raw(k);
    if (!v.is_array() || v.empty() || !v[0].is_array()) bad(key(k), "must be an array of rows");
    const auto rows = v.size(), cols = v[0].size();
    RealMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!v[i].is_array() || v[i].size() != cols) bad(key(k), "rows must have equal length");
      for (std::size_t c = 0; c < cols; ++c) {
        if (!v[i][c].is_number()) bad(key(k), "must contain numbers");
        out(i, c) = v[i][c].get<double>();
      }
    }
    return out;
  }
  Obj object(const std::string& k) { return Obj(raw(k), key(k)); }

  /// Rejects keys that no accessor asked for.
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) bad(key(it.key()), "is not a recognized key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

signal::FourierSeries series_from(const json& j, const std::string& key) {
  try {
    return j.get<signal::FourierSeries>();
  } catch (const Error& e) {
    bad(key, std::string("is not a valid Fourier series: ") + e.what());
  } catch (const std::exception& e) {
    bad(key, std::string("is not a valid Fourier series: ") + e.what());
  }
}

struct Dims {
  int n, m;
};

Dims dims_of(const PlantConfig& p) {
  if (p.name == "duffing") return {2, 3};
  if (p.name == "linear") return {2, 2};
  if (p.name == "beam") return {4, 3};
  return {1, 0};
}

void parse_reference(Obj o, ReferenceConfig& r, const fs::path& base_dir, int depth) {
  int forms = 0;
  if (o.has("generator")) {
    ++forms;
    r.kind = ReferenceConfig::Kind::Generator;
    r.generator = series_from(o.raw("generator"), o.key("generator"));
  }
  if (o.has("series")) {
    ++forms;
    r.kind = ReferenceConfig::Kind::Series;
    const auto& arr = o.raw("series");
    if (!arr.is_array() || arr.empty()) bad(o.key("series"), "must be a nonempty array of Fourier series");
    r.series.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      r.series.push_back(series_from(arr[i], o.key("series") + "[" + std::to_string(i) + "]"));
    }
  }
  if (o.has("open_loop_orbit")) {
    ++forms;
    r.kind = ReferenceConfig::Kind::OpenLoopOrbit;
    Obj ol = o.object("open_loop_orbit");
    r.settle_periods = static_cast<int>(ol.integer("settle_periods", 200, 2));
    r.K = static_cast<int>(ol.integer("K", 5, 1));
    ol.done();
  }
  if (o.has("from_file")) {
    ++forms;
    if (depth > 0) bad(o.key("from_file"), "may not be nested");
    const auto& v = o.raw("from_file");
    if (!v.is_string()) bad(o.key("from_file"), "must be a string");
    r.from_file = v.get<std::string>();
    fs::path p = r.from_file;
    if (p.is_relative()) p = base_dir / p;
    json inner;
    try {
      inner = json::parse(io::read_file(p));
    } catch (const Error& e) {
      bad(o.key("from_file"), std::string("cannot be read: ") + e.what());
    } catch (const json::exception& e) {
      bad(o.key("from_file"), std::string("is not valid JSON: ") + e.what());
    }
    const std::string keep = r.from_file;
    parse_reference(Obj(inner, o.key("from_file")), r, p.parent_path(), depth + 1);
    r.from_file = keep;
  }
  if (forms > 1) bad(o.key("reference"), "must use exactly one of generator, series, open_loop_orbit, from_file");
  o.done();
}

}  // namespace

RunConfig parse(const json& j, const fs::path& base_dir) {
  RunConfig c;
  Obj root(j, "");
  if (!root.has("schema")) bad("schema", "is required");
  c.schema = static_cast<int>(root.integer("schema", 1, 1));
  if (c.schema != 1) bad("schema", "must be 1");

  if (!root.has("plant")) bad("plant", "is required");
  {
    Obj o = root.object("plant");
    c.plant.name = o.choice("name", "duffing", {"duffing", "linear", "scalar_sine", "beam"});
    if (o.has("params")) {
      Obj p = o.object("params");
      if (c.plant.name == "beam") {
        auto& b = c.plant.beam;
        b.m1 = p.positive("m1", b.m1);
        b.m2 = p.positive("m2", b.m2);
        b.k01_lin = p.number("k01_lin", b.k01_lin);
        b.k12 = p.number("k12", b.k12);
        b.k02 = p.number("k02", b.k02);
        b.c01 = p.nonneg("c01", b.c01);
        b.c12 = p.nonneg("c12", b.c12);
        b.c02 = p.nonneg("c02", b.c02);
        b.k01_nlin = p.number("k01_nlin", b.k01_nlin);
        b.kpe_lin = p.number("kpe_lin", b.kpe_lin);
        b.kpe_nlin = p.number("kpe_nlin", b.kpe_nlin);
        b.omega_pe = p.positive("omega", b.omega_pe);
        c.plant.omega = b.omega_pe;
      } else {
        c.plant.omega = p.positive("omega", 1.0);
      }
      if (c.plant.name == "linear" && p.has("theta")) {
        c.plant.theta = p.vector("theta");
        if (c.plant.theta.size() != 2) bad("plant.params.theta", "must have 2 entries");
      }
      p.done();
    }
    if (c.plant.name == "linear" && c.plant.theta.size() == 0) c.plant.theta = RealVector{{0.5, 0.4}};
    o.done();
  }
  const Dims d = dims_of(c.plant);
  const bool scalar = c.scalar();

  if (root.has("controller")) {
    Obj o = root.object("controller");
    const std::vector<std::string> types = scalar ? std::vector<std::string>{"none", "scalar_adaptive"}
                                                  : std::vector<std::string>{"none", "proportional", "mrac",
                                                                             "mrac_projected"};
    c.controller.type = o.choice("type", scalar ? "scalar_adaptive" : "mrac", types);
    c.controller.Gamma = o.positive("Gamma", 1.0);
    c.controller.R = o.positive("R", 10.0);
    c.controller.eps = o.positive("eps", 0.1);
    c.controller.k_hat0 = o.number("k_hat0", 0.0);
    if (o.has("S")) {
      c.controller.S = o.matrix("S");
      if (c.controller.S->rows() != d.n || c.controller.S->cols() != d.n) {
        bad("controller.S", "must be " + std::to_string(d.n) + "x" + std::to_string(d.n));
      }
    }
    if (o.has("k")) {
      c.controller.k = o.vector("k");
      if (c.controller.k->size() != d.m) bad("controller.k", "must have " + std::to_string(d.m) + " entries");
    }
    if (o.has("theta_hat0")) {
      c.controller.theta_hat0 = o.vector("theta_hat0");
      if (c.controller.theta_hat0->size() != d.m) {
        bad("controller.theta_hat0", "must have " + std::to_string(d.m) + " entries");
      }
    }
    if (c.controller.type == "proportional" && !c.controller.k) bad("controller.k", "is required for proportional");
    o.done();
  } else if (scalar) {
    c.controller.type = "scalar_adaptive";
  }

  if (root.has("reference")) parse_reference(root.object("reference"), c.reference, base_dir, 0);
  {
    auto& r = c.reference;
    const double w = c.plant.omega;
    auto check_omega = [&](double rw, const std::string& key) {
      if (std::abs(rw - w) > 1e-12 * w) bad(key, "omega must equal the plant omega");
    };
    if (r.kind == ReferenceConfig::Kind::Generator) {
      check_omega(r.generator.omega(), "reference.generator");
    } else if (r.kind == ReferenceConfig::Kind::Series) {
      if (static_cast<int>(r.series.size()) != d.n) {
        bad("reference.series", "must have " + std::to_string(d.n) + " components");
      }
      for (const auto& s : r.series) {
        check_omega(s.omega(), "reference.series");
        if (s.order() != r.series.front().order()) bad("reference.series", "components must share their order");
      }
    }
  }

  auto& pr = c.protocol;
  pr.conv_tol = scalar ? 1e-3 : 1e-6;
  pr.warm_start = scalar ? continuation::WarmStart::Cold : continuation::WarmStart::Chain;
  pr.adaptation_reset = scalar ? continuation::AdaptationReset::ResetKHatZero
                               : continuation::AdaptationReset::CarryThetaHat;
  if (root.has("protocol")) {
    Obj o = root.object("protocol");
    pr.n_transient_periods = static_cast<int>(o.integer("n_transient_periods", pr.n_transient_periods, 1));
    pr.K = static_cast<int>(o.integer("K", pr.K, 1));
    pr.n_samples = static_cast<int>(o.integer("n_samples", pr.n_samples, 1));
    if (pr.n_samples < 4 * pr.K + 4) bad("protocol.n_samples", "must be >= 4K+4");
    pr.warm_start = o.choice("warm_start", scalar ? "cold" : "chain", {"cold", "chain"}) == "cold"
                        ? continuation::WarmStart::Cold
                        : continuation::WarmStart::Chain;
    pr.conv_tol = o.positive("conv_tol", pr.conv_tol);
    const auto reset = o.choice("adaptation_reset", scalar ? "reset_k_hat_zero" : "carry_theta_hat",
                                {"carry_theta_hat", "reset_k_hat_zero"});
    pr.adaptation_reset = reset == "reset_k_hat_zero" ? continuation::AdaptationReset::ResetKHatZero
                                                      : continuation::AdaptationReset::CarryThetaHat;
    o.done();
  }

  if (root.has("integrator")) {
    Obj o = root.object("integrator");
    auto& g = c.integrator;
    g.rtol = o.positive("rtol", g.rtol);
    g.atol = o.positive("atol", g.atol);
    g.h_init = o.positive("h_init", g.h_init);
    g.h_min = o.positive("h_min", g.h_min);
    g.h_max = o.positive("h_max", g.h_max);
    g.max_steps = static_cast<std::size_t>(o.integer("max_steps", static_cast<long long>(g.max_steps), 1));
    g.adaptive = o.boolean("adaptive", g.adaptive);
    if (g.h_min > g.h_max) bad("integrator.h_min", "must be <= integrator.h_max");
    o.done();
  }
  c.protocol.integrator = c.integrator;

  if (root.has("continuation")) {
    Obj o = root.object("continuation");
    auto& cc = c.continuation;
    auto& ch = cc.chart;
    ch.h0 = o.positive("h0", ch.h0);
    ch.h_min = o.positive("h_min", ch.h_min);
    ch.h_max = o.positive("h_max", ch.h_max);
    if (!(ch.h_min <= ch.h0 && ch.h0 <= ch.h_max)) bad("continuation.h0", "must lie in [h_min, h_max]");
    ch.grow = o.number("grow", ch.grow);
    if (!(ch.grow >= 1.0)) bad("continuation.grow", "must be >= 1");
    ch.grow_below_iters = static_cast<int>(o.integer("grow_below_iters", ch.grow_below_iters, 0));
    ch.shrink = o.number("shrink", ch.shrink);
    if (!(ch.shrink > 0.0 && ch.shrink < 1.0)) bad("continuation.shrink", "must lie in (0, 1)");
    ch.newton_cap = static_cast<int>(o.integer("newton_cap", ch.newton_cap, 1));
    ch.fd_step = o.positive("fd_step", ch.fd_step);
    ch.max_points = static_cast<int>(o.integer("max_points", ch.max_points, 1));
    if (o.has("omega_range")) {
      const RealVector r = o.vector("omega_range");
      if (r.size() != 2 || !(r(0) > 0.0) || !(r(0) < r(1))) {
        bad("continuation.omega_range", "must be [lo, hi] with 0 < lo < hi");
      }
      cc.omega_range = {r(0), r(1)};
    }
    if (o.has("omega_start")) cc.omega_start = o.positive("omega_start", 1.0);
    cc.direction = o.choice("direction", cc.direction, {"up", "down", "both"});
    cc.floquet = o.boolean("floquet", cc.floquet);
    cc.initial_settle_periods = static_cast<int>(o.integer("initial_settle_periods", cc.initial_settle_periods, 2));
    cc.overlay_sweep = o.boolean("overlay_sweep", cc.overlay_sweep);
    o.done();
  }

  if (root.has("sweep")) {
    Obj o = root.object("sweep");
    auto& s = c.sweep;
    s.omega_min = o.positive("omega_min", s.omega_min);
    s.omega_max = o.positive("omega_max", s.omega_max);
    if (!(s.omega_min < s.omega_max)) bad("sweep.omega_max", "must be > sweep.omega_min");
    s.points = static_cast<int>(o.integer("points", s.points, 2));
    s.settle_periods = static_cast<int>(o.integer("settle_periods", s.settle_periods, 2));
    if (o.has("directions")) {
      const auto& v = o.raw("directions");
      if (!v.is_array() || v.empty()) bad("sweep.directions", "must be a nonempty array");
      s.directions.clear();
      for (const auto& e : v) {
        if (!e.is_string() || (e != "up" && e != "down")) bad("sweep.directions", "entries must be 'up' or 'down'");
        s.directions.push_back(e.get<std::string>());
      }
    }
    o.done();
  }

  if (root.has("simulation")) {
    Obj o = root.object("simulation");
    auto& s = c.simulation;
    s.t_end = o.positive("t_end", s.t_end);
    s.sample_dt = o.positive("sample_dt", s.sample_dt);
    if (o.has("q0")) {
      s.q0 = o.vector("q0");
      if (s.q0->size() != d.n) bad("simulation.q0", "must have " + std::to_string(d.n) + " entries");
    }
    s.pe_stride = o.nonneg("pe_stride", s.pe_stride);
    o.done();
  }

  if (root.has("disturbance")) {
    Obj o = root.object("disturbance");
    DisturbanceConfig dc;
    dc.type = o.choice("type", dc.type, {"sine", "harmonic"});
    dc.amplitude = o.nonneg("amplitude", dc.amplitude);
    dc.frequency = o.positive("frequency", dc.frequency);
    dc.direction = static_cast<int>(o.integer("direction", dc.direction, 0));
    if (dc.direction >= d.n) bad("disturbance.direction", "must be < " + std::to_string(d.n));
    dc.periodic = o.boolean("periodic", dc.type == "harmonic");
    if (scalar) bad("disturbance", "is only supported for structured plants");
    o.done();
    c.disturbance = dc;
  }

  if (root.has("pe")) {
    Obj o = root.object("pe");
    c.pe.samples = static_cast<int>(o.integer("samples", c.pe.samples, 129));
    if (c.pe.samples % 2 == 0) bad("pe.samples", "must be odd");
    o.done();
  }

  if (root.has("output_dir")) {
    const auto& v = root.raw("output_dir");
    if (!v.is_string() || v.get<std::string>().empty()) bad("output_dir", "must be a nonempty string");
    c.output_dir = v.get<std::string>();
  }
  root.done();

  try {
    (void)build_plant(c, c.plant.omega);
  } catch (const Error& e) {
    bad("plant", std::string("is invalid: ") + e.what());
  }
  return c;
}

RunConfig parse_file(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

namespace {

json vec_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const RealMatrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

}  // namespace

json serialize(const RunConfig& c) {
  json j;
  j["schema"] = c.schema;
  json params;
  if (c.plant.name == "beam") {
    const auto& b = c.plant.beam;
    params = {{"m1", b.m1},         {"m2", b.m2},       {"k01_lin", b.k01_lin}, {"k12", b.k12},
              {"k02", b.k02},       {"c01", b.c01},     {"c12", b.c12},         {"c02", b.c02},
              {"k01_nlin", b.k01_nlin}, {"kpe_lin", b.kpe_lin}, {"kpe_nlin", b.kpe_nlin}, {"omega", b.omega_pe}};
  } else {
    params["omega"] = c.plant.omega;
    if (c.plant.name == "linear") params["theta"] = vec_json(c.plant.theta);
  }
  j["plant"] = {{"name", c.plant.name}, {"params", params}};

  json ctl = {{"type", c.controller.type}, {"Gamma", c.controller.Gamma}, {"R", c.controller.R},
              {"eps", c.controller.eps},   {"k_hat0", c.controller.k_hat0}};
  if (c.controller.S) ctl["S"] = mat_json(*c.controller.S);
  if (c.controller.k) ctl["k"] = vec_json(*c.controller.k);
  if (c.controller.theta_hat0) ctl["theta_hat0"] = vec_json(*c.controller.theta_hat0);
  j["controller"] = ctl;

  const auto& r = c.reference;
  json ref = json::object();
  if (!r.from_file.empty()) {
    ref["from_file"] = r.from_file;
  } else if (r.kind == ReferenceConfig::Kind::Generator) {
    ref["generator"] = r.generator;
  } else if (r.kind == ReferenceConfig::Kind::Series) {
    ref["series"] = r.series;
  } else if (r.kind == ReferenceConfig::Kind::OpenLoopOrbit) {
    ref["open_loop_orbit"] = {{"settle_periods", r.settle_periods}, {"K", r.K}};
  }
  j["reference"] = ref;

  const auto& p = c.protocol;
  j["protocol"] = {{"n_transient_periods", p.n_transient_periods},
                   {"n_samples", p.n_samples},
                   {"K", p.K},
                   {"warm_start", p.warm_start == continuation::WarmStart::Cold ? "cold" : "chain"},
                   {"conv_tol", p.conv_tol},
                   {"adaptation_reset", p.adaptation_reset == continuation::AdaptationReset::ResetKHatZero
                                            ? "reset_k_hat_zero"
                                            : "carry_theta_hat"}};
  const auto& g = c.integrator;
  j["integrator"] = {{"rtol", g.rtol},   {"atol", g.atol},   {"h_init", g.h_init},       {"h_min", g.h_min},
                     {"h_max", g.h_max}, {"max_steps", g.max_steps}, {"adaptive", g.adaptive}};
  const auto& cc = c.continuation;
  const auto& ch = cc.chart;
  json cont = {{"h0", ch.h0},
               {"h_min", ch.h_min},
               {"h_max", ch.h_max},
               {"grow", ch.grow},
               {"grow_below_iters", ch.grow_below_iters},
               {"shrink", ch.shrink},
               {"newton_cap", ch.newton_cap},
               {"fd_step", ch.fd_step},
               {"max_points", ch.max_points},
               {"omega_range", {cc.omega_range.first, cc.omega_range.second}},
               {"direction", cc.direction},
               {"floquet", cc.floquet},
               {"initial_settle_periods", cc.initial_settle_periods},
               {"overlay_sweep", cc.overlay_sweep}};
  if (cc.omega_start) cont["omega_start"] = *cc.omega_start;
  j["continuation"] = cont;
  const auto& s = c.sweep;
  j["sweep"] = {{"omega_min", s.omega_min},
                {"omega_max", s.omega_max},
                {"points", s.points},
                {"settle_periods", s.settle_periods},
                {"directions", s.directions}};
  json sim = {{"t_end", c.simulation.t_end}, {"sample_dt", c.simulation.sample_dt},
              {"pe_stride", c.simulation.pe_stride}};
  if (c.simulation.q0) sim["q0"] = vec_json(*c.simulation.q0);
  j["simulation"] = sim;
  if (c.disturbance) {
    const auto& d = *c.disturbance;
    j["disturbance"] = {{"type", d.type},           {"amplitude", d.amplitude}, {"frequency", d.frequency},
                        {"direction", d.direction}, {"periodic", d.periodic}};
  }
  j["pe"] = {{"samples", c.pe.samples}};
  j["output_dir"] = c.output_dir;
  return j;
}

plant::Plant build_plant(const RunConfig& c, double omega) {
  const auto& p = c.plant;
  if (p.name == "scalar_sine") return plant::scalar_sine(omega);
  plant::StructuredPlant sp = [&] {
    if (p.name == "duffing") return plant::duffing(omega);
    if (p.name == "linear") return plant::linear_oscillator(omega, p.theta);
    auto b = p.beam;
    b.omega_pe = omega;
    return plant::beam_2dof(b);
  }();
  if (c.disturbance) {
    const auto& d = *c.disturbance;
    if (d.type == "harmonic") {
      sp = sp.with_disturbance(plant::harmonic_disturbance(sp.n(), d.direction, d.amplitude, omega));
    } else {
      sp = sp.with_disturbance(plant::sine_disturbance(sp.n(), d.direction, d.amplitude, d.frequency, d.periodic));
    }
  }
  return sp;
}

plant::PlantFamily build_family(const RunConfig& c) {
  return [c](double omega) { return build_plant(c, omega); };
}

control::ControllerSpec build_controller(const RunConfig& c) {
  const auto& k = c.controller;
  if (k.type == "none") return control::NoControl{};
  if (k.type == "proportional") return control::ProportionalSpec{*k.k};
  if (k.type == "scalar_adaptive") return control::ScalarAdaptiveSpec{k.Gamma, k.k_hat0};
  control::MracSpec m;
  m.Gamma = k.Gamma;
  m.S = k.S;
  m.theta_hat0 = k.theta_hat0;
  if (k.type == "mrac_projected") m.projection = control::ProjectionBall{k.R, k.eps};
  return m;
}

signal::VectorFourierSeries build_reference(const RunConfig& c, const plant::Plant& p) {
  const auto& r = c.reference;
  const int n = plant::state_dim(p);
  const double w = plant::forcing_omega(p);
  switch (r.kind) {
    case ReferenceConfig::Kind::Generator:
      return signal::synthesize_reference(r.generator, plant::known_A(p), plant::known_b(p));
    case ReferenceConfig::Kind::Series:
      return signal::VectorFourierSeries(r.series);
    case ReferenceConfig::Kind::OpenLoopOrbit: {
      const RealVector xi = continuation::initial_guess_from_simulation(p, r.K, r.settle_periods, c.integrator);
      return signal::synthesize_reference(continuation::generator_of(xi), plant::known_A(p), plant::known_b(p));
    }
    case ReferenceConfig::Kind::Zero:
      break;
  }
  return signal::VectorFourierSeries(std::vector<signal::FourierSeries>(n, signal::FourierSeries::zero(w, r.K)));
}

}  // namespace orbit_tracer::config
