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

#include "orbit_tracer/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <utility>

#include "orbit_tracer/continuation.hpp"
#include "orbit_tracer/control.hpp"
#include "orbit_tracer/error.hpp"
#include "orbit_tracer/io.hpp"
#include "orbit_tracer/numkit.hpp"

namespace orbit_tracer::commands {

using nlohmann::json;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
namespace fs = std::filesystem;

json RunSummary::to_json() const {
  return {{"command", command}, {"status", status},   {"exit_code", exit_code}, {"message", message},
          {"wall_time_s", wall_time}, {"metrics", metrics}, {"outputs", outputs}};
}

namespace {

// Files are collected in memory and committed together after success.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void commit(const fs::path& dir, RunSummary& s) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files) {
      io::write_atomic(dir / name, content);
      s.outputs.push_back(name);
    }
  }
};

void say(const RunOptions& opt, const std::string& msg) {
  if (opt.log) opt.log(msg);
}

json vec_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

io::Series series(std::string label, std::vector<double> x, std::vector<double> y) {
  io::Series s;
  s.label = std::move(label);
  s.x = std::move(x);
  s.y = std::move(y);
  return s;
}

std::string svg(const std::vector<io::Series>& s, const std::string& title, const std::string& xl,
                const std::string& yl) {
  io::PlotSpec spec;
  spec.title = title;
  spec.x_label = xl;
  spec.y_label = yl;
  return io::render_svg(s, spec);
}

// Uniform sample of Q(t, q(t)) along a trajectory.
signal::VectorSignal regressor_along(const plant::StructuredModel& model, const ode::Trajectory& traj, int n) {
  return [&model, &traj, n](double t) { return model.eval_Q(t, traj.at(t).head(n)); };
}

}  // namespace

void write_summary(const config::RunConfig& cfg, const RunSummary& s) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  io::write_atomic(fs::path(cfg.output_dir) / "summary.json", s.to_json().dump(2) + "\n");
}

// simulate -------------------------------------------------------------------

RunSummary cmd_simulate(const config::RunConfig& cfg, const RunOptions& opt) {
  RunSummary s;
  s.command = "simulate";
  const plant::Plant p = config::build_plant(cfg, cfg.plant.omega);
  const auto r = config::build_reference(cfg, p);
  const auto loop = control::assemble_closed_loop(p, config::build_controller(cfg), r);
  const auto& L = loop.layout();
  const int n = L.n;
  const double T = plant::period(p);
  const RealVector q0 = cfg.simulation.q0.value_or(RealVector::Zero(n));
  const RealVector z0 = loop.initial_state(q0, 0.0);
  say(opt, "simulating to t=" + std::to_string(cfg.simulation.t_end));
  auto run = control::simulate(loop, z0, 0.0, cfg.simulation.t_end, cfg.simulation.sample_dt, cfg.integrator);
  const double t_end = run.t.back();
  auto& m = s.metrics;
  Outputs out;

  std::vector<double> x_norm(run.t.size()), abs_u(run.t.size());
  for (std::size_t k = 0; k < run.t.size(); ++k) {
    x_norm[k] = (run.z[k].head(n) - r.eval(run.t[k])).norm();
    abs_u[k] = std::abs(run.u[k]);
  }

  // Final period: periodicity of the state and u, and max |u|.
  const int Nf = 512;
  double u_max = 0.0, dev = 0.0;
  const bool have_prev = t_end - 2.0 * T >= run.t.front();
  for (int j = 0; j < Nf; ++j) {
    const double t = t_end - T + j * T / Nf;
    const RealVector z = run.trajectory.at(t);
    const double u = loop.control(t, z);
    u_max = std::max(u_max, std::abs(u));
    if (have_prev) {
      const RealVector zp = run.trajectory.at(t - T);
      dev = std::max(dev, (z.head(n) - zp.head(n)).lpNorm<Eigen::Infinity>());
      dev = std::max(dev, std::abs(u - loop.control(t - T, zp)));
    }
  }
  m["final_u_max"] = u_max;
  if (have_prev) m["final_period_deviation"] = dev;
  m["final_x_norm"] = x_norm.back();
  m["max_x_norm"] = max_of(x_norm);
  m["final_q"] = vec_json(run.z.back().head(n));

  if (loop.is_mrac()) {
    const auto& sp = std::get<plant::StructuredPlant>(p);
    const auto rep = control::lyapunov_diagnostics(run, loop, sp.theta());
    m["final_e_norm"] = rep.e_norm.back();
    m["max_e_norm"] = max_of(rep.e_norm);
    m["e_bound"] = rep.e_bound;
    m["final_theta_err"] = rep.theta_err.back();
    m["max_theta_err"] = max_of(rep.theta_err);
    m["theta_bound"] = rep.theta_bound;
    m["R"] = rep.R;
    m["max_V_increase"] = rep.max_V_increase;
    m["V_nonincreasing"] = rep.V_nonincreasing;
    m["max_theta_hat_norm"] = [&] {
      double v = 0.0;
      for (const auto& z : run.z) v = std::max(v, z.segment(L.adapt_offset(), L.n_adapt).norm());
      return v;
    }();
    m["final_theta_hat"] = vec_json(run.z.back().segment(L.adapt_offset(), L.n_adapt));
    if (sp.disturbance()) m["h_b"] = sp.disturbance()->h_b;

    if (t_end >= T) {
      const double stride = cfg.simulation.pe_stride > 0.0 ? cfg.simulation.pe_stride : T;
      const auto pe = signal::pe_running(regressor_along(sp.model(), run.trajectory, n), run.t.front(), t_end, T,
                                         stride, cfg.pe.samples);
      if (!pe.empty()) {
        m["alpha_running_final"] = pe.back().second;
        std::ostringstream os;
        os << "t,alpha\n" << std::setprecision(17);
        std::vector<double> pt, pa;
        for (const auto& [t, a] : pe) {
          os << t << ',' << a << '\n';
          pt.push_back(t);
          pa.push_back(a);
        }
        out.add("pe_running.csv", os.str());
        out.add("alpha.svg", svg({series("alpha", pt, pa)}, "Running PE level", "t", "alpha"));
      }
    }
    out.add("e_norm.svg", svg({series("|e|", run.t, rep.e_norm)}, "Prediction error", "t", "|e|"));
    out.add("theta_err.svg",
            svg({series("|theta_hat - theta|", run.t, rep.theta_err)}, "Parameter error", "t", "|theta error|"));
  }

  if (loop.is_scalar_adaptive()) {
    const auto& sp = std::get<plant::ScalarPlant>(p);
    const double a = sp.model().a, b = sp.model().b;
    std::vector<double> k_hat(run.t.size()), g(run.t.size()), upg(run.t.size());
    double min_dk = 0.0, g_b = 0.0, x_max = 0.0;
    RealVector dq(1);
    for (std::size_t k = 0; k < run.t.size(); ++k) {
      const double t = run.t[k];
      k_hat[k] = run.z[k](L.adapt_offset());
      if (k > 0) min_dk = std::min(min_dk, k_hat[k] - k_hat[k - 1]);
      const double x = run.z[k](0) - r[0].eval(t);
      plant::respond(p, t, run.z[k].head(1), 0.0, dq);
      g[k] = dq(0) - a * x - r[0].eval_derivative(t);
      upg[k] = run.u[k] + g[k];
      g_b = std::max(g_b, std::abs(g[k]));
      x_max = std::max(x_max, std::abs(x));
    }
    (void)b;
    const double x0 = std::abs(run.z.front()(0) - r[0].eval(run.t.front()));
    const double bound = std::max(g_b, x0) + std::abs(k_hat.front()) / std::sqrt(cfg.controller.Gamma);
    double upg_final = 0.0;
    for (int j = 0; j < Nf; ++j) {
      const double t = t_end - T + j * T / Nf;
      const RealVector z = run.trajectory.at(t);
      plant::respond(p, t, z.head(1), 0.0, dq);
      const double x = z(0) - r[0].eval(t);
      const double gj = dq(0) - a * x - r[0].eval_derivative(t);
      upg_final = std::max(upg_final, std::abs(loop.control(t, z) + gj));
    }
    m["final_k_hat"] = k_hat.back();
    m["k_hat_min_increment"] = min_dk;
    double k_abs = 0.0;
    for (double k : k_hat) k_abs = std::max(k_abs, std::abs(k));
    m["k_hat_nondecreasing"] = min_dk >= -(cfg.integrator.rtol * k_abs + cfg.integrator.atol);
    m["g_bound"] = g_b;
    m["max_abs_x"] = x_max;
    m["x_bound"] = bound;
    m["final_u_plus_g_max"] = upg_final;
    out.add("k_hat.svg", svg({series("k_hat", run.t, k_hat)}, "Adaptive gain", "t", "k_hat"));
    out.add("u_plus_g.svg", svg({series("u + g", run.t, upg)}, "u + g", "t", "u + g"));
  }

  if (L.n_adapt == 0) {
    // Harmonics of the settled response over the last period.
    const int N = std::max(1024, 4 * cfg.protocol.K + 4);
    json dft = json::array();
    std::vector<double> s_q(N);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < N; ++j) s_q[j] = run.trajectory.at(t_end - T + j * T / N)(i);
      dft.push_back(signal::dft_truncate(s_q, cfg.protocol.K, plant::forcing_omega(p), t_end - T));
    }
    m["final_period_dft"] = dft;
  }

  std::ostringstream csv;
  run.write_csv(csv);
  out.add("trajectory.csv", csv.str());
  out.add("x_norm.svg", svg({series("|q - r|", run.t, x_norm)}, "Tracking error", "t", "|x|"));
  out.add("u.svg", svg({series("|u|", run.t, abs_u)}, "Control input", "t", "|u|"));
  std::vector<io::Series> qs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> qi(run.t.size());
    for (std::size_t k = 0; k < run.t.size(); ++k) qi[k] = run.z[k](i);
    qs.push_back(series("q" + std::to_string(i + 1), run.t, std::move(qi)));
  }
  out.add("q.svg", svg(qs, "Plant state", "t", "q"));
  out.commit(cfg.output_dir, s);
  return s;
}

// continue -------------------------------------------------------------------

namespace {

std::vector<double> sweep_grid(const config::SweepConfig& sw, bool up) {
  std::vector<double> g(sw.points);
  for (int i = 0; i < sw.points; ++i) g[i] = sw.omega_min + (sw.omega_max - sw.omega_min) * i / (sw.points - 1);
  if (!up) std::reverse(g.begin(), g.end());
  return g;
}

struct SweepPair {
  std::vector<continuation::SweepPoint> up, down;
};

SweepPair run_sweeps(const config::RunConfig& cfg, const plant::PlantFamily& family) {
  SweepPair sp;
  const int n = plant::state_dim(family(cfg.sweep.omega_min));
  for (const auto& d : cfg.sweep.directions) {
    auto res = continuation::open_loop_sweep(family, sweep_grid(cfg.sweep, d == "up"), cfg.sweep.settle_periods,
                                             RealVector::Zero(n), cfg.integrator);
    (d == "up" ? sp.up : sp.down) = std::move(res);
  }
  return sp;
}

std::vector<io::Series> sweep_series(const SweepPair& sp) {
  std::vector<io::Series> out;
  auto add = [&](const std::vector<continuation::SweepPoint>& pts, const std::string& label) {
    if (pts.empty()) return;
    io::Series s;
    s.label = label;
    s.points_only = true;
    for (const auto& p : pts) {
      s.x.push_back(p.omega);
      s.y.push_back(p.amplitude);
    }
    out.push_back(std::move(s));
  };
  add(sp.up, "sweep up");
  add(sp.down, "sweep down");
  return out;
}

}  // namespace

RunSummary cmd_continue(const config::RunConfig& cfg, const RunOptions& opt) {
  RunSummary s;
  s.command = "continue";
  const auto truth = config::build_family(cfg);
  const plant::PlantFamily sealed = [truth](double w) { return plant::sealed(truth(w)); };
  continuation::Experiment ex(sealed, config::build_controller(cfg), cfg.protocol);
  auto chart = cfg.continuation.chart;
  chart.threads = std::max(1, opt.threads);

  const double w0 = cfg.continuation.omega_start.value_or(cfg.plant.omega);
  RealVector guess;
  if (cfg.reference.kind == config::ReferenceConfig::Kind::Generator && !cfg.continuation.omega_start) {
    guess = continuation::pack_unknowns(cfg.reference.generator);
  } else {
    guess = continuation::initial_guess_from_simulation(sealed(w0), cfg.protocol.K,
                                                        cfg.continuation.initial_settle_periods, cfg.integrator);
  }
  if (guess.size() != ex.unknowns()) fail(ErrorKind::Config, "reference.generator order must equal protocol.K");
  say(opt, "converging initial point at omega=" + std::to_string(continuation::omega_of(guess)));
  const auto start = continuation::converge_initial_point(ex, guess, chart, std::nullopt);

  const auto dir = cfg.continuation.direction == "up"     ? continuation::Direction::Up
                   : cfg.continuation.direction == "down" ? continuation::Direction::Down
                                                          : continuation::Direction::Both;
  say(opt, "tracing branch");
  auto branch = continuation::continue_branch(ex, start, cfg.continuation.omega_range, chart, dir);

  int unstable = 0, floquet_failures = 0;
  if (cfg.continuation.floquet) {
    for (auto& pt : branch.points) {
      try {
        pt.floquet = continuation::floquet_diagnostics(truth(pt.omega()), pt.xi, cfg.integrator);
        if (!pt.floquet.empty() && std::abs(pt.floquet.front()) > 1.0) ++unstable;
      } catch (const Error&) {
        ++floquet_failures;
      }
    }
  }

  const auto folds = branch.folds();
  double max_res = 0.0, w_lo = HUGE_VAL, w_hi = -HUGE_VAL;
  for (const auto& pt : branch.points) {
    max_res = std::max(max_res, pt.residual_norm);
    w_lo = std::min(w_lo, pt.omega());
    w_hi = std::max(w_hi, pt.omega());
  }
  auto& m = s.metrics;
  m["branch_points"] = branch.points.size();
  m["fold_count"] = folds.size();
  json fw = json::array();
  for (const auto i : folds) fw.push_back(0.5 * (branch.points[i].omega() + branch.points[i + 1].omega()));
  m["fold_omegas"] = fw;
  m["max_residual_norm"] = max_res;
  m["omega_covered"] = {w_lo, w_hi};
  m["branch_status"] = branch.status;
  if (cfg.continuation.floquet) {
    m["unstable_points"] = unstable;
    m["floquet_failures"] = floquet_failures;
  }

  Outputs out;
  std::ostringstream csv;
  branch.write_csv(csv, cfg.protocol.K);
  out.add("branch.csv", csv.str());
  json meta = {{"warm_start", cfg.protocol.warm_start == continuation::WarmStart::Chain ? "chain" : "cold"},
               {"adaptation_reset", cfg.protocol.adaptation_reset == continuation::AdaptationReset::CarryThetaHat
                                        ? "carry_theta_hat"
                                        : "reset_k_hat_zero"},
               {"jacobian_anchor", "base_terminal_state"},
               {"conv_tol", cfg.protocol.conv_tol},
               {"status", branch.status},
               {"fold_indices", folds},
               {"config", config::serialize(cfg)}};
  out.add("branch.meta.json", meta.dump(2) + "\n");

  io::Series bs;
  bs.label = "branch";
  for (const auto& pt : branch.points) {
    bs.x.push_back(pt.omega());
    bs.y.push_back(pt.amplitude);
  }
  for (const auto i : folds) bs.markers.push_back(i);
  std::vector<io::Series> plot{bs};
  if (cfg.continuation.overlay_sweep) {
    say(opt, "running overlay sweeps");
    const auto sp = run_sweeps(cfg, truth);
    std::ostringstream sc;
    continuation::write_sweep_csv(sc, sp.up, sp.down);
    out.add("sweep.csv", sc.str());
    for (auto& ser : sweep_series(sp)) plot.push_back(std::move(ser));
  }
  out.add("branch.svg", svg(plot, "Periodic orbit branch", "omega", "max |r1|"));
  out.commit(cfg.output_dir, s);

  if (branch.status.find("stalled") != std::string::npos) {
    s.status = "stalled";
    s.exit_code = static_cast<int>(ErrorKind::NonConvergence);
    s.message = "continuation stalled before leaving the omega range";
  }
  return s;
}

// sweep ----------------------------------------------------------------------

RunSummary cmd_sweep(const config::RunConfig& cfg, const RunOptions& opt) {
  RunSummary s;
  s.command = "sweep";
  say(opt, "sweeping");
  const auto sp = run_sweeps(cfg, config::build_family(cfg));
  auto& m = s.metrics;
  auto count = [](const std::vector<continuation::SweepPoint>& v) {
    return std::count_if(v.begin(), v.end(), [](const auto& p) { return p.converged; });
  };
  m["up_points"] = sp.up.size();
  m["down_points"] = sp.down.size();
  m["up_converged"] = count(sp.up);
  m["down_converged"] = count(sp.down);
  if (!sp.up.empty() && sp.up.size() == sp.down.size()) {
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    const std::size_t N = sp.up.size();
    for (std::size_t i = 0; i < N; ++i) {
      const auto& d = sp.down[N - 1 - i];
      if (std::abs(sp.up[i].amplitude - d.amplitude) > 1e-2) {
        lo = std::min(lo, sp.up[i].omega);
        hi = std::max(hi, sp.up[i].omega);
      }
    }
    m["hysteresis_window"] = lo <= hi ? json{lo, hi} : json(nullptr);
  }
  Outputs out;
  std::ostringstream sc;
  continuation::write_sweep_csv(sc, sp.up, sp.down);
  out.add("sweep.csv", sc.str());
  out.add("sweep.svg", svg(sweep_series(sp), "Open-loop frequency sweep", "omega", "max |q1|"));
  out.commit(cfg.output_dir, s);
  return s;
}

// pe-check -------------------------------------------------------------------

RunSummary cmd_pe_check(const config::RunConfig& cfg, const RunOptions& opt) {
  RunSummary s;
  s.command = "pe-check";
  const plant::Plant p = config::build_plant(cfg, cfg.plant.omega);
  const auto* sp = std::get_if<plant::StructuredPlant>(&p);
  if (!sp) fail(ErrorKind::Config, "pe-check needs a structured plant");
  const auto r = config::build_reference(cfg, p);
  const int n = sp->n();
  const double T = sp->period();
  const int N = cfg.pe.samples;
  const auto& model = sp->model();
  say(opt, "computing PE levels");

  // Periodic steady state of x' = A x + g(t): x(0) = (I - e^{AT})^{-1} x_p(T).
  const auto g = plant::true_forcing_g(p, r);
  const ode::Field fx = [&](double t, ode::StateRef x, ode::DerivRef dx) { dx = model.A * x + g.g(t); };
  const RealVector xp = ode::integrate(fx, RealVector::Zero(n), 0.0, T, cfg.integrator).back();
  const RealMatrix Phi = ode::monodromy([&](double) { return model.A; }, n, 0.0, T, cfg.integrator);
  const RealVector x0 = numkit::solve_real(RealMatrix::Identity(n, n) - Phi, xp);
  const auto xs = ode::integrate(fx, x0, 0.0, T, cfg.integrator);

  std::vector<RealVector> Q_ss(N), Q_r(N);
  double x_sup = 0.0;
  for (int j = 0; j < N; ++j) {
    const double t = j * T / (N - 1);
    const RealVector x = xs.at(t);
    const RealVector rt = r.eval(t);
    x_sup = std::max(x_sup, x.lpNorm<Eigen::Infinity>());
    Q_ss[j] = model.eval_Q(t, x + rt);
    Q_r[j] = model.eval_Q(t, rt);
  }
  const auto rep = signal::pe_gram(Q_ss, T);
  const auto rep_r = signal::pe_gram(Q_r, T);
  auto& m = s.metrics;
  m["alpha"] = rep.alpha;
  m["alpha_model_free"] = rep_r.alpha;
  m["g_sup"] = g.sup_norm;
  m["g_identically_zero"] = g.identically_zero;
  m["x_steady_sup"] = x_sup;
  json gram = json::array();
  for (Eigen::Index i = 0; i < rep.gram.rows(); ++i) gram.push_back(vec_json(rep.gram.row(i).transpose()));
  m["gram"] = gram;
  Outputs out;
  out.commit(cfg.output_dir, s);
  return s;
}

RunSummary run(const std::string& command, const config::RunConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunSummary s;
  if (command == "simulate") {
    s = cmd_simulate(cfg, opt);
  } else if (command == "continue") {
    s = cmd_continue(cfg, opt);
  } else if (command == "sweep") {
    s = cmd_sweep(cfg, opt);
  } else if (command == "pe-check") {
    s = cmd_pe_check(cfg, opt);
  } else {
    fail(ErrorKind::Config, "unknown command '" + command + "'");
  }
  s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (auto it = s.metrics.begin(); it != s.metrics.end(); ++it) {
    if (it->is_number_float() && !std::isfinite(it->get<double>())) {
      fail(ErrorKind::Numerical, "metric '" + it.key() + "' is not finite");
    }
  }
  return s;
}

}  // namespace orbit_tracer::commands
