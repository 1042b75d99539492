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

#include "orbit_tracer/signal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/numkit.hpp"

namespace orbit_tracer::signal {

using numkit::Complex;

FourierSeries::FourierSeries(double omega, double a0, std::vector<double> a, std::vector<double> b)
    : omega_(omega), a0_(a0), a_(std::move(a)), b_(std::move(b)) {
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) fail(ErrorKind::InvalidArgument, "fourier: omega must be > 0");
  if (a_.empty() || a_.size() != b_.size()) {
    fail(ErrorKind::InvalidArgument, "fourier: need K >= 1 and matching cosine/sine lengths");
  }
  bool finite = std::isfinite(a0_);
  for (std::size_t k = 0; k < a_.size(); ++k) finite = finite && std::isfinite(a_[k]) && std::isfinite(b_[k]);
  if (!finite) fail(ErrorKind::InvalidArgument, "fourier: non-finite coefficient");
}

FourierSeries FourierSeries::zero(double omega, int K) {
  if (K < 1) fail(ErrorKind::InvalidArgument, "fourier: K must be >= 1");
  return {omega, 0.0, std::vector<double>(static_cast<std::size_t>(K), 0.0),
          std::vector<double>(static_cast<std::size_t>(K), 0.0)};
}

FourierSeries FourierSeries::from_packed(double omega, const RealVector& packed) {
  if (packed.size() < 3 || packed.size() % 2 == 0) {
    fail(ErrorKind::InvalidArgument, "fourier: packed length must be 2K+1 with K >= 1");
  }
  const auto K = static_cast<std::size_t>((packed.size() - 1) / 2);
  std::vector<double> a(K), b(K);
  for (std::size_t k = 0; k < K; ++k) {
    a[k] = packed(static_cast<Eigen::Index>(1 + k));
    b[k] = packed(static_cast<Eigen::Index>(1 + K + k));
  }
  return {omega, packed(0), std::move(a), std::move(b)};
}

RealVector FourierSeries::packed() const {
  const auto K = static_cast<Eigen::Index>(a_.size());
  RealVector p(2 * K + 1);
  p(0) = a0_;
  for (Eigen::Index k = 0; k < K; ++k) {
    p(1 + k) = a_[static_cast<std::size_t>(k)];
    p(1 + K + k) = b_[static_cast<std::size_t>(k)];
  }
  return p;
}

double FourierSeries::period() const { return 2.0 * std::numbers::pi / omega_; }

double FourierSeries::eval(double t) const {
  double s = a0_;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double ph = static_cast<double>(k + 1) * omega_ * t;
    s += a_[k] * std::cos(ph) + b_[k] * std::sin(ph);
  }
  return s;
}

double FourierSeries::eval_derivative(double t) const {
  double s = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * omega_;
    const double ph = kw * t;
    s += kw * (-a_[k] * std::sin(ph) + b_[k] * std::cos(ph));
  }
  return s;
}

double FourierSeries::sup_norm(int samples) const {
  double best = 0.0;
  const double T = period();
  for (int j = 0; j < samples; ++j) best = std::max(best, std::abs(eval(j * T / samples)));
  return best;
}

VectorFourierSeries::VectorFourierSeries(std::vector<FourierSeries> components) : components_(std::move(components)) {
  if (components_.empty()) fail(ErrorKind::InvalidArgument, "vector fourier: no components");
  for (const auto& c : components_) {
    if (c.omega() != components_.front().omega() || c.order() != components_.front().order()) {
      fail(ErrorKind::InvalidArgument, "vector fourier: components must share omega and order");
    }
  }
}

RealVector VectorFourierSeries::eval(double t) const {
  RealVector v(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) v(static_cast<Eigen::Index>(i)) = components_[i].eval(t);
  return v;
}

RealVector VectorFourierSeries::eval_derivative(double t) const {
  RealVector v(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) v(static_cast<Eigen::Index>(i)) = components_[i].eval_derivative(t);
  return v;
}

void VectorFourierSeries::eval(double t, Eigen::Ref<RealVector> value, Eigen::Ref<RealVector> derivative) const {
  // Shared trig evaluation across components.
  const int K = order();
  const double w = omega();
  double cs[64], sn[64];
  const int Kc = std::min(K, 64);
  for (int k = 0; k < Kc; ++k) {
    cs[k] = std::cos((k + 1) * w * t);
    sn[k] = std::sin((k + 1) * w * t);
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto& f = components_[i];
    if (K > 64) {
      value(static_cast<Eigen::Index>(i)) = f.eval(t);
      derivative(static_cast<Eigen::Index>(i)) = f.eval_derivative(t);
      continue;
    }
    double v = f.a0(), d = 0.0;
    for (int k = 0; k < K; ++k) {
      const double ak = f.a()[static_cast<std::size_t>(k)], bk = f.b()[static_cast<std::size_t>(k)];
      v += ak * cs[k] + bk * sn[k];
      d += (k + 1) * w * (-ak * sn[k] + bk * cs[k]);
    }
    value(static_cast<Eigen::Index>(i)) = v;
    derivative(static_cast<Eigen::Index>(i)) = d;
  }
}

FourierSeries dft_truncate(std::span<const double> samples, int K, double omega, double t_start) {
  if (K < 1) fail(ErrorKind::InvalidArgument, "dft: K must be >= 1");
  const std::size_t N = samples.size();
  if (N < static_cast<std::size_t>(4 * K + 4)) {
    std::ostringstream os;
    os << "dft: aliasing risk (N=" << N << " < 4K+4=" << 4 * K + 4 << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  double a0 = 0.0;
  std::vector<double> a(static_cast<std::size_t>(K), 0.0), b(static_cast<std::size_t>(K), 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    const double u = samples[j];
    a0 += u;
    for (int k = 1; k <= K; ++k) {
      // Reduce the phase through the sample index to keep it exact for large t_start.
      const double ph = k * omega * t_start + 2.0 * std::numbers::pi * static_cast<double>((static_cast<std::size_t>(k) * j) % N) /
                                                 static_cast<double>(N);
      a[static_cast<std::size_t>(k - 1)] += u * std::cos(ph);
      b[static_cast<std::size_t>(k - 1)] += u * std::sin(ph);
    }
  }
  const double inv = 1.0 / static_cast<double>(N);
  for (int k = 0; k < K; ++k) {
    a[static_cast<std::size_t>(k)] *= 2.0 * inv;
    b[static_cast<std::size_t>(k)] *= 2.0 * inv;
  }
  return {omega, a0 * inv, std::move(a), std::move(b)};
}

VectorFourierSeries synthesize_reference(const FourierSeries& v, const RealMatrix& A, const RealVector& b) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) fail(ErrorKind::InvalidArgument, "synthesize_reference: dimension mismatch");
  const int K = v.order();
  const double w = v.omega();
  std::vector<double> a0(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> ca(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(K)));
  std::vector<std::vector<double>> cb = ca;

  const numkit::ComplexVector bc = b.cast<Complex>();
  for (int k = 0; k <= K; ++k) {
    // v_k e^{ikwt} convention: cos coefficient a, sine coefficient b -> c = a - i b.
    const Complex ck = k == 0 ? Complex(v.a0(), 0.0)
                              : Complex(v.a()[static_cast<std::size_t>(k - 1)], -v.b()[static_cast<std::size_t>(k - 1)]);
    numkit::ComplexMatrix M = -A.cast<Complex>();
    M.diagonal().array() += Complex(0.0, k * w);
    numkit::ComplexVector x;
    try {
      x = numkit::solve_complex(M, bc);
    } catch (const Error&) {
      std::ostringstream os;
      os << "resolvent: singular at harmonic " << k;
      fail(ErrorKind::Numerical, os.str());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex ri = x(i) * ck;
      const auto iu = static_cast<std::size_t>(i);
      if (k == 0) {
        a0[iu] = ri.real();
      } else {
        ca[iu][static_cast<std::size_t>(k - 1)] = ri.real();
        cb[iu][static_cast<std::size_t>(k - 1)] = -ri.imag();
      }
    }
  }
  std::vector<FourierSeries> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    comps.emplace_back(w, a0[iu], ca[iu], cb[iu]);
  }
  return VectorFourierSeries(std::move(comps));
}

FourierSeries generator_from_reference(const VectorFourierSeries& r, const RealMatrix& A, const RealVector& b) {
  const Eigen::Index n = A.rows();
  if (static_cast<Eigen::Index>(r.dim()) != n || b.size() != n) {
    fail(ErrorKind::InvalidArgument, "generator_from_reference: dimension mismatch");
  }
  const double bb = b.squaredNorm();
  if (!(bb > 0.0)) fail(ErrorKind::InvalidArgument, "generator_from_reference: b is zero");
  const int K = r.order();
  const double w = r.omega();
  // Harmonic k of r' - A r, projected on b. Cosine/sine parts separately.
  RealVector c0(n), ck(n), sk(n);
  for (Eigen::Index i = 0; i < n; ++i) c0(i) = r[static_cast<std::size_t>(i)].a0();
  const double v0 = b.dot(-A * c0) / bb;
  std::vector<double> va(static_cast<std::size_t>(K)), vb(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      ck(i) = r[static_cast<std::size_t>(i)].a()[static_cast<std::size_t>(k - 1)];
      sk(i) = r[static_cast<std::size_t>(i)].b()[static_cast<std::size_t>(k - 1)];
    }
    // d/dt (c cos + s sin) = k w (s cos - c sin)
    const RealVector dc = k * w * sk - A * ck;
    const RealVector ds = -k * w * ck - A * sk;
    va[static_cast<std::size_t>(k - 1)] = b.dot(dc) / bb;
    vb[static_cast<std::size_t>(k - 1)] = b.dot(ds) / bb;
  }
  return {w, v0, std::move(va), std::move(vb)};
}

PEReport pe_gram(std::span<const RealVector> Q_samples, double T, double window_start) {
  const std::size_t M = Q_samples.size();
  if (M % 2 == 0) fail(ErrorKind::InvalidArgument, "pe_gram: Simpson quadrature needs an odd sample count");
  if (M < 129) fail(ErrorKind::InvalidArgument, "pe_gram: need at least 129 samples");
  if (!(T > 0.0)) fail(ErrorKind::InvalidArgument, "pe_gram: T must be > 0");
  const Eigen::Index m = Q_samples.front().size();
  RealMatrix G = RealMatrix::Zero(m, m);
  for (std::size_t j = 0; j < M; ++j) {
    if (Q_samples[j].size() != m) fail(ErrorKind::InvalidArgument, "pe_gram: inconsistent sample dimension");
    const double w = (j == 0 || j == M - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    G.noalias() += w * Q_samples[j] * Q_samples[j].transpose();
  }
  G *= T / static_cast<double>(M - 1) / 3.0;
  G = 0.5 * (G + G.transpose());
  PEReport rep;
  rep.gram = G;
  rep.alpha = numkit::eig_sym(G).front();
  rep.window_start = window_start;
  return rep;
}

std::vector<std::pair<double, double>> pe_running(const VectorSignal& Q, double t_begin, double t_end, double T,
                                                  double stride, int samples) {
  if (!(stride > 0.0)) fail(ErrorKind::InvalidArgument, "pe_running: stride must be > 0");
  std::vector<std::pair<double, double>> out;
  std::vector<RealVector> buf(static_cast<std::size_t>(samples));
  for (std::size_t i = 0;; ++i) {
    const double t = t_begin + static_cast<double>(i) * stride;
    if (t + T > t_end * (1.0 + 1e-14) + 1e-14) break;
    for (int j = 0; j < samples; ++j) buf[static_cast<std::size_t>(j)] = Q(t + T * j / (samples - 1));
    out.emplace_back(t, pe_gram(buf, T, t).alpha);
  }
  return out;
}

void to_json(nlohmann::json& j, const FourierSeries& f) {
  j = nlohmann::json{{"omega", f.omega()}, {"a0", f.a0()}, {"a", f.a()}, {"b", f.b()}};
}

void from_json(const nlohmann::json& j, FourierSeries& f) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "omega" && it.key() != "a0" && it.key() != "a" && it.key() != "b") {
      fail(ErrorKind::Config, "fourier series: unknown key '" + it.key() + "'");
    }
  }
  f = FourierSeries(j.at("omega").get<double>(), j.value("a0", 0.0), j.at("a").get<std::vector<double>>(),
                    j.at("b").get<std::vector<double>>());
}

}  // namespace orbit_tracer::signal
