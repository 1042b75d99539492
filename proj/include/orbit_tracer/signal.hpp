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

#ifndef ORBIT_TRACER_SIGNAL_HPP_
#define ORBIT_TRACER_SIGNAL_HPP_

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace orbit_tracer::signal {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// a0 + sum_k a_k cos(k w t) + b_k sin(k w t), k = 1..K.
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(double omega, double a0, std::vector<double> a, std::vector<double> b);
  static FourierSeries zero(double omega, int K);

  /// Packed layout (a0, a1..aK, b1..bK), size 2K+1.
  static FourierSeries from_packed(double omega, const RealVector& packed);
  RealVector packed() const;

  double omega() const { return omega_; }
  double period() const;
  int order() const { return static_cast<int>(a_.size()); }
  double a0() const { return a0_; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }

  double eval(double t) const;
  double eval_derivative(double t) const;

  /// Max |f| over `samples` uniform points of one period.
  double sup_norm(int samples = 1024) const;

 private:
  double omega_ = 1.0;
  double a0_ = 0.0;
  std::vector<double> a_, b_;
};

/// Components share omega and order.
class VectorFourierSeries {
 public:
  VectorFourierSeries() = default;
  explicit VectorFourierSeries(std::vector<FourierSeries> components);

  std::size_t dim() const { return components_.size(); }
  double omega() const { return components_.front().omega(); }
  double period() const { return components_.front().period(); }
  int order() const { return components_.front().order(); }
  const FourierSeries& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<FourierSeries>& components() const { return components_; }

  RealVector eval(double t) const;
  RealVector eval_derivative(double t) const;
  void eval(double t, Eigen::Ref<RealVector> value, Eigen::Ref<RealVector> derivative) const;

 private:
  std::vector<FourierSeries> components_;
};

/// Truncated DFT of N samples taken at t_start + j T / N over one period.
FourierSeries dft_truncate(std::span<const double> samples, int K, double omega, double t_start = 0.0);

/// r with r' = A r + b v harmonic by harmonic; requires A Hurwitz.
VectorFourierSeries synthesize_reference(const FourierSeries& v, const RealMatrix& A, const RealVector& b);

/// Least-squares generator of a reference: v_k = b^T (r'_k - A r_k) / b^T b.
/// Inverse of synthesize_reference on admissible references.
FourierSeries generator_from_reference(const VectorFourierSeries& r, const RealMatrix& A, const RealVector& b);

struct PEReport {
  RealMatrix gram;
  double alpha = 0.0;
  double window_start = 0.0;
};

/// Composite-Simpson integral of Q Q^T over one window of length T from an
/// odd number (>= 129) of uniform samples.
PEReport pe_gram(std::span<const RealVector> Q_samples, double T, double window_start = 0.0);

using VectorSignal = std::function<RealVector(double t)>;

/// Sliding-window pe_gram over [t_begin, t_end - T] every `stride`.
std::vector<std::pair<double, double>> pe_running(const VectorSignal& Q, double t_begin, double t_end, double T,
                                                  double stride, int samples = 1025);

void to_json(nlohmann::json& j, const FourierSeries& f);
void from_json(const nlohmann::json& j, FourierSeries& f);

}  // namespace orbit_tracer::signal

#endif  // ORBIT_TRACER_SIGNAL_HPP_
