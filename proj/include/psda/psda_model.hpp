// psda/psda_model.hpp

// Copyright 2026 The PSDA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PSDA_PSDA_MODEL_HPP_
#define PSDA_PSDA_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "psda/sphere_math.hpp"
#include "psda/vmf.hpp"

namespace psda {

/// Zero- and first-order statistics of a set of embeddings assumed to come
/// from one speaker: the count n and the vector sum of the embeddings.
/// Statistics of disjoint sets add field-wise.
class SideStats {
 public:
  SideStats(std::int64_t n, Eigen::VectorXd sum);
  static SideStats FromVectors(std::span<const UnitVec> xs);
  static SideStats Single(const UnitVec &x);

  std::int64_t n() const { return n_; }
  const Eigen::VectorXd &sum() const { return sum_; }
  int dim() const { return static_cast<int>(sum_.size()); }
  Eigen::VectorXd Mean() const { return sum_ / static_cast<double>(n_); }

  SideStats &operator+=(const SideStats &other);
  friend SideStats operator+(SideStats a, const SideStats &b) { return a += b; }

 private:
  std::int64_t n_;
  Eigen::VectorXd sum_;
};

/// Trained PSDA parameters: within-speaker concentration w > 0,
/// between-speaker concentration b >= 0 and speaker mean direction mu.
class PsdaModel {
 public:
  PsdaModel(double w, double b, UnitVec mu);

  double w() const { return w_; }
  double b() const { return b_; }
  const UnitVec &mu() const { return mu_; }
  int dim() const { return mu_.dim(); }
  BesselOrder order() const { return order_; }

  /// b mu + w * sum, the natural parameter of the speaker posterior.
  Eigen::VectorXd NaturalParam(const SideStats &stats) const;

 private:
  double w_;
  double b_;
  UnitVec mu_;
  BesselOrder order_;
};

/// Posterior of the hidden speaker direction given one speaker's stats.
VmfParams Posterior(const PsdaModel &model, const SideStats &stats);

/// log P(X) relative to the uniform density to the n-th power:
///   n [log C(w) - log C(0)] + log C(b) - log C(|b mu + w sum|).
double MarginalLogLik(const PsdaModel &model, const SideStats &stats);

/// Sum of MarginalLogLik over speakers.
double TotalLogLik(const PsdaModel &model, std::span<const SideStats> speakers);

/// Deterministic starting point for EM. mu and b come from an ML fit to the
/// normalized speaker means, w from the average speaker mean length.
PsdaModel InitParams(std::span<const SideStats> speakers);

struct EmOptions {
  int max_iters = 100;
  double rel_tol = 1e-8;
  /// Hold b = 0 (uniform speaker prior) and leave mu untouched.
  bool freeze_b_zero = false;
  std::optional<PsdaModel> init;
  /// Worker threads for the E-step; results do not depend on this.
  int threads = 1;
};

struct EmResult {
  PsdaModel model;
  /// Total log-likelihood of the initial model followed by one entry per
  /// iteration.
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  /// Set when the w statistic came out non-positive and was clamped.
  bool w_clamped = false;
};

/// Floor applied to w when its update statistic is not positive.
inline constexpr double kMinWithinConcentration = 1e-8;

/// Maximum-likelihood training by EM with closed-form updates. Stops when
/// the relative log-likelihood improvement drops below rel_tol (relative to
/// max(|loglik|, 1)) or after max_iters iterations.
EmResult EmTrain(std::span<const SideStats> speakers, const EmOptions &opts = {});

}  // namespace psda

#endif  // PSDA_PSDA_MODEL_HPP_
