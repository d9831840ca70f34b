// psda_model.cpp

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

#include "psda/psda_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "psda/errors.hpp"

namespace psda {

namespace {

// Clip range for the initial w statistic; 1 - 1e-6 keeps w0 finite for
// singleton speakers, whose mean length is exactly 1.
constexpr double kInitRMin = 1e-6;
constexpr double kInitRMax = 1.0 - 1e-6;

void CheckSpeakers(std::span<const SideStats> speakers) {
  if (speakers.size() < 2) {
    throw DegenerateDataError("EM training needs at least 2 speakers, got " +
                              std::to_string(speakers.size()));
  }
  const int dim = speakers.front().dim();
  for (const SideStats &s : speakers) {
    if (s.dim() != dim) {
      throw DimensionError("speaker statistics have inconsistent dimensions");
    }
  }
}

// Posterior expectations E[z]_i for every speaker. Each slot is written by
// exactly one worker, so the result does not depend on the thread count.
std::vector<Eigen::VectorXd> PosteriorMeans(const PsdaModel &model,
                                            std::span<const SideStats> speakers,
                                            int threads) {
  std::vector<Eigen::VectorXd> out(speakers.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = MeanVector(Posterior(model, speakers[i]));
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(speakers.size(), 1));
  if (workers == 1) {
    work(0, speakers.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (speakers.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(speakers.size(), begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (std::thread &t : pool) t.join();
  return out;
}

}  // namespace

SideStats::SideStats(std::int64_t n, Eigen::VectorXd sum)
    : n_(n), sum_(std::move(sum)) {
  if (n_ < 1) {
    throw DataError("side statistics need n >= 1, got " + std::to_string(n_));
  }
  if (sum_.size() < 2) throw DimensionError("side statistics need dimension >= 2");
  if (!sum_.allFinite() || sum_.norm() > static_cast<double>(n_) + 1e-6) {
    throw DataError("side statistics sum is not a sum of " + std::to_string(n_) +
                    " unit vectors");
  }
}

SideStats SideStats::FromVectors(std::span<const UnitVec> xs) {
  if (xs.empty()) throw DataError("side statistics need at least one vector");
  Eigen::VectorXd sum = xs.front().coords();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i].dim() != xs.front().dim()) {
      throw DimensionError("side statistics: inconsistent vector dimensions");
    }
    sum += xs[i].coords();
  }
  return SideStats(static_cast<std::int64_t>(xs.size()), std::move(sum));
}

SideStats SideStats::Single(const UnitVec &x) { return SideStats(1, x.coords()); }

SideStats &SideStats::operator+=(const SideStats &other) {
  if (other.dim() != dim()) {
    throw DimensionError("cannot add side statistics of different dimension");
  }
  n_ += other.n_;
  sum_ += other.sum_;
  return *this;
}

PsdaModel::PsdaModel(double w, double b, UnitVec mu)
    : w_(w), b_(b), mu_(std::move(mu)), order_(BesselOrder::FromDim(mu_.dim())) {
  if (!std::isfinite(w) || w <= 0.0) {
    throw DomainError("within-speaker concentration must be > 0, got " +
                      std::to_string(w));
  }
  if (!std::isfinite(b) || b < 0.0) {
    throw DomainError("between-speaker concentration must be >= 0, got " +
                      std::to_string(b));
  }
}

Eigen::VectorXd PsdaModel::NaturalParam(const SideStats &stats) const {
  if (stats.dim() != dim()) {
    throw DimensionError("statistics of dimension " + std::to_string(stats.dim()) +
                         " do not match model dimension " + std::to_string(dim()));
  }
  return b_ * mu_.coords() + w_ * stats.sum();
}

VmfParams Posterior(const PsdaModel &model, const SideStats &stats) {
  const Eigen::VectorXd z = model.NaturalParam(stats);
  const double kappa = z.norm();
  if (kappa == 0.0) return VmfParams(UnitVec::Canonical(model.dim()), 0.0);
  return VmfParams(UnitVec::Normalize(z), kappa);
}

double MarginalLogLik(const PsdaModel &model, const SideStats &stats) {
  const BesselOrder order = model.order();
  const double z_sq = model.NaturalParam(stats).squaredNorm();
  const double n = static_cast<double>(stats.n());
  return n * (LogCnu(order, model.w()) - LogCnu(order, 0.0)) +
         LogCnu(order, model.b()) - LogCnuFromSquared(order, z_sq);
}

double TotalLogLik(const PsdaModel &model, std::span<const SideStats> speakers) {
  double total = 0.0;
  for (const SideStats &s : speakers) total += MarginalLogLik(model, s);
  return total;
}

PsdaModel InitParams(std::span<const SideStats> speakers) {
  CheckSpeakers(speakers);
  const int dim = speakers.front().dim();
  std::vector<UnitVec> directions;
  directions.reserve(speakers.size());
  double mean_len = 0.0;
  for (const SideStats &s : speakers) {
    const Eigen::VectorXd m = s.Mean();
    const double len = m.norm();
    mean_len += len;
    if (len > 0.0) directions.push_back(UnitVec::Normalize(m));
  }
  mean_len /= static_cast<double>(speakers.size());

  const VmfParams prior = directions.empty()
                              ? VmfParams(UnitVec::Canonical(dim), 0.0)
                              : FitMl(directions);
  const double r = std::clamp(mean_len, kInitRMin, kInitRMax);
  const double w = RhoInv(BesselOrder::FromDim(dim), r);
  return PsdaModel(w, prior.kappa(), prior.mu());
}

EmResult EmTrain(std::span<const SideStats> speakers, const EmOptions &opts) {
  CheckSpeakers(speakers);
  if (opts.max_iters < 0 || !(opts.rel_tol >= 0.0)) {
    throw DomainError("EM options: max_iters must be >= 0 and rel_tol >= 0");
  }
  PsdaModel model = opts.init ? *opts.init : InitParams(speakers);
  if (model.dim() != speakers.front().dim()) {
    throw DimensionError("initial model dimension does not match the data");
  }
  if (opts.freeze_b_zero && model.b() != 0.0) {
    model = PsdaModel(model.w(), 0.0, model.mu());
  }
  const BesselOrder order = model.order();
  double total_n = 0.0;
  for (const SideStats &s : speakers) total_n += static_cast<double>(s.n());
  const double num_speakers = static_cast<double>(speakers.size());

  EmResult result{model, {TotalLogLik(model, speakers)}, 0, false, false};
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // E-step
    const std::vector<Eigen::VectorXd> ez =
        PosteriorMeans(model, speakers, opts.threads);
    Eigen::VectorXd z_bar = Eigen::VectorXd::Zero(model.dim());
    double r_bar = 0.0;
    for (std::size_t i = 0; i < speakers.size(); ++i) {
      z_bar += ez[i];
      r_bar += speakers[i].sum().dot(ez[i]);
    }
    z_bar /= num_speakers;
    r_bar /= total_n;

    // M-step
    double b = 0.0;
    UnitVec mu = model.mu();
    if (!opts.freeze_b_zero) {
      const double z_len = z_bar.norm();
      if (z_len > 0.0) {
        mu = UnitVec::Normalize(z_bar);
        b = RhoInv(order, z_len);
      }
    }
    double w;
    if (r_bar > 0.0) {
      w = RhoInv(order, r_bar);
    } else {
      w = kMinWithinConcentration;
      result.w_clamped = true;
    }
    model = PsdaModel(std::max(w, kMinWithinConcentration), b, std::move(mu));

    const double prev = result.loglik_trace.back();
    const double next = TotalLogLik(model, speakers);
    result.loglik_trace.push_back(next);
    result.iterations = iter + 1;
    if ((next - prev) / std::max(std::abs(prev), 1.0) < opts.rel_tol) {
      result.converged = true;
      break;
    }
  }
  result.model = model;
  return result;
}

}  // namespace psda
