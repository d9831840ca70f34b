// vmf.cpp

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

#include "psda/vmf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "psda/errors.hpp"

namespace psda {

namespace {

void CheckSameDim(int a, int b, const char *what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

Eigen::VectorXd GaussianVector(int dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; ++i) g[i] = normal(rng);
  return g;
}

// Cosine t = mu'x of a VMF draw (Wood's rejection scheme). Returns t together
// with 1 - t^2, which is formed without cancellation for t near 1.
std::pair<double, double> SampleCosine(double kappa, int dim,
                                       std::mt19937_64 &rng) {
  const double dm1 = dim - 1.0;
  const double b = dm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double one_minus_x0 = 2.0 * b / (1.0 + b);
  const double c = kappa * x0 + dm1 * (std::log(4.0 * b) - 2.0 * std::log1p(b));

  std::gamma_distribution<double> gamma(0.5 * dm1, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (;;) {
    const double g1 = gamma(rng);
    const double g2 = gamma(rng);
    const double z = g1 / (g1 + g2);
    const double den = 1.0 - (1.0 - b) * z;
    const double t = (1.0 - (1.0 + b) * z) / den;
    const double one_minus_t = 2.0 * b * z / den;
    const double one_minus_x0t = one_minus_x0 + x0 * one_minus_t;
    const double u = uniform(rng);
    if (kappa * t + dm1 * std::log(one_minus_x0t) - c >= std::log(u)) {
      const double one_minus_t2 = 4.0 * b * z * (1.0 - z) / (den * den);
      return {t, one_minus_t2};
    }
  }
}

}  // namespace

UnitVec UnitVec::FromVector(Eigen::VectorXd v) {
  if (v.size() < 2) {
    throw DimensionError("unit vectors need dimension >= 2, got " +
                         std::to_string(v.size()));
  }
  if (!v.allFinite()) throw DataError("vector has non-finite coordinates");
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > kRenormTolerance) {
    throw DataError("vector norm " + std::to_string(norm) +
                    " is not within 1e-3 of 1");
  }
  // Already-normalized input is kept bit-for-bit so that stored unit vectors
  // round-trip exactly.
  if (std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    v /= norm;
  }
  return UnitVec(std::move(v));
}

UnitVec UnitVec::Normalize(const Eigen::VectorXd &v) {
  if (v.size() < 2) {
    throw DimensionError("unit vectors need dimension >= 2, got " +
                         std::to_string(v.size()));
  }
  const double norm = v.norm();
  if (!std::isfinite(norm) || norm == 0.0) {
    throw DataError("cannot normalize a zero or non-finite vector");
  }
  return UnitVec(v / norm);
}

UnitVec UnitVec::Canonical(int dim, int axis) {
  if (dim < 2 || axis < 0 || axis >= dim) {
    throw DimensionError("bad canonical direction " + std::to_string(axis) +
                         " in dimension " + std::to_string(dim));
  }
  return UnitVec(Eigen::VectorXd::Unit(dim, axis));
}

VmfParams::VmfParams(UnitVec mu, double kappa) : mu_(std::move(mu)), kappa_(kappa) {
  if (!std::isfinite(kappa) || kappa < 0.0) {
    throw DomainError("concentration must be finite and >= 0, got " +
                      std::to_string(kappa));
  }
}

double LogDensityRelUniform(const VmfParams &p, const UnitVec &x) {
  CheckSameDim(p.dim(), x.dim(), "vmf density");
  if (p.kappa() == 0.0) return 0.0;
  const BesselOrder order = p.order();
  return LogCnu(order, p.kappa()) - LogCnu(order, 0.0) +
         p.kappa() * p.mu().coords().dot(x.coords());
}

VmfParams FitMl(std::span<const UnitVec> xs) {
  if (xs.empty()) throw DataError("cannot fit a VMF to an empty set");
  const int dim = xs.front().dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (const UnitVec &x : xs) {
    CheckSameDim(dim, x.dim(), "vmf fit");
    sum += x.coords();
  }
  return FitMlFromMean(sum / static_cast<double>(xs.size()));
}

VmfParams FitMlFromMean(const Eigen::VectorXd &mean) {
  const int dim = static_cast<int>(mean.size());
  const double r = mean.norm();
  if (!std::isfinite(r) || r > 1.0 + 1e-6) {
    throw DomainError("sample mean must lie inside the unit ball, norm " +
                      std::to_string(r));
  }
  if (r == 0.0) return VmfParams(UnitVec::Canonical(dim), 0.0);
  if (r >= kRhoMax) {
    throw CappedConcentrationError(
        "mean resultant length " + std::to_string(r) +
            " exceeds the cap; data are numerically coincident",
        kRhoMax);
  }
  return VmfParams(UnitVec::Normalize(mean), RhoInv(BesselOrder::FromDim(dim), r));
}

Eigen::VectorXd MeanVector(const VmfParams &p) {
  if (p.kappa() == 0.0) return Eigen::VectorXd::Zero(p.dim());
  return Rho(p.order(), p.kappa()) * p.mu().coords();
}

UnitVec SampleOne(const VmfParams &p, std::mt19937_64 &rng) {
  const int dim = p.dim();
  if (p.kappa() == 0.0) {
    for (;;) {
      Eigen::VectorXd g = GaussianVector(dim, rng);
      if (g.squaredNorm() > 0.0) return UnitVec::Normalize(g);
    }
  }
  const Eigen::VectorXd &mu = p.mu().coords();
  const auto [t, one_minus_t2] = SampleCosine(p.kappa(), dim, rng);
  for (;;) {
    Eigen::VectorXd v = GaussianVector(dim, rng);
    v -= v.dot(mu) * mu;
    const double vn = v.norm();
    if (vn == 0.0) continue;
    return UnitVec::Normalize(t * mu + std::sqrt(one_minus_t2) / vn * v);
  }
}

std::vector<UnitVec> Sample(const VmfParams &p, std::size_t n,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<UnitVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(SampleOne(p, rng));
  return out;
}

}  // namespace psda
