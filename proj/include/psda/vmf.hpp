// psda/vmf.hpp

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

#ifndef PSDA_VMF_HPP_
#define PSDA_VMF_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "psda/sphere_math.hpp"

namespace psda {

/// Inputs whose norm is within this distance of 1 are renormalized.
inline constexpr double kRenormTolerance = 1e-3;

/// A point on the unit hypersphere S^{d-1}, d >= 2.
class UnitVec {
 public:
  /// Validates and renormalizes. Throws DataError when |norm - 1| exceeds
  /// kRenormTolerance or a coordinate is not finite, DimensionError when the
  /// dimension is below 2.
  static UnitVec FromVector(Eigen::VectorXd v);
  /// Projects any nonzero finite vector onto the sphere.
  static UnitVec Normalize(const Eigen::VectorXd &v);
  /// The axis-th canonical basis vector.
  static UnitVec Canonical(int dim, int axis = 0);

  const Eigen::VectorXd &coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  /// Antipodal point, exact.
  UnitVec operator-() const { return UnitVec(-coords_); }

 private:
  explicit UnitVec(Eigen::VectorXd v) : coords_(std::move(v)) {}
  Eigen::VectorXd coords_;
};

/// Mean direction and concentration of a Von Mises-Fisher distribution. At
/// kappa = 0 the distribution is uniform and mu carries no information.
class VmfParams {
 public:
  VmfParams(UnitVec mu, double kappa);

  const UnitVec &mu() const { return mu_; }
  double kappa() const { return kappa_; }
  int dim() const { return mu_.dim(); }
  BesselOrder order() const { return BesselOrder::FromDim(dim()); }

 private:
  UnitVec mu_;
  double kappa_;
};

/// log of the VMF density divided by the uniform density on the sphere:
/// log C(kappa) - log C(0) + kappa mu'x.
double LogDensityRelUniform(const VmfParams &p, const UnitVec &x);

/// Maximum-likelihood fit. Depends on the data only through their mean.
VmfParams FitMl(std::span<const UnitVec> xs);

/// Maximum-likelihood fit from the sample mean (inside the unit ball). A zero
/// mean yields kappa = 0 with mu the first canonical direction.
VmfParams FitMlFromMean(const Eigen::VectorXd &mean);

/// E[x] = rho(kappa) mu.
Eigen::VectorXd MeanVector(const VmfParams &p);

/// n i.i.d. draws, deterministic in seed.
std::vector<UnitVec> Sample(const VmfParams &p, std::size_t n,
                            std::uint64_t seed);

/// One draw using a caller-owned generator.
UnitVec SampleOne(const VmfParams &p, std::mt19937_64 &rng);

}  // namespace psda

#endif  // PSDA_VMF_HPP_
