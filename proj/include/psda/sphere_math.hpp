// psda/sphere_math.hpp

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

#ifndef PSDA_SPHERE_MATH_HPP_
#define PSDA_SPHERE_MATH_HPP_

// Log-scale modified Bessel functions of the first kind and the derived
// quantities needed for Von Mises-Fisher work on S^{d-1}:
//
//   log I_nu(kappa)
//   log C_nu(kappa) = nu log kappa - log I_nu(kappa)   (VMF normalizer)
//   rho(kappa)      = I_{nu+1}(kappa) / I_nu(kappa)   (mean resultant length)
//   rho^{-1}(r)
//
// Small arguments (kappa < sqrt(nu + 1)) use the all-positive power series.
// Larger arguments use the uniform (Debye) asymptotic expansion in the order,
// applied at an order >= 30 and carried down to small orders with the
// backward three-term recurrence, which is stable for I_nu.
//
// All functions are pure and thread-safe.

namespace psda {

/// Order nu >= 0 of a modified Bessel function. For embeddings of dimension
/// d the order is d/2 - 1.
class BesselOrder {
 public:
  explicit BesselOrder(double nu);
  static BesselOrder FromDim(int dim);

  double value() const { return nu_; }
  /// Embedding dimension d = 2 nu + 2 (may be fractional for a free order).
  double dim() const { return 2.0 * nu_ + 2.0; }

  friend bool operator==(const BesselOrder &, const BesselOrder &) = default;

 private:
  double nu_;
};

/// Largest mean resultant length rho_inv accepts.
inline constexpr double kRhoMax = 1.0 - 1e-10;

/// log I_nu(kappa). Returns -inf for nu > 0, kappa = 0.
double LogBesselI(BesselOrder order, double kappa);

/// log C_nu(kappa). At kappa = 0 returns the limit nu log 2 + lgamma(nu + 1).
double LogCnu(BesselOrder order, double kappa);

/// log C_nu(sqrt(kappa_sq)). Avoids a square root for callers that have the
/// squared norm; near zero it is exact in kappa_sq, which matters when the
/// squared norm was formed by cancellation.
double LogCnuFromSquared(BesselOrder order, double kappa_sq);

/// I_{nu+1}(kappa) / I_nu(kappa), in [0, 1).
double Rho(BesselOrder order, double kappa);

/// 1 - rho(kappa), computed without cancellation for large kappa.
double OneMinusRho(BesselOrder order, double kappa);

/// Inverse of Rho. r must lie in [0, kRhoMax); r in [kRhoMax, 1) raises
/// CappedConcentrationError, anything else DomainError.
double RhoInv(BesselOrder order, double r);

namespace internal {

struct BesselEval {
  double log_i;             // log I_nu(kappa)
  double log_ratio;         // log(I_{nu+1}(kappa) / I_nu(kappa))
  double one_minus_ratio;   // 1 - I_{nu+1}(kappa) / I_nu(kappa)
};

// Branch evaluators, exposed for regime-continuity tests. Neither checks
// its domain; kappa must be positive except where noted.
BesselEval SeriesEval(double nu, double kappa);  // kappa >= 0
BesselEval AsymptoticEval(double nu, double kappa);
bool UseSeries(double nu, double kappa);

// Full evaluation with domain checks.
BesselEval Evaluate(BesselOrder order, double kappa);

}  // namespace internal

}  // namespace psda

#endif  // PSDA_SPHERE_MATH_HPP_
