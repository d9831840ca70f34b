// sphere_math.cpp

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

#include "psda/sphere_math.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "psda/errors.hpp"

namespace psda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Series: stop once a term is below this fraction of the running sum.
constexpr double kSeriesRelTol = 1e-17;
constexpr int kSeriesMaxTerms = 500;

// The Debye expansion is evaluated at orders >= this value; smaller orders
// are reached by backward recurrence.
constexpr double kMinDebyeOrder = 30.0;
constexpr int kDebyeTerms = 13;  // U_0 .. U_12

// Normalized power series S(nu, q) = sum_i q^i / (i! (nu+1)_i), q = kappa^2/4,
// so that I_nu(kappa) = (kappa/2)^nu / Gamma(nu+1) * S.
double NormalizedSeries(double nu, double q) {
  double term = 1.0;
  double sum = 1.0;
  for (int i = 0; i < kSeriesMaxTerms; ++i) {
    term *= q / ((i + 1.0) * (i + 1.0 + nu));
    sum += term;
    if (term < kSeriesRelTol * sum) break;
  }
  return sum;
}

// Coefficients of the Debye polynomials U_k(p), ascending powers of p.
// U_0 = 1,
// U_{k+1}(p) = p^2 (1 - p^2) U_k'(p) / 2 + (1/8) int_0^p (1 - 5 t^2) U_k(t) dt.
using Poly = std::vector<double>;

std::array<Poly, kDebyeTerms> MakeDebyePolys() {
  std::array<Poly, kDebyeTerms> u;
  u[0] = {1.0};
  for (int k = 0; k + 1 < kDebyeTerms; ++k) {
    const Poly &prev = u[k];
    Poly next(prev.size() + 3, 0.0);
    for (std::size_t j = 1; j < prev.size(); ++j) {
      // p^2 (1 - p^2) * j c_j p^{j-1} / 2
      next[j + 1] += 0.5 * j * prev[j];
      next[j + 3] -= 0.5 * j * prev[j];
    }
    for (std::size_t j = 0; j < prev.size(); ++j) {
      // (1/8) int_0^p (c_j t^j - 5 c_j t^{j+2}) dt
      next[j + 1] += prev[j] / (8.0 * (j + 1));
      next[j + 3] -= 5.0 * prev[j] / (8.0 * (j + 3));
    }
    u[k + 1] = std::move(next);
  }
  return u;
}

double EvalPoly(const Poly &c, double p) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * p + *it;
  return acc;
}

// log sum_k U_k(p) / m^k.
double LogDebyeSum(double m, double p) {
  static const std::array<Poly, kDebyeTerms> polys = MakeDebyePolys();
  double sum = 1.0;
  double inv_pow = 1.0;
  for (int k = 1; k < kDebyeTerms; ++k) {
    inv_pow /= m;
    const double term = EvalPoly(polys[k], p) * inv_pow;
    sum += term;
    if (std::abs(term) < 1e-18 * sum) break;
  }
  return std::log(sum);
}

// log I_m(kappa) - kappa from the uniform expansion.
double DebyeLogIScaled(double m, double kappa) {
  const double s0 = std::hypot(m, kappa);
  return m * m / (s0 + kappa) + m * std::log(kappa / (m + s0)) -
         0.5 * std::log(2.0 * std::numbers::pi * s0) + LogDebyeSum(m, m / s0);
}

// log I_m(kappa) and log(I_{m+1}/I_m) from the uniform expansion, for m
// large enough that the expansion is accurate. The ratio is assembled from
// differences computed in closed form so that it stays accurate when both
// logs are large.
//
// The returned log_i excludes a leading kappa (log I - kappa), so that callers
// can add the large part exactly once.
internal::BesselEval DebyeEvalScaled(double m, double kappa) {
  const double s0 = std::hypot(m, kappa);
  const double s1 = std::hypot(m + 1.0, kappa);
  const double log_i = DebyeLogIScaled(m, kappa);

  const double ds = (2.0 * m + 1.0) / (s1 + s0);
  const double order_term =
      std::log(kappa / (m + 1.0 + s1)) - m * std::log1p((1.0 + ds) / (m + s0));
  const double sqrt_term = -0.5 * std::log1p(ds / s0);
  const double sum_term =
      LogDebyeSum(m + 1.0, (m + 1.0) / s1) - LogDebyeSum(m, m / s0);
  const double log_ratio = ds + order_term + sqrt_term + sum_term;
  return {log_i, log_ratio, -std::expm1(log_ratio)};
}

void CheckKappa(double kappa) {
  if (!std::isfinite(kappa) || kappa < 0.0) {
    throw DomainError("concentration must be finite and >= 0, got " +
                      std::to_string(kappa));
  }
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
  if (!std::isfinite(nu) || nu < 0.0) {
    throw DomainError("Bessel order must be finite and >= 0, got " +
                      std::to_string(nu));
  }
}

BesselOrder BesselOrder::FromDim(int dim) {
  if (dim < 2) {
    throw DomainError("embedding dimension must be >= 2, got " +
                      std::to_string(dim));
  }
  return BesselOrder(0.5 * dim - 1.0);
}

namespace internal {

bool UseSeries(double nu, double kappa) {
  return kappa * kappa < nu + 1.0;
}

BesselEval SeriesEval(double nu, double kappa) {
  const double q = 0.25 * kappa * kappa;
  const double s0 = NormalizedSeries(nu, q);
  const double s1 = NormalizedSeries(nu + 1.0, q);
  const double log_s0 = std::log(s0);
  double log_i;
  if (kappa == 0.0) {
    log_i = nu == 0.0 ? 0.0 : -kInf;
  } else {
    log_i = nu * std::log(0.5 * kappa) - std::lgamma(nu + 1.0) + log_s0;
  }
  // I_{nu+1}/I_nu = (kappa/2)/(nu+1) * S(nu+1)/S(nu)
  const double ratio = 0.5 * kappa / (nu + 1.0) * (s1 / s0);
  const double log_ratio = kappa == 0.0 ? -kInf : std::log(ratio);
  return {log_i, log_ratio, 1.0 - ratio};
}

BesselEval AsymptoticEval(double nu, double kappa) {
  // Shift up by an integer so the recurrence lands exactly on nu.
  const double steps = nu >= kMinDebyeOrder ? 0.0 : std::ceil(kMinDebyeOrder - nu);
  BesselEval e = DebyeEvalScaled(nu + steps, kappa);
  // I_{k-1} = I_{k+1} + (2k/kappa) I_k; track r_k = I_{k+1}/I_k and 1 - r_k.
  double ratio = std::exp(e.log_ratio);
  double comp = e.one_minus_ratio;
  double log_i = e.log_i;
  for (int j = static_cast<int>(steps); j > 0; --j) {
    const double k = nu + j;
    const double t = 2.0 * k / kappa;
    const double down = ratio + t;  // I_{k-1} / I_k
    log_i += std::log(down);
    comp = (t - comp) / down;
    ratio = 1.0 / down;
  }
  const double log_ratio = steps == 0.0 ? e.log_ratio : std::log(ratio);
  return {log_i + kappa, log_ratio, comp};
}

BesselEval Evaluate(BesselOrder order, double kappa) {
  CheckKappa(kappa);
  const double nu = order.value();
  return UseSeries(nu, kappa) ? SeriesEval(nu, kappa)
                              : AsymptoticEval(nu, kappa);
}

}  // namespace internal

double LogBesselI(BesselOrder order, double kappa) {
  return internal::Evaluate(order, kappa).log_i;
}

double LogCnu(BesselOrder order, double kappa) {
  CheckKappa(kappa);
  return LogCnuFromSquared(order, kappa * kappa);
}

double LogCnuFromSquared(BesselOrder order, double kappa_sq) {
  if (!std::isfinite(kappa_sq) || kappa_sq < 0.0) {
    throw DomainError("squared concentration must be finite and >= 0, got " +
                      std::to_string(kappa_sq));
  }
  const double nu = order.value();
  if (kappa_sq < nu + 1.0) {
    // nu log kappa - log I = nu log 2 + lgamma(nu+1) - log S, finite at 0.
    return nu * std::numbers::ln2 + std::lgamma(nu + 1.0) -
           std::log(NormalizedSeries(nu, 0.25 * kappa_sq));
  }
  const double kappa = std::sqrt(kappa_sq);
  if (nu >= kMinDebyeOrder) {
    // No recurrence needed, so skip the ratio.
    return nu * std::log(kappa) - (DebyeLogIScaled(nu, kappa) + kappa);
  }
  return nu * std::log(kappa) - internal::AsymptoticEval(nu, kappa).log_i;
}

double Rho(BesselOrder order, double kappa) {
  const internal::BesselEval e = internal::Evaluate(order, kappa);
  return kappa == 0.0 ? 0.0 : std::exp(e.log_ratio);
}

double OneMinusRho(BesselOrder order, double kappa) {
  return internal::Evaluate(order, kappa).one_minus_ratio;
}

double RhoInv(BesselOrder order, double r) {
  if (!std::isfinite(r) || r < 0.0 || r >= 1.0) {
    throw DomainError("mean resultant length must lie in [0, 1), got " +
                      std::to_string(r));
  }
  if (r >= kRhoMax) {
    throw CappedConcentrationError(
        "mean resultant length " + std::to_string(r) +
            " exceeds the cap; data are numerically coincident",
        kRhoMax);
  }
  if (r == 0.0) return 0.0;

  const double comp_r = 1.0 - r;
  // rho(kappa) - r, expressed through complements to keep resolution near 1.
  auto f = [&](double kappa) {
    return comp_r - internal::Evaluate(order, kappa).one_minus_ratio;
  };

  const double d = order.dim();
  const double guess = r * (d - r * r) / (1.0 - r * r);
  double lo = 0.0;
  double hi = guess;
  double f_lo = -r;
  double f_hi = f(hi);
  while (f_hi < 0.0) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = f(hi);
  }
  // Tighten the lower end when the guess overshoots.
  for (double cand = 0.5 * hi; lo == 0.0 && cand > 1e-300; cand *= 0.5) {
    const double fc = f(cand);
    if (fc > 0.0) {
      hi = cand;
      f_hi = fc;
    } else {
      lo = cand;
      f_lo = fc;
    }
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  auto tol = [](double a, double b) {
    return std::abs(b - a) < 1e-12 * (1.0 + std::min(a, b));
  };
  std::uintmax_t max_iter = 200;
  const std::pair<double, double> bracket =
      boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace psda
