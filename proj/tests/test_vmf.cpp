// test_vmf.cpp

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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "psda/errors.hpp"
#include "psda/vmf.hpp"

using namespace psda;

namespace {

Eigen::VectorXd Vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

UnitVec RandomDirection(int dim, std::uint64_t seed) {
  return Sample(VmfParams(UnitVec::Canonical(dim), 0.0), 1, seed).front();
}

// Root of coth(k) - 1/k = r by bisection.
double InverseLangevin(double r) {
  double lo = 1e-12, hi = 1e6;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = 1.0 / std::tanh(mid) - 1.0 / mid - r;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("unit vector construction") {
  const UnitVec x = UnitVec::FromVector(Vec3(0.0, 0.0, 1.0005));
  CHECK(std::abs(x.coords().norm() - 1.0) < 1e-15);
  CHECK_THROWS_AS(UnitVec::FromVector(Vec3(0.0, 0.0, 0.9)), DataError);
  CHECK_THROWS_AS(UnitVec::FromVector(Vec3(0.0, 0.0, 1.002)), DataError);
  CHECK_THROWS_AS(UnitVec::FromVector(Eigen::VectorXd::Ones(1)), DimensionError);
  CHECK_THROWS_AS(UnitVec::FromVector(Vec3(NAN, 0.0, 1.0)), DataError);
  CHECK_THROWS_AS(UnitVec::Normalize(Eigen::VectorXd::Zero(3)), DataError);
  CHECK_THROWS_AS(VmfParams(UnitVec::Canonical(3), -1.0), DomainError);
}

TEST_CASE("density relative to uniform") {
  const UnitVec x = RandomDirection(5, 3);
  CHECK(LogDensityRelUniform(VmfParams(UnitVec::Canonical(5, 2), 0.0), x) == 0.0);

  const UnitVec mu = UnitVec::Canonical(3);
  const double expected = -std::log(std::sinh(1.0)) + 1.0;
  CHECK(LogDensityRelUniform(VmfParams(mu, 1.0), mu) ==
        doctest::Approx(expected).epsilon(1e-13));

  CHECK_THROWS_AS(LogDensityRelUniform(VmfParams(mu, 1.0), RandomDirection(4, 1)),
                  DimensionError);
}

TEST_CASE("density integrates to one against the uniform measure") {
  const VmfParams p(UnitVec::Normalize(Vec3(1.0, 2.0, -0.5)), 2.0);
  const std::vector<UnitVec> xs =
      Sample(VmfParams(UnitVec::Canonical(3), 0.0), 1000000, 11);
  double sum = 0.0, sum_sq = 0.0;
  for (const UnitVec &x : xs) {
    const double v = std::exp(LogDensityRelUniform(p, x));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("ML fit examples") {
  const UnitVec x = RandomDirection(6, 5);
  const UnitVec neg = -x;
  const std::vector<UnitVec> pair = {x, neg};
  const VmfParams uniform = FitMl(pair);
  CHECK(uniform.kappa() == 0.0);
  CHECK(uniform.mu().coords() == UnitVec::Canonical(6).coords());

  const std::vector<UnitVec> e12 = {UnitVec::Canonical(3, 0), UnitVec::Canonical(3, 1)};
  const VmfParams fit = FitMl(e12);
  CHECK(fit.mu()[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(fit.mu()[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(fit.mu()[2] == 0.0);
  CHECK(fit.kappa() == doctest::Approx(InverseLangevin(std::sqrt(0.5))).epsilon(1e-10));

  CHECK_THROWS_AS(FitMl(std::vector<UnitVec>{}), DataError);
  const std::vector<UnitVec> same = {x, x, x};
  CHECK_THROWS_AS(FitMl(same), CappedConcentrationError);
  const std::vector<UnitVec> mixed = {x, UnitVec::Canonical(3)};
  CHECK_THROWS_AS(FitMl(mixed), DimensionError);
}

TEST_CASE("ML fit recovers sampled parameters") {
  const UnitVec mu = RandomDirection(16, 21);
  const VmfParams truth(mu, 20.0);
  const std::vector<UnitVec> xs = Sample(truth, 100000, 77);
  const VmfParams fit = FitMl(xs);
  CHECK(std::abs(fit.kappa() - 20.0) < 0.02 * 20.0);
  CHECK(fit.mu().coords().dot(mu.coords()) > 0.999);
}

TEST_CASE("ML fit error shrinks with sample size") {
  const VmfParams truth(RandomDirection(16, 4), 20.0);
  const double small =
      std::abs(FitMl(Sample(truth, 1000, 5)).kappa() - 20.0);
  const double large =
      std::abs(FitMl(Sample(truth, 100000, 6)).kappa() - 20.0);
  CHECK(large < small);
}

TEST_CASE("ML fit depends only on the mean") {
  std::vector<UnitVec> xs = Sample(VmfParams(RandomDirection(8, 2), 5.0), 50, 9);
  const VmfParams base = FitMl(xs);
  std::mt19937_64 rng(3);
  std::shuffle(xs.begin(), xs.end(), rng);
  const VmfParams shuffled = FitMl(xs);
  CHECK(shuffled.kappa() == doctest::Approx(base.kappa()).epsilon(1e-13));
  CHECK((shuffled.mu().coords() - base.mu().coords()).norm() < 1e-13);

  // Two unit points m +- s u with u orthogonal to m share the mean m.
  Eigen::VectorXd m = Eigen::VectorXd::Zero(8);
  for (const UnitVec &x : xs) m += x.coords();
  m /= static_cast<double>(xs.size());
  Eigen::VectorXd u = RandomDirection(8, 13).coords();
  u -= u.dot(m) / m.squaredNorm() * m;
  u.normalize();
  const double s = std::sqrt(1.0 - m.squaredNorm());
  const std::vector<UnitVec> two = {UnitVec::FromVector(m + s * u),
                                    UnitVec::FromVector(m - s * u)};
  const VmfParams fit_two = FitMl(two);
  CHECK(fit_two.kappa() == doctest::Approx(base.kappa()).epsilon(1e-10));
  CHECK((fit_two.mu().coords() - base.mu().coords()).norm() < 1e-10);
}

TEST_CASE("mean vector") {
  CHECK(MeanVector(VmfParams(UnitVec::Canonical(4), 0.0)).norm() == 0.0);
  const Eigen::VectorXd m = MeanVector(VmfParams(UnitVec::Canonical(3), 1.0));
  CHECK(m[0] == doctest::Approx(1.0 / std::tanh(1.0) - 1.0).epsilon(1e-13));
  CHECK(m[1] == 0.0);
  const VmfParams p(RandomDirection(20, 8), 13.0);
  CHECK(MeanVector(p).norm() == doctest::Approx(Rho(p.order(), 13.0)).epsilon(1e-15));
  CHECK(MeanVector(p).norm() < 1.0);
}

TEST_CASE("sampler: uniform case") {
  const std::vector<UnitVec> xs = Sample(VmfParams(UnitVec::Canonical(8), 0.0), 100000, 1);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(8);
  for (const UnitVec &x : xs) sum += x.coords();
  CHECK((sum / 1e5).norm() < 0.02);
}

TEST_CASE("sampler: concentrated case") {
  const UnitVec mu = RandomDirection(8, 12);
  for (const UnitVec &x : Sample(VmfParams(mu, 1e4), 10000, 2)) {
    CHECK(std::abs(x.coords().norm() - 1.0) < 1e-12);
    CHECK(mu.coords().dot(x.coords()) > 0.99);
  }
}

TEST_CASE("sampler: mean cosine matches rho") {
  struct Case { int dim; double kappa; };
  for (const Case c : {Case{2, 0.5}, Case{3, 1.0}, Case{3, 50.0}, Case{16, 20.0},
                       Case{64, 30.0}, Case{256, 300.0}, Case{8, 1e6}}) {
    const VmfParams p(RandomDirection(c.dim, 40), c.kappa);
    const std::vector<UnitVec> xs = Sample(p, 50000, 41);
    double sum = 0.0, sum_sq = 0.0;
    for (const UnitVec &x : xs) {
      const double t = p.mu().coords().dot(x.coords());
      sum += t;
      sum_sq += t * t;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    const double se = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0) / n);
    INFO("dim=" << c.dim << " kappa=" << c.kappa);
    CHECK(std::abs(mean - Rho(p.order(), c.kappa)) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("sampler is deterministic per seed") {
  const VmfParams p(RandomDirection(10, 6), 7.0);
  const auto a = Sample(p, 100, 99);
  const auto b = Sample(p, 100, 99);
  const auto c = Sample(p, 100, 100);
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal = all_equal && a[i].coords() == b[i].coords();
    any_diff = any_diff || a[i].coords() != c[i].coords();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}
