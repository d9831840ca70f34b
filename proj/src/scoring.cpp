// scoring.cpp

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

#include "psda/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "psda/errors.hpp"

namespace psda {

namespace {

// Rows per work unit. Fixed so that threading never changes the blocking of
// the matrix products.
constexpr Eigen::Index kRowChunk = 256;

void CheckDim(int want, int got, const char *what) {
  if (want != got) {
    throw DimensionError(std::string(what) + " dimension " + std::to_string(got) +
                         " does not match " + std::to_string(want));
  }
}

// Columns are the per-side vectors.
Eigen::MatrixXd Stack(std::span<const SideStats> sides) {
  Eigen::MatrixXd out(sides.empty() ? 0 : sides.front().dim(), sides.size());
  for (std::size_t j = 0; j < sides.size(); ++j) out.col(j) = sides[j].sum();
  return out;
}

Eigen::MatrixXd Stack(std::span<const UnitVec> vs) {
  Eigen::MatrixXd out(vs.empty() ? 0 : vs.front().dim(), vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) out.col(j) = vs[j].coords();
  return out;
}

// Calls fn(first_row, rows, gram) for every row chunk, where gram is the
// block of E' T for those rows.
template <typename Fn>
void ForEachChunk(const Eigen::MatrixXd &e, const Eigen::MatrixXd &t, int threads,
                  Fn fn) {
  const Eigen::Index m = e.cols();
  const Eigen::Index chunks = (m + kRowChunk - 1) / kRowChunk;
  auto run = [&](Eigen::Index c) {
    const Eigen::Index first = c * kRowChunk;
    const Eigen::Index rows = std::min(kRowChunk, m - first);
    const Eigen::MatrixXd gram = e.middleCols(first, rows).transpose() * t;
    fn(first, rows, gram);
  };
  const int workers =
      static_cast<int>(std::min<Eigen::Index>(std::max(threads, 1), chunks));
  if (workers <= 1) {
    for (Eigen::Index c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::vector<std::thread> pool;
  for (int k = 0; k < workers; ++k) {
    pool.emplace_back([&] {
      for (Eigen::Index c = next++; c < chunks; c = next++) run(c);
    });
  }
  for (auto &th : pool) th.join();
}

}  // namespace

double LlrScore(const PsdaModel &model, const SideStats &enroll,
                const SideStats &test) {
  CheckDim(model.dim(), enroll.dim(), "enroll");
  CheckDim(model.dim(), test.dim(), "test");
  const BesselOrder order = model.order();
  const Eigen::VectorXd ze = model.NaturalParam(enroll);
  const Eigen::VectorXd zt = model.NaturalParam(test);
  // Summing the sides first keeps the score exactly symmetric.
  const Eigen::VectorXd zet = model.NaturalParam(enroll + test);
  return LogCnuFromSquared(order, ze.squaredNorm()) +
         LogCnuFromSquared(order, zt.squaredNorm()) -
         LogCnuFromSquared(order, zet.squaredNorm()) -
         LogCnuFromSquared(order, model.b() * model.b());
}

double LlrScore(const PsdaModel &model, const Trial &trial) {
  return LlrScore(model, trial.enroll, trial.test);
}

Eigen::MatrixXd ScoreMatrix(const PsdaModel &model, std::span<const SideStats> enrolls,
                            std::span<const SideStats> tests, int threads) {
  for (const SideStats &s : enrolls) CheckDim(model.dim(), s.dim(), "enroll");
  for (const SideStats &s : tests) CheckDim(model.dim(), s.dim(), "test");
  const Eigen::Index m = static_cast<Eigen::Index>(enrolls.size());
  const Eigen::Index n = static_cast<Eigen::Index>(tests.size());
  Eigen::MatrixXd out(m, n);
  if (m == 0 || n == 0) return out;

  const BesselOrder order = model.order();
  const double w = model.w();
  const double b = model.b();
  const Eigen::MatrixXd e = Stack(enrolls);
  const Eigen::MatrixXd t = Stack(tests);

  // |b mu + w e_i|^2 with its log C, and for the tests both |b mu + w t_j|^2
  // (numerator) and |w t_j|^2 (expansion of the joint norm).
  Eigen::VectorXd e_sq(m), e_log(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    e_sq[i] = model.NaturalParam(enrolls[i]).squaredNorm();
    e_log[i] = LogCnuFromSquared(order, e_sq[i]);
  }
  Eigen::VectorXd wt_sq(n), t_log(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    wt_sq[j] = (w * t.col(j)).squaredNorm();
    t_log[j] = LogCnuFromSquared(order, model.NaturalParam(tests[j]).squaredNorm());
  }
  // <b mu, w t_j>
  const Eigen::RowVectorXd prior_cross = (b * w) * (model.mu().coords().transpose() * t);
  const double log_c_b = LogCnuFromSquared(order, b * b);

  ForEachChunk(e, t, threads, [&](Eigen::Index first, Eigen::Index rows,
                                  const Eigen::MatrixXd &gram) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index i = first + r;
        const double cross = prior_cross[j] + w * w * gram(r, j);
        const double joint = std::max(0.0, e_sq[i] + wt_sq[j] + 2.0 * cross);
        out(i, j) = e_log[i] + t_log[j] - LogCnuFromSquared(order, joint) - log_c_b;
      }
    }
  });
  return out;
}

double CosineScore(const UnitVec &e, const UnitVec &t) {
  CheckDim(e.dim(), t.dim(), "test");
  return e.coords().dot(t.coords());
}

Eigen::MatrixXd CosineMatrix(std::span<const UnitVec> enrolls,
                             std::span<const UnitVec> tests, int threads) {
  const Eigen::Index m = static_cast<Eigen::Index>(enrolls.size());
  const Eigen::Index n = static_cast<Eigen::Index>(tests.size());
  Eigen::MatrixXd out(m, n);
  if (m == 0 || n == 0) return out;
  const int dim = enrolls.front().dim();
  for (const UnitVec &v : enrolls) CheckDim(dim, v.dim(), "enroll");
  for (const UnitVec &v : tests) CheckDim(dim, v.dim(), "test");
  ForEachChunk(Stack(enrolls), Stack(tests), threads,
               [&](Eigen::Index first, Eigen::Index rows, const Eigen::MatrixXd &gram) {
                 out.middleRows(first, rows) = gram;
               });
  return out;
}

}  // namespace psda
