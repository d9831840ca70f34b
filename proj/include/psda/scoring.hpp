// psda/scoring.hpp

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

#ifndef PSDA_SCORING_HPP_
#define PSDA_SCORING_HPP_

#include <optional>
#include <span>

#include <Eigen/Core>

#include "psda/psda_model.hpp"
#include "psda/vmf.hpp"

namespace psda {

struct Trial {
  SideStats enroll;
  SideStats test;
  /// true for same-speaker trials, when known.
  std::optional<bool> is_target;
};

/// Natural-log likelihood ratio of "same speaker" against "different
/// speakers":
///   log C(|b mu + w e|) + log C(|b mu + w t|) - log C(|b mu + w e + w t|)
///   - log C(b)
/// with e, t the summed embeddings of each side. Symmetric in the sides.
double LlrScore(const PsdaModel &model, const SideStats &enroll,
                const SideStats &test);
double LlrScore(const PsdaModel &model, const Trial &trial);

/// All enroll x test scores. Entry (i, j) scores enrolls[i] against
/// tests[j]. Rows are processed in fixed chunks, optionally on several
/// threads; the result does not depend on the thread count.
Eigen::MatrixXd ScoreMatrix(const PsdaModel &model, std::span<const SideStats> enrolls,
                            std::span<const SideStats> tests, int threads = 1);

/// Dot product of two unit vectors.
double CosineScore(const UnitVec &e, const UnitVec &t);

/// All enroll x test cosines, with the same blocking as ScoreMatrix.
Eigen::MatrixXd CosineMatrix(std::span<const UnitVec> enrolls,
                             std::span<const UnitVec> tests, int threads = 1);

}  // namespace psda

#endif  // PSDA_SCORING_HPP_
