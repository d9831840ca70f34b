// psda/metrics.hpp

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

#ifndef PSDA_METRICS_HPP_
#define PSDA_METRICS_HPP_

// Verification metrics over labeled scores. A trial is accepted when its
// score is >= the threshold. Rates are fractions in [0, 1].

#include <vector>

namespace psda {

struct LabeledScores {
  std::vector<double> targets;
  std::vector<double> nontargets;
};

struct DetPoint {
  double p_miss;
  double p_fa;
  /// Accept scores >= threshold; +inf for the reject-all point.
  double threshold;

  friend bool operator==(const DetPoint &, const DetPoint &) = default;
};

/// Empirical operating points, one per distinct score (ascending threshold)
/// followed by the reject-all point. The first point accepts everything.
std::vector<DetPoint> DetPoints(const LabeledScores &s);

/// Equal error rate on the convex hull of the operating points: the point
/// where the hull crosses p_miss = p_fa, interpolated along the hull segment.
double Eer(const LabeledScores &s);

/// Conservative staircase EER: min over operating points of
/// max(p_miss, p_fa). Never below the hull value.
double EerStaircase(const LabeledScores &s);

/// Minimum over operating points of
///   p_tar c_miss p_miss + (1 - p_tar) c_fa p_fa,
/// normalized by the better of the two trivial systems,
/// min(p_tar c_miss, (1 - p_tar) c_fa).
double MinDcf(const LabeledScores &s, double p_tar = 0.05, double c_miss = 1.0,
              double c_fa = 1.0);

}  // namespace psda

#endif  // PSDA_METRICS_HPP_
