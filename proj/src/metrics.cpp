// metrics.cpp

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

#include "psda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psda/errors.hpp"

namespace psda {

namespace {

void CheckScores(const LabeledScores &s) {
  if (s.targets.empty() || s.nontargets.empty()) {
    throw DataError("metrics need at least one target and one non-target score");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(s.targets.begin(), s.targets.end(), finite) ||
      !std::all_of(s.nontargets.begin(), s.nontargets.end(), finite)) {
    throw DataError("scores must be finite");
  }
}

// Cross product of (a - o) and (b - o) in the (p_fa, p_miss) plane.
double Cross(const DetPoint &o, const DetPoint &a, const DetPoint &b) {
  return (a.p_fa - o.p_fa) * (b.p_miss - o.p_miss) -
         (a.p_miss - o.p_miss) * (b.p_fa - o.p_fa);
}

}  // namespace

std::vector<DetPoint> DetPoints(const LabeledScores &s) {
  CheckScores(s);
  std::vector<double> tar = s.targets;
  std::vector<double> non = s.nontargets;
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());

  std::vector<DetPoint> points;
  std::size_t it = 0, in = 0;  // counts of targets / non-targets below threshold
  while (it < tar.size() || in < non.size()) {
    const double v = in == non.size()   ? tar[it]
                     : it == tar.size() ? non[in]
                                        : std::min(tar[it], non[in]);
    points.push_back({it / nt, (nn - in) / nn, v});
    while (it < tar.size() && tar[it] == v) ++it;
    while (in < non.size() && non[in] == v) ++in;
  }
  points.push_back({1.0, 0.0, std::numeric_limits<double>::infinity()});
  return points;
}

double Eer(const LabeledScores &s) {
  std::vector<DetPoint> pts = DetPoints(s);
  // Lower hull in the (p_fa, p_miss) plane, p_fa ascending.
  std::sort(pts.begin(), pts.end(), [](const DetPoint &a, const DetPoint &b) {
    return a.p_fa < b.p_fa || (a.p_fa == b.p_fa && a.p_miss < b.p_miss);
  });
  std::vector<DetPoint> hull;
  for (const DetPoint &p : pts) {
    while (hull.size() >= 2 && Cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  // The hull starts on p_miss > p_fa, i.e. at (0, 1) or a point below it
  // on the p_fa = 0 axis, and ends at (1, 0).
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const double gap = hull[k].p_miss - hull[k].p_fa;
    if (gap > 0.0) continue;
    if (k == 0) return hull[0].p_fa;
    const DetPoint &p = hull[k - 1];
    const double gap_p = p.p_miss - p.p_fa;
    const double t = gap_p / (gap_p - gap);
    return p.p_fa + t * (hull[k].p_fa - p.p_fa);
  }
  return 0.0;  // unreachable: (1, 0) closes the hull
}

double EerStaircase(const LabeledScores &s) {
  double best = 1.0;
  for (const DetPoint &p : DetPoints(s)) {
    best = std::min(best, std::max(p.p_miss, p.p_fa));
  }
  return best;
}

double MinDcf(const LabeledScores &s, double p_tar, double c_miss, double c_fa) {
  if (!(p_tar > 0.0 && p_tar < 1.0)) {
    throw DomainError("target prior must lie in (0, 1)");
  }
  if (!(c_miss > 0.0) || !(c_fa > 0.0) || !std::isfinite(c_miss) ||
      !std::isfinite(c_fa)) {
    throw DomainError("detection costs must be positive and finite");
  }
  const double w_miss = p_tar * c_miss;
  const double w_fa = (1.0 - p_tar) * c_fa;
  double best = std::numeric_limits<double>::infinity();
  for (const DetPoint &p : DetPoints(s)) {
    best = std::min(best, w_miss * p.p_miss + w_fa * p.p_fa);
  }
  return best / std::min(w_miss, w_fa);
}

}  // namespace psda
