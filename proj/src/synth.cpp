// synth.cpp

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

#include "psda/synth.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <utility>

#include "psda/errors.hpp"
#include "psda/vmf.hpp"

namespace psda {

SynthData SynthDataset(const PsdaModel &truth, std::span<const int> per_speaker,
                       std::uint64_t seed, const std::string &prefix) {
  std::mt19937_64 rng(seed);
  SynthData out{EmbeddingTable(truth.dim()), {}};
  const VmfParams prior(truth.mu(), truth.b());
  for (std::size_t i = 0; i < per_speaker.size(); ++i) {
    if (per_speaker[i] < 1) {
      throw DataError("every synthetic speaker needs at least one segment");
    }
    const std::string spk = prefix + "s" + std::to_string(i);
    const VmfParams within(SampleOne(prior, rng), truth.w());
    for (int j = 0; j < per_speaker[i]; ++j) {
      const std::string seg = spk + "_" + std::to_string(j);
      out.table.Add(seg, SampleOne(within, rng));
      out.labels.emplace_back(seg, spk);
    }
  }
  return out;
}

SynthData SynthDataset(const PsdaModel &truth, int speakers, int per_speaker,
                       std::uint64_t seed, const std::string &prefix) {
  if (speakers < 1) throw DataError("need at least one synthetic speaker");
  const std::vector<int> counts(static_cast<std::size_t>(speakers), per_speaker);
  return SynthDataset(truth, counts, seed, prefix);
}

std::vector<TrialEntry> MakeTrials(const LabelList &labels, const TrialOptions &opts) {
  std::vector<TrialEntry> trials;
  const std::size_t n = labels.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (labels[a].second != labels[b].second) continue;
      trials.push_back({labels[a].first, labels[b].first, true});
      if (opts.ordered_pairs) trials.push_back({labels[b].first, labels[a].first, true});
    }
  }

  std::size_t nontarget_pairs = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (labels[a].second != labels[b].second && (opts.ordered_pairs || a < b)) {
        ++nontarget_pairs;
      }
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n == 0 ? 0 : n - 1);
  if (nontarget_pairs <= opts.max_nontargets) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (labels[a].second != labels[b].second && (opts.ordered_pairs || a < b)) {
          trials.push_back({labels[a].first, labels[b].first, false});
        }
      }
    }
    return trials;
  }
  std::set<std::pair<std::size_t, std::size_t>> chosen;
  while (chosen.size() < opts.max_nontargets) {
    std::size_t a = pick(rng), b = pick(rng);
    if (labels[a].second == labels[b].second) continue;
    if (!opts.ordered_pairs && a > b) std::swap(a, b);
    if (chosen.insert({a, b}).second) {
      trials.push_back({labels[a].first, labels[b].first, false});
    }
  }
  return trials;
}

EnrollMap SingletonEnrollMap(const LabelList &labels) {
  EnrollMap map;
  for (const auto &[seg, spk] : labels) map[seg] = {seg};
  return map;
}

}  // namespace psda
