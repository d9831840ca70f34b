// psda/synth.hpp

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

#ifndef PSDA_SYNTH_HPP_
#define PSDA_SYNTH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psda/io.hpp"
#include "psda/psda_model.hpp"

namespace psda {

struct SynthData {
  EmbeddingTable table;
  LabelList labels;  // (segment, speaker), in generation order
};

/// Draws each speaker's direction z from VMF(mu, b), then that speaker's
/// embeddings from VMF(z, w). Segment ids are "<prefix>s<i>_<j>", speaker ids
/// "<prefix>s<i>". Deterministic in seed.
SynthData SynthDataset(const PsdaModel &truth, std::span<const int> per_speaker,
                       std::uint64_t seed, const std::string &prefix = "");
SynthData SynthDataset(const PsdaModel &truth, int speakers, int per_speaker,
                       std::uint64_t seed, const std::string &prefix = "");

struct TrialOptions {
  /// Include both (a, b) and (b, a) as trials.
  bool ordered_pairs = false;
  /// Non-target pairs are sampled uniformly down to this many.
  std::size_t max_nontargets = 100000;
  std::uint64_t seed = 0;
};

/// Labeled single-segment trials: every same-speaker pair plus sampled
/// different-speaker pairs. Targets come first.
std::vector<TrialEntry> MakeTrials(const LabelList &labels, const TrialOptions &opts);

/// Enroll map with one model per segment, keyed by the segment id.
EnrollMap SingletonEnrollMap(const LabelList &labels);

}  // namespace psda

#endif  // PSDA_SYNTH_HPP_
