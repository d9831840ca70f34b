// psda/io.hpp

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

#ifndef PSDA_IO_HPP_
#define PSDA_IO_HPP_

// File formats.
//
// Embeddings, TSV:   id<TAB>v1<TAB>...<TAB>vd, one per line (UTF-8).
// Embeddings, bin:   "PSDAEMB1", u32 dim, u64 count, then per record
//                    u16 id byte length, id bytes, dim x f32. Little endian.
//                    Writers store float32 coordinates in both encodings (TSV
//                    prints the float value exactly), so the two load equal.
// Labels:            segment_id<TAB>speaker_id
// Trials:            enroll_id test_id [tar|non]   (whitespace separated)
// Enroll map:        model_id seg_1 ... seg_m      (m >= 1)
// Scores:            enroll_id test_id llr         (9 significant digits)
// DET points:        p_miss p_fa
// Model:             "key value" lines, see SaveModel.
//
// Every writer goes through a temporary file that is renamed into place.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psda/metrics.hpp"
#include "psda/psda_model.hpp"
#include "psda/vmf.hpp"

namespace psda {

inline constexpr const char *kModelFormatTag = "psda-1";
inline constexpr const char *kToolVersion = "1.0.0";

enum class EmbeddingFormat { kTsv, kBin };

EmbeddingFormat ParseEmbeddingFormat(const std::string &name);

/// Embeddings keyed by unique string ids, all of one dimension.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim) {}

  /// Throws DataError on a duplicate id, DimensionError on a dimension
  /// mismatch.
  void Add(std::string id, UnitVec v);

  std::size_t size() const { return ids_.size(); }
  int dim() const { return dim_; }
  const std::vector<std::string> &ids() const { return ids_; }
  const std::vector<UnitVec> &vectors() const { return vectors_; }
  /// nullptr when absent.
  const UnitVec *Find(const std::string &id) const;

 private:
  int dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<UnitVec> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingTable LoadEmbeddings(const std::string &path, EmbeddingFormat format);
void SaveEmbeddings(const EmbeddingTable &table, const std::string &path,
                    EmbeddingFormat format);

struct TrialEntry {
  std::string enroll_id;
  std::string test_id;
  std::optional<bool> is_target;
};

std::vector<TrialEntry> LoadTrials(const std::string &path);
void SaveTrials(std::span<const TrialEntry> trials, const std::string &path);

/// Model id -> segment ids, in file order of the segments.
using EnrollMap = std::map<std::string, std::vector<std::string>>;

EnrollMap LoadEnrollMap(const std::string &path);
void SaveEnrollMap(const EnrollMap &map, const std::string &path);

/// (segment id, speaker id) pairs.
using LabelList = std::vector<std::pair<std::string, std::string>>;

LabelList LoadLabels(const std::string &path);
void SaveLabels(const LabelList &labels, const std::string &path);

/// Per-speaker statistics, speakers ordered by id.
struct SpeakerStats {
  std::vector<std::string> speaker_ids;
  std::vector<SideStats> stats;
  std::int64_t observations = 0;
};

/// Groups labeled embeddings by speaker. Unknown segments are DataErrors.
SpeakerStats GroupBySpeaker(const EmbeddingTable &table, const LabelList &labels);

/// Statistics of one side built by summing the mapped segments.
SideStats SumSegments(const EmbeddingTable &table,
                      std::span<const std::string> segment_ids);

struct ModelMetadata {
  std::string tool_version = kToolVersion;
  std::int64_t speakers = 0;
  std::int64_t observations = 0;
};

struct ModelFile {
  PsdaModel model;
  ModelMetadata metadata;
};

/// Writes w, b and mu with 17 significant digits, so they reload exactly.
void SaveModel(const ModelFile &file, const std::string &path);
ModelFile LoadModel(const std::string &path);

struct ScoreLine {
  std::string enroll_id;
  std::string test_id;
  double llr;
};

void SaveScores(std::span<const ScoreLine> scores, const std::string &path);
/// Accepts an optional fourth label column (tar|non).
std::vector<std::pair<ScoreLine, std::optional<bool>>> LoadScores(
    const std::string &path);

void SaveDetPoints(std::span<const DetPoint> points, const std::string &path);

/// Writes content to path via a temporary file and rename.
void AtomicWrite(const std::string &path, const std::string &content);

}  // namespace psda

#endif  // PSDA_IO_HPP_
