// io.cpp

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

#include "psda/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "psda/errors.hpp"

namespace psda {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary embedding I/O assumes a little-endian host");

constexpr std::array<char, 8> kEmbMagic = {'P', 'S', 'D', 'A', 'E', 'M', 'B', '1'};

std::string Where(const std::string &path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> SplitWhitespace(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool ParseDouble(const std::string &tok, double &out) {
  const char *first = tok.data();
  const char *last = first + tok.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

template <typename Int>
bool ParseInt(const std::string &tok, Int &out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::string FormatDouble(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::ifstream OpenForRead(const std::string &path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

// Reads non-blank lines, handing (line number, line) to fn. Strips '\r'.
template <typename Fn>
void ForEachLine(const std::string &path, Fn fn) {
  std::ifstream in = OpenForRead(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(lineno, line);
  }
  if (in.bad()) throw IoError("read error on " + path);
}

std::optional<bool> ParseLabel(const std::string &tok, const std::string &where) {
  if (tok == "tar") return true;
  if (tok == "non") return false;
  throw ParseError(where + "label must be 'tar' or 'non', got '" + tok + "'");
}

UnitVec CheckedUnitVec(Eigen::VectorXd v, const std::string &where,
                       const std::string &id) {
  try {
    return UnitVec::FromVector(std::move(v));
  } catch (const DataError &e) {
    throw DataError(where + "embedding '" + id + "': " + e.what());
  }
}

template <typename T>
void PutLe(std::string &buf, T v) {
  const auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  buf.append(bytes.data(), bytes.size());
}

template <typename T>
T GetLe(std::istream &in, const std::string &path) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) {
    throw ParseError(path + ": truncated binary embedding file at offset " +
                     std::to_string(static_cast<long long>(in.tellg())));
  }
  return std::bit_cast<T>(bytes);
}

EmbeddingTable LoadEmbeddingsTsv(const std::string &path) {
  EmbeddingTable table;
  bool first = true;
  ForEachLine(path, [&](std::size_t lineno, const std::string &line) {
    const std::string where = Where(path, lineno);
    const std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() < 3 || fields[0].empty()) {
      throw ParseError(where + "expected id<TAB>v1<TAB>...<TAB>vd");
    }
    const int dim = static_cast<int>(fields.size()) - 1;
    if (first) {
      table = EmbeddingTable(dim);
      first = false;
    } else if (dim != table.dim()) {
      throw DimensionError(where + "embedding '" + fields[0] + "' has dimension " +
                           std::to_string(dim) + ", expected " +
                           std::to_string(table.dim()));
    }
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
      if (!ParseDouble(fields[i + 1], v[i])) {
        throw ParseError(where + "bad number '" + fields[i + 1] + "'");
      }
    }
    UnitVec u = CheckedUnitVec(std::move(v), where, fields[0]);
    try {
      table.Add(fields[0], std::move(u));
    } catch (const DataError &e) {
      throw DataError(where + e.what());
    }
  });
  if (first) throw ParseError(path + ": no embeddings found");
  return table;
}

EmbeddingTable LoadEmbeddingsBin(const std::string &path) {
  std::ifstream in = OpenForRead(path, true);
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kEmbMagic) {
    throw ParseError(path + ": missing PSDAEMB1 header at offset 0");
  }
  const auto dim = GetLe<std::uint32_t>(in, path);
  const auto count = GetLe<std::uint64_t>(in, path);
  if (dim < 2) throw DimensionError(path + ": dimension must be >= 2");
  EmbeddingTable table(static_cast<int>(dim));
  std::vector<float> buf(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    const std::string where =
        path + ": record " + std::to_string(r) + " at offset " +
        std::to_string(static_cast<long long>(in.tellg())) + ": ";
    const auto len = GetLe<std::uint16_t>(in, path);
    std::string id(len, '\0');
    if (!in.read(id.data(), len)) throw ParseError(where + "truncated id");
    if (!in.read(reinterpret_cast<char *>(buf.data()),
                 static_cast<std::streamsize>(dim * sizeof(float)))) {
      throw ParseError(where + "truncated vector");
    }
    Eigen::VectorXd v(dim);
    for (std::uint32_t i = 0; i < dim; ++i) v[i] = buf[i];
    try {
      table.Add(id, CheckedUnitVec(std::move(v), "", id));
    } catch (const DataError &e) {
      throw DataError(where + e.what());
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(path + ": trailing bytes after " + std::to_string(count) +
                     " records");
  }
  return table;
}

}  // namespace

EmbeddingFormat ParseEmbeddingFormat(const std::string &name) {
  if (name == "tsv") return EmbeddingFormat::kTsv;
  if (name == "bin") return EmbeddingFormat::kBin;
  throw ParseError("unknown embedding format '" + name + "' (expected tsv or bin)");
}

void EmbeddingTable::Add(std::string id, UnitVec v) {
  if (dim_ == 0) dim_ = v.dim();
  if (v.dim() != dim_) {
    throw DimensionError("embedding '" + id + "' has dimension " +
                         std::to_string(v.dim()) + ", expected " +
                         std::to_string(dim_));
  }
  if (index_.count(id)) throw DataError("duplicate embedding id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  vectors_.push_back(std::move(v));
}

const UnitVec *EmbeddingTable::Find(const std::string &id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

EmbeddingTable LoadEmbeddings(const std::string &path, EmbeddingFormat format) {
  return format == EmbeddingFormat::kTsv ? LoadEmbeddingsTsv(path)
                                         : LoadEmbeddingsBin(path);
}

void SaveEmbeddings(const EmbeddingTable &table, const std::string &path,
                    EmbeddingFormat format) {
  std::string out;
  if (format == EmbeddingFormat::kTsv) {
    for (std::size_t r = 0; r < table.size(); ++r) {
      out += table.ids()[r];
      for (int i = 0; i < table.dim(); ++i) {
        out += '\t';
        // The float32 value, printed exactly, so both encodings agree.
        out += FormatDouble(static_cast<float>(table.vectors()[r][i]), 17);
      }
      out += '\n';
    }
  } else {
    out.append(kEmbMagic.data(), kEmbMagic.size());
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(table.dim()));
    PutLe<std::uint64_t>(out, table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
      const std::string &id = table.ids()[r];
      if (id.size() > 0xffff) throw DataError("embedding id too long: " + id);
      PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
      out += id;
      for (int i = 0; i < table.dim(); ++i) {
        PutLe<float>(out, static_cast<float>(table.vectors()[r][i]));
      }
    }
  }
  AtomicWrite(path, out);
}

std::vector<TrialEntry> LoadTrials(const std::string &path) {
  std::vector<TrialEntry> trials;
  ForEachLine(path, [&](std::size_t lineno, const std::string &line) {
    const std::vector<std::string> tok = SplitWhitespace(line);
    const std::string where = Where(path, lineno);
    if (tok.size() != 2 && tok.size() != 3) {
      throw ParseError(where + "expected 'enroll_id test_id [tar|non]', got " +
                       std::to_string(tok.size()) + " tokens");
    }
    TrialEntry t{tok[0], tok[1], std::nullopt};
    if (tok.size() == 3) t.is_target = ParseLabel(tok[2], where);
    trials.push_back(std::move(t));
  });
  return trials;
}

void SaveTrials(std::span<const TrialEntry> trials, const std::string &path) {
  std::string out;
  for (const TrialEntry &t : trials) {
    out += t.enroll_id + ' ' + t.test_id;
    if (t.is_target) out += *t.is_target ? " tar" : " non";
    out += '\n';
  }
  AtomicWrite(path, out);
}

EnrollMap LoadEnrollMap(const std::string &path) {
  EnrollMap map;
  ForEachLine(path, [&](std::size_t lineno, const std::string &line) {
    std::vector<std::string> tok = SplitWhitespace(line);
    const std::string where = Where(path, lineno);
    if (tok.size() < 2) {
      throw ParseError(where + "model '" + tok[0] + "' has no segments");
    }
    std::vector<std::string> segs(tok.begin() + 1, tok.end());
    if (!map.emplace(tok[0], std::move(segs)).second) {
      throw ParseError(where + "duplicate model id '" + tok[0] + "'");
    }
  });
  return map;
}

void SaveEnrollMap(const EnrollMap &map, const std::string &path) {
  std::string out;
  for (const auto &[model, segs] : map) {
    out += model;
    for (const std::string &s : segs) out += ' ' + s;
    out += '\n';
  }
  AtomicWrite(path, out);
}

LabelList LoadLabels(const std::string &path) {
  LabelList labels;
  ForEachLine(path, [&](std::size_t lineno, const std::string &line) {
    const std::vector<std::string> tok = SplitTabs(line);
    if (tok.size() != 2 || tok[0].empty() || tok[1].empty()) {
      throw ParseError(Where(path, lineno) + "expected segment_id<TAB>speaker_id");
    }
    labels.emplace_back(tok[0], tok[1]);
  });
  return labels;
}

void SaveLabels(const LabelList &labels, const std::string &path) {
  std::string out;
  for (const auto &[seg, spk] : labels) out += seg + '\t' + spk + '\n';
  AtomicWrite(path, out);
}

SpeakerStats GroupBySpeaker(const EmbeddingTable &table, const LabelList &labels) {
  std::map<std::string, std::vector<const UnitVec *>> by_speaker;
  std::set<std::string> seen;
  for (const auto &[seg, spk] : labels) {
    const UnitVec *v = table.Find(seg);
    if (v == nullptr) throw DataError("labeled segment '" + seg + "' has no embedding");
    if (!seen.insert(seg).second) {
      throw DataError("segment '" + seg + "' is labeled more than once");
    }
    by_speaker[spk].push_back(v);
  }
  SpeakerStats out;
  for (const auto &[spk, vecs] : by_speaker) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
    for (const UnitVec *v : vecs) sum += v->coords();
    out.speaker_ids.push_back(spk);
    out.stats.emplace_back(static_cast<std::int64_t>(vecs.size()), std::move(sum));
    out.observations += static_cast<std::int64_t>(vecs.size());
  }
  return out;
}

SideStats SumSegments(const EmbeddingTable &table,
                      std::span<const std::string> segment_ids) {
  if (segment_ids.empty()) throw DataError("a trial side needs at least one segment");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
  for (const std::string &seg : segment_ids) {
    const UnitVec *v = table.Find(seg);
    if (v == nullptr) throw DataError("unknown segment id '" + seg + "'");
    sum += v->coords();
  }
  return SideStats(static_cast<std::int64_t>(segment_ids.size()), std::move(sum));
}

void SaveModel(const ModelFile &file, const std::string &path) {
  const PsdaModel &m = file.model;
  std::string out;
  out += std::string("format ") + kModelFormatTag + '\n';
  out += "dim " + std::to_string(m.dim()) + '\n';
  out += "w " + FormatDouble(m.w(), 17) + '\n';
  out += "b " + FormatDouble(m.b(), 17) + '\n';
  out += "mu";
  for (int i = 0; i < m.dim(); ++i) out += ' ' + FormatDouble(m.mu()[i], 17);
  out += '\n';
  out += "tool_version " + file.metadata.tool_version + '\n';
  out += "speakers " + std::to_string(file.metadata.speakers) + '\n';
  out += "observations " + std::to_string(file.metadata.observations) + '\n';
  AtomicWrite(path, out);
}

ModelFile LoadModel(const std::string &path) {
  std::map<std::string, std::pair<std::size_t, std::vector<std::string>>> kv;
  ForEachLine(path, [&](std::size_t lineno, const std::string &line) {
    std::vector<std::string> tok = SplitWhitespace(line);
    const std::string key = tok[0];
    tok.erase(tok.begin());
    if (!kv.emplace(key, std::make_pair(lineno, std::move(tok))).second) {
      throw ParseError(Where(path, lineno) + "duplicate key '" + key + "'");
    }
  });
  auto get = [&](const std::string &key) -> const std::vector<std::string> & {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(path + ": missing key '" + key + "'");
    return it->second.second;
  };
  auto scalar = [&](const std::string &key) -> const std::string & {
    const std::vector<std::string> &v = get(key);
    if (v.size() != 1) {
      throw ParseError(Where(path, kv[key].first) + "key '" + key +
                       "' takes one value");
    }
    return v[0];
  };
  if (scalar("format") != kModelFormatTag) {
    throw ParseError(path + ": unsupported model format '" + scalar("format") + "'");
  }
  int dim = 0;
  double w = 0.0, b = 0.0;
  if (!ParseInt(scalar("dim"), dim) || dim < 2) {
    throw ParseError(path + ": bad dim '" + scalar("dim") + "'");
  }
  if (!ParseDouble(scalar("w"), w)) throw ParseError(path + ": bad w");
  if (!ParseDouble(scalar("b"), b)) throw ParseError(path + ": bad b");
  const std::vector<std::string> &mu_tok = get("mu");
  if (static_cast<int>(mu_tok.size()) != dim) {
    throw DimensionError(path + ": mu has " + std::to_string(mu_tok.size()) +
                         " entries, dim is " + std::to_string(dim));
  }
  Eigen::VectorXd mu(dim);
  for (int i = 0; i < dim; ++i) {
    if (!ParseDouble(mu_tok[i], mu[i])) throw ParseError(path + ": bad mu entry");
  }
  ModelMetadata meta;
  if (kv.count("tool_version")) meta.tool_version = scalar("tool_version");
  if (kv.count("speakers") && !ParseInt(scalar("speakers"), meta.speakers)) {
    throw ParseError(path + ": bad speakers count");
  }
  if (kv.count("observations") && !ParseInt(scalar("observations"), meta.observations)) {
    throw ParseError(path + ": bad observations count");
  }
  return ModelFile{PsdaModel(w, b, CheckedUnitVec(std::move(mu), path + ": ", "mu")),
                   meta};
}

void SaveScores(std::span<const ScoreLine> scores, const std::string &path) {
  std::string out;
  for (const ScoreLine &s : scores) {
    out += s.enroll_id + ' ' + s.test_id + ' ' + FormatDouble(s.llr, 9) + '\n';
  }
  AtomicWrite(path, out);
}

std::vector<std::pair<ScoreLine, std::optional<bool>>> LoadScores(
    const std::string &path) {
  std::vector<std::pair<ScoreLine, std::optional<bool>>> out;
  ForEachLine(path, [&](std::size_t lineno, const std::string &line) {
    const std::vector<std::string> tok = SplitWhitespace(line);
    const std::string where = Where(path, lineno);
    if (tok.size() != 3 && tok.size() != 4) {
      throw ParseError(where + "expected 'enroll_id test_id score [tar|non]'");
    }
    ScoreLine s{tok[0], tok[1], 0.0};
    if (!ParseDouble(tok[2], s.llr) || !std::isfinite(s.llr)) {
      throw ParseError(where + "bad score '" + tok[2] + "'");
    }
    std::optional<bool> label;
    if (tok.size() == 4) label = ParseLabel(tok[3], where);
    out.emplace_back(std::move(s), label);
  });
  return out;
}

void SaveDetPoints(std::span<const DetPoint> points, const std::string &path) {
  std::string out;
  for (const DetPoint &p : points) {
    out += FormatDouble(p.p_miss, 17) + ' ' + FormatDouble(p.p_fa, 17) + '\n';
  }
  AtomicWrite(path, out);
}

void AtomicWrite(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path);
  }
}

}  // namespace psda
