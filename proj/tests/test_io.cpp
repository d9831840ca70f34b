// test_io.cpp

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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "psda/errors.hpp"
#include "psda/io.hpp"
#include "psda/scoring.hpp"
#include "psda/synth.hpp"

using namespace psda;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("psda_test_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string File(const std::string &name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream(path) << text;
}

std::string ReadText(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
std::string ErrorText(Fn fn) {
  try {
    fn();
  } catch (const std::exception &e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("embedding table rules") {
  EmbeddingTable t;
  t.Add("a", UnitVec::Canonical(3, 0));
  t.Add("b", UnitVec::Canonical(3, 1));
  CHECK(t.size() == 2);
  CHECK(t.dim() == 3);
  CHECK(t.Find("b")->coords() == UnitVec::Canonical(3, 1).coords());
  CHECK(t.Find("c") == nullptr);
  CHECK_THROWS_AS(t.Add("a", UnitVec::Canonical(3, 2)), DataError);
  CHECK_THROWS_AS(t.Add("c", UnitVec::Canonical(4, 2)), DimensionError);
}

TEST_CASE("small TSV file") {
  TempDir dir;
  const std::string path = dir.File("emb.tsv");
  WriteText(path, "x1\t1\t0\t0\nx2\t0\t0.6\t0.8\n");
  const EmbeddingTable t = LoadEmbeddings(path, EmbeddingFormat::kTsv);
  REQUIRE(t.size() == 2);
  CHECK(t.ids()[1] == "x2");
  CHECK(t.vectors()[1][2] == doctest::Approx(0.8).epsilon(1e-15));

  WriteText(path, "x1\t1\t0\t0\nbadrow\t0.9\t0\t0\n");
  const std::string msg = ErrorText([&] { LoadEmbeddings(path, EmbeddingFormat::kTsv); });
  CHECK(msg.find("badrow") != std::string::npos);
  CHECK_THROWS_AS(LoadEmbeddings(path, EmbeddingFormat::kTsv), DataError);

  WriteText(path, "x1\t1\t0\t0\nx1\t0\t1\t0\n");
  CHECK_THROWS_AS(LoadEmbeddings(path, EmbeddingFormat::kTsv), DataError);
  WriteText(path, "x1\t1\t0\t0\nx2\t0\t1\n");
  CHECK_THROWS_AS(LoadEmbeddings(path, EmbeddingFormat::kTsv), DimensionError);
  WriteText(path, "x1\t1\tzero\t0\n");
  CHECK(ErrorText([&] { LoadEmbeddings(path, EmbeddingFormat::kTsv); }).find(":1:") !=
        std::string::npos);
  CHECK_THROWS_AS(LoadEmbeddings(dir.File("missing.tsv"), EmbeddingFormat::kTsv), IoError);
  CHECK_THROWS_AS(ParseEmbeddingFormat("csv"), ParseError);
}

TEST_CASE("TSV and binary encodings load equal") {
  TempDir dir;
  const PsdaModel truth(30.0, 2.0, UnitVec::Canonical(16));
  const SynthData data = SynthDataset(truth, 20, 5, 11);
  SaveEmbeddings(data.table, dir.File("e.tsv"), EmbeddingFormat::kTsv);
  SaveEmbeddings(data.table, dir.File("e.bin"), EmbeddingFormat::kBin);
  const EmbeddingTable a = LoadEmbeddings(dir.File("e.tsv"), EmbeddingFormat::kTsv);
  const EmbeddingTable b = LoadEmbeddings(dir.File("e.bin"), EmbeddingFormat::kBin);
  REQUIRE(a.size() == data.table.size());
  REQUIRE(b.size() == data.table.size());
  CHECK(a.ids() == data.table.ids());
  CHECK(b.ids() == data.table.ids());
  double worst_cross = 0.0, worst_orig = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst_cross = std::max(worst_cross, (a.vectors()[k].coords() - b.vectors()[k].coords()).cwiseAbs().maxCoeff());
    worst_orig = std::max(worst_orig, (a.vectors()[k].coords() - data.table.vectors()[k].coords()).cwiseAbs().maxCoeff());
  }
  CHECK(worst_cross == 0.0);
  CHECK(worst_orig <= 1e-6);

  // Second save of the reloaded table is byte-identical.
  SaveEmbeddings(a, dir.File("again.tsv"), EmbeddingFormat::kTsv);
  CHECK(ReadText(dir.File("again.tsv")) == ReadText(dir.File("e.tsv")));
}

TEST_CASE("truncated binary file") {
  TempDir dir;
  EmbeddingTable t;
  t.Add("only", UnitVec::Canonical(4, 1));
  SaveEmbeddings(t, dir.File("e.bin"), EmbeddingFormat::kBin);
  const std::string bytes = ReadText(dir.File("e.bin"));
  WriteText(dir.File("cut.bin"), bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(LoadEmbeddings(dir.File("cut.bin"), EmbeddingFormat::kBin), ParseError);
  WriteText(dir.File("tsv.bin"), "x\t1\t0\n");
  CHECK_THROWS_AS(LoadEmbeddings(dir.File("tsv.bin"), EmbeddingFormat::kBin), ParseError);
}

TEST_CASE("trial lists") {
  TempDir dir;
  const std::string path = dir.File("trials");
  WriteText(path, "spk1 seg9 tar\nspk1 seg8\nspk2   seg9\tnon\n");
  const auto trials = LoadTrials(path);
  REQUIRE(trials.size() == 3);
  CHECK(trials[0].enroll_id == "spk1");
  CHECK(trials[0].test_id == "seg9");
  CHECK(trials[0].is_target == true);
  CHECK(!trials[1].is_target.has_value());
  CHECK(trials[2].is_target == false);

  SaveTrials(trials, dir.File("copy"));
  CHECK(ReadText(dir.File("copy")) == "spk1 seg9 tar\nspk1 seg8\nspk2 seg9 non\n");

  WriteText(path, "spk1 seg9 tar\nspk1 seg9 tar extra\n");
  CHECK_THROWS_AS(LoadTrials(path), ParseError);
  CHECK(ErrorText([&] { LoadTrials(path); }).find(":2:") != std::string::npos);
  WriteText(path, "spk1 seg9 maybe\n");
  CHECK_THROWS_AS(LoadTrials(path), ParseError);
}

TEST_CASE("enrollment maps") {
  TempDir dir;
  const std::string path = dir.File("enroll");
  WriteText(path, "spkA s1 s2 s3\nspkB s4\n");
  const EnrollMap map = LoadEnrollMap(path);
  REQUIRE(map.size() == 2);
  CHECK(map.at("spkA") == std::vector<std::string>{"s1", "s2", "s3"});

  WriteText(path, "spkA s1\nspkA s2\n");
  CHECK_THROWS_AS(LoadEnrollMap(path), ParseError);
  WriteText(path, "spkA\n");
  CHECK_THROWS_AS(LoadEnrollMap(path), ParseError);

  // Summing mapped segments matches hand-built statistics.
  EmbeddingTable t;
  const auto xs = Sample(VmfParams(UnitVec::Canonical(5), 2.0), 4, 3);
  for (int k = 0; k < 4; ++k) t.Add("s" + std::to_string(k + 1), xs[k]);
  const std::vector<std::string> segs = {"s1", "s2", "s3"};
  const SideStats summed = SumSegments(t, segs);
  const SideStats by_hand = SideStats::FromVectors(std::span(xs).first(3));
  CHECK(summed.n() == 3);
  const PsdaModel m(10.0, 1.0, UnitVec::Canonical(5));
  CHECK(LlrScore(m, summed, SideStats::Single(xs[3])) ==
        doctest::Approx(LlrScore(m, by_hand, SideStats::Single(xs[3]))).epsilon(1e-14));
  const std::vector<std::string> unknown = {"s1", "s9"};
  CHECK_THROWS_AS(SumSegments(t, unknown), DataError);
}

TEST_CASE("labels and grouping") {
  TempDir dir;
  EmbeddingTable t;
  t.Add("a1", UnitVec::Canonical(3, 0));
  t.Add("a2", UnitVec::Canonical(3, 1));
  t.Add("b1", UnitVec::Canonical(3, 2));
  const LabelList labels = {{"b1", "bob"}, {"a1", "alice"}, {"a2", "alice"}};
  SaveLabels(labels, dir.File("labels"));
  CHECK(LoadLabels(dir.File("labels")) == labels);
  const SpeakerStats g = GroupBySpeaker(t, labels);
  CHECK(g.speaker_ids == std::vector<std::string>{"alice", "bob"});
  CHECK(g.stats[0].n() == 2);
  CHECK(g.observations == 3);
  const LabelList unknown = {{"zz", "bob"}};
  CHECK_THROWS_AS(GroupBySpeaker(t, unknown), DataError);
}

TEST_CASE("model files round trip exactly") {
  TempDir dir;
  const auto mu = Sample(VmfParams(UnitVec::Canonical(7), 0.0), 1, 8).front();
  const ModelFile file{PsdaModel(47.123456789012345, 3.0000000000000004, mu), {kToolVersion, 12, 345}};
  SaveModel(file, dir.File("m"));
  const ModelFile back = LoadModel(dir.File("m"));
  CHECK(back.model.w() == file.model.w());
  CHECK(back.model.b() == file.model.b());
  CHECK(back.model.mu().coords() == mu.coords());
  CHECK(back.metadata.speakers == 12);
  CHECK(back.metadata.observations == 345);
  CHECK(back.metadata.tool_version == kToolVersion);

  const std::string text = ReadText(dir.File("m"));
  WriteText(dir.File("bad"), text + "w 1\n");
  CHECK_THROWS_AS(LoadModel(dir.File("bad")), ParseError);
  std::string other = text;
  other.replace(other.find("psda-1"), 6, "psda-9");
  WriteText(dir.File("bad"), other);
  CHECK_THROWS_AS(LoadModel(dir.File("bad")), ParseError);
}

TEST_CASE("score files") {
  TempDir dir;
  const std::vector<ScoreLine> scores = {{"e1", "t1", 1.0 / 3.0}, {"e2", "t1", -12345.678901234}};
  SaveScores(scores, dir.File("s"));
  CHECK(ReadText(dir.File("s")) == "e1 t1 0.333333333\ne2 t1 -12345.6789\n");
  const auto back = LoadScores(dir.File("s"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].first.llr == 0.333333333);
  CHECK(!back[0].second.has_value());
  WriteText(dir.File("s"), "e1 t1 0.5 tar\ne1 t2 -1 non\n");
  const auto labeled = LoadScores(dir.File("s"));
  CHECK(labeled[0].second == true);
  CHECK(labeled[1].second == false);
  WriteText(dir.File("s"), "e1 t1 nan\n");
  CHECK_THROWS_AS(LoadScores(dir.File("s")), ParseError);
}

TEST_CASE("atomic writes leave no temporary behind") {
  TempDir dir;
  AtomicWrite(dir.File("out"), "hello\n");
  AtomicWrite(dir.File("out"), "world\n");
  CHECK(ReadText(dir.File("out")) == "world\n");
  CHECK(!fs::exists(dir.File("out") + ".tmp"));
  CHECK_THROWS_AS(AtomicWrite(dir.File("no/such/dir/out"), "x"), IoError);
}

TEST_CASE("synthetic trials") {
  const PsdaModel truth(20.0, 1.0, UnitVec::Canonical(4));
  const SynthData d = SynthDataset(truth, 5, 3, 1, "p");
  CHECK(d.table.ids()[0] == "ps0_0");
  CHECK(d.labels[4].second == "ps1");
  const auto unordered = MakeTrials(d.labels, {false, 1000, 2});
  std::size_t targets = 0;
  for (const auto &t : unordered) targets += t.is_target == true;
  CHECK(targets == 5 * 3);
  CHECK(unordered.size() - targets == (15 * 14 / 2) - 15);
  const auto ordered = MakeTrials(d.labels, {true, 20, 2});
  targets = 0;
  for (const auto &t : ordered) targets += t.is_target == true;
  CHECK(targets == 30);
  CHECK(ordered.size() == 50);
  CHECK(SingletonEnrollMap(d.labels).at("ps2_1") == std::vector<std::string>{"ps2_1"});
}
