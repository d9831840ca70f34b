// cli.cpp

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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "psda/errors.hpp"
#include "psda/io.hpp"
#include "psda/metrics.hpp"
#include "psda/psda_model.hpp"
#include "psda/scoring.hpp"
#include "psda/sphere_math.hpp"
#include "psda/synth.hpp"

namespace psda::cli {

namespace {

// Enrollment models scored per block; bounds the score matrix held in memory.
constexpr std::size_t kEnrollBlock = 256;

std::string Num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string embeddings;
  std::string format = "tsv";
  std::string labels;
  std::string out;
  bool b_zero = false;
  int max_iters = 100;
  double rel_tol = 1e-8;
  int threads = 1;
};

void RunTrain(const TrainArgs &a, std::ostream &out, std::ostream &err) {
  const EmbeddingTable table = LoadEmbeddings(a.embeddings, ParseEmbeddingFormat(a.format));
  const SpeakerStats speakers = GroupBySpeaker(table, LoadLabels(a.labels));
  EmOptions opts;
  opts.max_iters = a.max_iters;
  opts.rel_tol = a.rel_tol;
  opts.freeze_b_zero = a.b_zero;
  opts.threads = a.threads;
  const EmResult r = EmTrain(speakers.stats, opts);
  if (r.w_clamped) {
    err << "psda train: warning: within-speaker statistic was not positive; w clamped\n";
  }
  ModelMetadata meta;
  meta.speakers = static_cast<std::int64_t>(speakers.stats.size());
  meta.observations = speakers.observations;
  SaveModel({r.model, meta}, a.out);

  out << "speakers " << meta.speakers << '\n'
      << "observations " << meta.observations << '\n'
      << "iterations " << r.iterations << '\n'
      << "converged " << (r.converged ? "yes" : "no") << '\n'
      << "loglik " << Num(r.loglik_trace.back(), 17) << '\n'
      << "w " << Num(r.model.w(), 17) << '\n'
      << "b " << Num(r.model.b(), 17) << '\n';
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string model;
  std::string embeddings;
  std::string format = "tsv";
  std::string trials;
  std::string enroll;
  std::string out;
  bool cosine = false;
  int threads = 1;
};

// Indexes distinct ids in order of first appearance.
class IdIndex {
 public:
  std::size_t Add(const std::string &id) {
    auto [it, inserted] = index_.try_emplace(id, ids_.size());
    if (inserted) ids_.push_back(id);
    return it->second;
  }
  const std::vector<std::string> &ids() const { return ids_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> ids_;
};

// Scores every trial through block matrices. block(e, t) returns the matrix
// for enroll indices e and test indices t. Trials are grouped by enrollment
// model so that each block covers a bounded number of rows.
template <typename BlockFn>
std::vector<double> ScoreBlocked(std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                 std::size_t enroll_count, BlockFn block) {
  std::vector<std::vector<std::size_t>> by_enroll(enroll_count);
  for (std::size_t k = 0; k < pairs.size(); ++k) by_enroll[pairs[k].first].push_back(k);

  std::vector<double> scores(pairs.size());
  for (std::size_t first = 0; first < enroll_count; first += kEnrollBlock) {
    const std::size_t last = std::min(enroll_count, first + kEnrollBlock);
    std::vector<std::size_t> enrolls;
    std::vector<std::size_t> tests;
    for (std::size_t e = first; e < last; ++e) {
      enrolls.push_back(e);
      for (std::size_t k : by_enroll[e]) tests.push_back(pairs[k].second);
    }
    std::sort(tests.begin(), tests.end());
    tests.erase(std::unique(tests.begin(), tests.end()), tests.end());
    const Eigen::MatrixXd m = block(enrolls, tests);
    for (std::size_t e = first; e < last; ++e) {
      for (std::size_t k : by_enroll[e]) {
        const auto col = std::lower_bound(tests.begin(), tests.end(), pairs[k].second);
        scores[k] = m(static_cast<Eigen::Index>(e - first), col - tests.begin());
      }
    }
  }
  return scores;
}

template <typename T>
std::vector<T> Pick(const std::vector<T> &all, const std::vector<std::size_t> &idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

void RunScore(const ScoreArgs &a, std::ostream &out) {
  const EmbeddingTable table = LoadEmbeddings(a.embeddings, ParseEmbeddingFormat(a.format));
  const std::vector<TrialEntry> trials = LoadTrials(a.trials);
  std::optional<EnrollMap> enroll_map;
  if (!a.enroll.empty()) enroll_map = LoadEnrollMap(a.enroll);

  IdIndex enroll_ids, test_ids;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(trials.size());
  for (const TrialEntry &t : trials) {
    pairs.emplace_back(enroll_ids.Add(t.enroll_id), test_ids.Add(t.test_id));
  }

  auto segments_of = [&](const std::string &id) -> std::vector<std::string> {
    if (!enroll_map) return {id};
    const auto it = enroll_map->find(id);
    if (it == enroll_map->end()) {
      throw DataError("enrollment model '" + id + "' is not in " + a.enroll);
    }
    return it->second;
  };
  auto vector_of = [&](const std::string &seg) -> const UnitVec & {
    const UnitVec *v = table.Find(seg);
    if (v == nullptr) throw DataError("unknown segment id '" + seg + "'");
    return *v;
  };

  std::vector<double> scores;
  if (a.cosine) {
    std::vector<UnitVec> enrolls, tests;
    for (const std::string &id : enroll_ids.ids()) {
      const std::vector<std::string> segs = segments_of(id);
      if (segs.size() != 1) {
        throw DataError("cosine scoring needs one segment per model; '" + id + "' has " +
                        std::to_string(segs.size()));
      }
      enrolls.push_back(vector_of(segs.front()));
    }
    for (const std::string &id : test_ids.ids()) tests.push_back(vector_of(id));
    scores = ScoreBlocked(pairs, enrolls.size(), [&](const auto &e, const auto &t) {
      return CosineMatrix(Pick(enrolls, e), Pick(tests, t), a.threads);
    });
  } else {
    const PsdaModel model = LoadModel(a.model).model;
    if (model.dim() != table.dim()) {
      throw DimensionError("model dimension " + std::to_string(model.dim()) +
                           " does not match embedding dimension " +
                           std::to_string(table.dim()));
    }
    std::vector<SideStats> enrolls, tests;
    for (const std::string &id : enroll_ids.ids()) {
      enrolls.push_back(SumSegments(table, segments_of(id)));
    }
    for (const std::string &id : test_ids.ids()) {
      tests.push_back(SideStats::Single(vector_of(id)));
    }
    scores = ScoreBlocked(pairs, enrolls.size(), [&](const auto &e, const auto &t) {
      return ScoreMatrix(model, Pick(enrolls, e), Pick(tests, t), a.threads);
    });
  }

  std::vector<ScoreLine> lines;
  lines.reserve(trials.size());
  for (std::size_t k = 0; k < trials.size(); ++k) {
    lines.push_back({trials[k].enroll_id, trials[k].test_id, scores[k]});
  }
  SaveScores(lines, a.out);
  out << "scored " << lines.size() << " trials\n";
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string scores;
  std::string trials;
  std::string det;
  double p_tar = 0.05;
};

void RunEval(const EvalArgs &a, std::ostream &out) {
  const auto scored = LoadScores(a.scores);
  std::map<std::pair<std::string, std::string>, bool> key;
  if (!a.trials.empty()) {
    for (const TrialEntry &t : LoadTrials(a.trials)) {
      if (t.is_target) key[{t.enroll_id, t.test_id}] = *t.is_target;
    }
  }
  LabeledScores s;
  for (const auto &[line, label] : scored) {
    std::optional<bool> is_target = label;
    if (!is_target) {
      const auto it = key.find({line.enroll_id, line.test_id});
      if (it == key.end()) {
        throw DataError("no label for trial '" + line.enroll_id + " " + line.test_id + "'");
      }
      is_target = it->second;
    }
    (*is_target ? s.targets : s.nontargets).push_back(line.llr);
  }
  const double eer = Eer(s);
  const double dcf = MinDcf(s, a.p_tar);
  if (!a.det.empty()) SaveDetPoints(DetPoints(s), a.det);
  out << "targets " << s.targets.size() << '\n'
      << "nontargets " << s.nontargets.size() << '\n'
      << "eer_percent " << Fixed(100.0 * eer, 6) << '\n'
      << "eer_staircase_percent " << Fixed(100.0 * EerStaircase(s), 6) << '\n'
      << "min_dcf " << Fixed(dcf, 6) << '\n'
      << "p_tar " << Num(a.p_tar, 6) << '\n';
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_dir;
  std::string truth;
  int dim = 16;
  double w = 50.0;
  double b = 0.0;
  int speakers = 100;
  int per_speaker = 10;
  std::uint64_t seed = 0;
  std::string format = "tsv";
  std::string prefix;
  std::size_t max_nontargets = 100000;
  bool ordered_pairs = false;
};

void RunSynth(const SynthArgs &a, std::ostream &out) {
  const EmbeddingFormat format = ParseEmbeddingFormat(a.format);
  std::optional<PsdaModel> truth;
  if (!a.truth.empty()) {
    truth = LoadModel(a.truth).model;
  } else {
    // mu gets its own stream so that it does not shift the data draws.
    const UnitVec mu =
        Sample(VmfParams(UnitVec::Canonical(a.dim), 0.0), 1, a.seed ^ 0x6d75ULL).front();
    truth = PsdaModel(a.w, a.b, mu);
  }
  const SynthData data = SynthDataset(*truth, a.speakers, a.per_speaker, a.seed, a.prefix);
  TrialOptions topts;
  topts.ordered_pairs = a.ordered_pairs;
  topts.max_nontargets = a.max_nontargets;
  topts.seed = a.seed + 1;
  const std::vector<TrialEntry> trials = MakeTrials(data.labels, topts);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create directory " + a.out_dir + ": " + ec.message());
  const fs::path dir(a.out_dir);
  const std::string emb_name = a.format == "bin" ? "embeddings.bin" : "embeddings.tsv";
  SaveEmbeddings(data.table, (dir / emb_name).string(), format);
  SaveLabels(data.labels, (dir / "labels.tsv").string());
  SaveEnrollMap(SingletonEnrollMap(data.labels), (dir / "enroll.map").string());
  SaveTrials(trials, (dir / "trials.txt").string());
  ModelMetadata meta;
  meta.speakers = a.speakers;
  meta.observations = static_cast<std::int64_t>(data.table.size());
  SaveModel({*truth, meta}, (dir / "truth.model").string());

  std::size_t targets = 0;
  for (const TrialEntry &t : trials) targets += t.is_target.value_or(false);
  out << "segments " << data.table.size() << '\n'
      << "speakers " << a.speakers << '\n'
      << "target_trials " << targets << '\n'
      << "nontarget_trials " << trials.size() - targets << '\n';
}

// ---------------------------------------------------------------- info

void RunInfo(const std::string &path, std::ostream &out) {
  const ModelFile f = LoadModel(path);
  const PsdaModel &m = f.model;
  out << "format " << kModelFormatTag << '\n'
      << "dim " << m.dim() << '\n'
      << "w " << Num(m.w(), 17) << '\n'
      << "b " << Num(m.b(), 17) << '\n'
      << "mu";
  const int shown = std::min(m.dim(), 8);
  for (int i = 0; i < shown; ++i) out << ' ' << Num(m.mu()[i], 6);
  if (shown < m.dim()) out << " ...";
  out << '\n'
      << "within_mean_cosine " << Num(Rho(m.order(), m.w()), 6) << '\n'
      << "between_mean_cosine " << Num(Rho(m.order(), m.b()), 6) << '\n'
      << "speakers " << f.metadata.speakers << '\n'
      << "observations " << f.metadata.observations << '\n'
      << "tool_version " << f.metadata.tool_version << '\n';
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spherical speaker embedding backend: train, score and evaluate.", "psda"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  TrainArgs train;
  auto *c_train = app.add_subcommand("train", "fit a model to labeled embeddings");
  c_train->add_option("--embeddings", train.embeddings, "embedding file")->required();
  c_train->add_option("--format", train.format, "tsv or bin")
      ->check(CLI::IsMember({"tsv", "bin"}));
  c_train->add_option("--labels", train.labels, "segment<TAB>speaker file")->required();
  c_train->add_option("--out", train.out, "model file to write")->required();
  c_train->add_flag("--b-zero", train.b_zero, "hold b = 0 (uniform speaker prior)");
  c_train->add_option("--max-iters", train.max_iters)->check(CLI::NonNegativeNumber);
  c_train->add_option("--rel-tol", train.rel_tol)->check(CLI::NonNegativeNumber);
  c_train->add_option("--threads", train.threads)->check(CLI::Range(1, 1024));

  ScoreArgs score;
  auto *c_score = app.add_subcommand("score", "score a trial list");
  c_score->add_option("--model", score.model, "model file");
  c_score->add_option("--embeddings", score.embeddings)->required();
  c_score->add_option("--format", score.format)->check(CLI::IsMember({"tsv", "bin"}));
  c_score->add_option("--trials", score.trials, "enroll_id test_id [tar|non]")->required();
  c_score->add_option("--enroll", score.enroll,
                      "model_id seg_1 ... seg_m; without it enroll ids are segment ids");
  c_score->add_option("--out", score.out, "score file to write")->required();
  c_score->add_flag("--cosine", score.cosine, "cosine baseline instead of the model");
  c_score->add_option("--threads", score.threads)->check(CLI::Range(1, 1024));

  EvalArgs eval;
  auto *c_eval = app.add_subcommand("eval", "EER and minDCF of a labeled score file");
  c_eval->add_option("--scores", eval.scores)->required();
  c_eval->add_option("--trials", eval.trials, "labels, when the score file has none");
  c_eval->add_option("--det", eval.det, "write p_miss p_fa points here");
  c_eval->add_option("--p-tar", eval.p_tar)->check(CLI::Range(0.0, 1.0));

  SynthArgs synth;
  auto *c_synth = app.add_subcommand("synth", "draw a synthetic dataset");
  c_synth->add_option("--out-dir", synth.out_dir)->required();
  c_synth->add_option("--truth", synth.truth, "model file to sample from");
  c_synth->add_option("--dim", synth.dim)->check(CLI::Range(2, 1 << 20));
  c_synth->add_option("--w", synth.w)->check(CLI::PositiveNumber);
  c_synth->add_option("--b", synth.b)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--speakers", synth.speakers)->check(CLI::Range(1, 1 << 30));
  c_synth->add_option("--per-speaker", synth.per_speaker)->check(CLI::Range(1, 1 << 30));
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--format", synth.format)->check(CLI::IsMember({"tsv", "bin"}));
  c_synth->add_option("--prefix", synth.prefix, "prepended to every id");
  c_synth->add_option("--max-nontargets", synth.max_nontargets);
  c_synth->add_flag("--ordered-pairs", synth.ordered_pairs, "emit (a, b) and (b, a)");

  std::string info_model;
  auto *c_info = app.add_subcommand("info", "print a model summary");
  c_info->add_option("model", info_model)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp &) {
    out << (app.get_subcommands().empty() ? app.help()
                                          : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForVersion &) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::Error &e) {
    err << "psda: usage error: " << OneLine(e.what()) << '\n';
    return kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (c_train->parsed()) RunTrain(train, out, err);
    if (c_score->parsed()) {
      if (!score.cosine && score.model.empty()) {
        err << "psda score: usage error: --model is required unless --cosine is given\n";
        return kUsage;
      }
      RunScore(score, out);
    }
    if (c_eval->parsed()) RunEval(eval, out);
    if (c_synth->parsed()) RunSynth(synth, out);
    if (c_info->parsed()) RunInfo(info_model, out);
  } catch (const DegenerateDataError &e) {
    err << "psda " << name << ": degenerate data: " << OneLine(e.what()) << '\n';
    return kNumericError;
  } catch (const CappedConcentrationError &e) {
    err << "psda " << name << ": degenerate data: " << OneLine(e.what()) << '\n';
    return kNumericError;
  } catch (const IoError &e) {
    err << "psda " << name << ": i/o error: " << OneLine(e.what()) << '\n';
    return kDataError;
  } catch (const ParseError &e) {
    err << "psda " << name << ": parse error: " << OneLine(e.what()) << '\n';
    return kDataError;
  } catch (const DimensionError &e) {
    err << "psda " << name << ": dimension error: " << OneLine(e.what()) << '\n';
    return kDataError;
  } catch (const DataError &e) {
    err << "psda " << name << ": data error: " << OneLine(e.what()) << '\n';
    return kDataError;
  } catch (const DomainError &e) {
    err << "psda " << name << ": invalid value: " << OneLine(e.what()) << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace psda::cli
