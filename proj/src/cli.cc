// Copyright (c) 2026 The phonrich Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phonrich/cli.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "phonrich/calibration.h"
#include "phonrich/io.h"
#include "phonrich/lexicon.h"
#include "phonrich/metrics.h"
#include "phonrich/protocols.h"
#include "phonrich/richness.h"
#include "phonrich/simulator.h"

namespace phonrich {

namespace {

// Writes to `path`, or to `fallback` when the path is empty or "-".
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback)
      : path_(path) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = OpenOutput(path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void Close() {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("write failed: " + path_);
    if (file_.is_open()) file_.close();
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

Provenance MakeProvenance(const std::string& subcommand,
                          std::optional<std::uint64_t> seed,
                          const std::vector<std::string>& inputs) {
  Provenance p;
  p.subcommand = subcommand;
  p.seed = seed;
  for (const auto& path : inputs) {
    if (!path.empty()) p.AddInput(path);
  }
  return p;
}

PhonemeInventory LoadInventory(const std::string& path) {
  return path.empty() ? PhonemeInventory::Arpabet()
                      : PhonemeInventory::FromFile(path);
}

// One record of presence JSONL (output of g2p).
struct PresenceRecord {
  PhonemeTranscription transcription;
  PresenceVector presence;
  std::optional<double> net_speech;
};

std::vector<PresenceRecord> ReadPresenceFile(
    const std::string& path, const PhonemeInventory& inventory) {
  std::vector<PresenceRecord> records;
  std::set<std::string> ids;
  auto in = OpenInput(path);
  ForEachJsonl(in, path, [&](std::size_t, const nlohmann::json& j) {
    PresenceRecord r;
    std::string id = j.at("utterance_id").get<std::string>();
    r.presence = PresenceVector::FromString(
        id, j.at("presence").get<std::string>());
    r.transcription.utterance_id = id;
    std::istringstream phones(j.value("phonemes", std::string()));
    std::string sym;
    while (phones >> sym) {
      if (!inventory.Contains(sym)) {
        throw std::invalid_argument("phoneme '" + sym +
                                    "' is not in the inventory");
      }
      r.transcription.phonemes.push_back(sym);
    }
    r.transcription.n_words = j.value("n_words", std::size_t{0});
    r.transcription.oov_words = j.value("oov_words", std::size_t{0});
    if (j.contains("net_speech") && !j["net_speech"].is_null()) {
      r.net_speech = j["net_speech"].get<double>();
    }
    if (!ids.insert(id).second) {
      throw std::invalid_argument("duplicate utterance_id '" + id + "'");
    }
    records.push_back(std::move(r));
  });
  return records;
}

// ---------------------------------------------------------------- g2p

struct G2pArgs {
  std::string transcripts, lexicon, inventory, out;
};

int RunG2p(const G2pArgs& a, std::ostream& out, std::ostream& err) {
  PhonemeInventory inventory = LoadInventory(a.inventory);
  Lexicon lexicon = LoadLexicon(a.lexicon, inventory);
  auto prov = MakeProvenance("g2p", std::nullopt,
                             {a.transcripts, a.lexicon, a.inventory});
  OutputTarget target(a.out, out);
  auto& os = target.get();
  os << prov.JsonlLine() << '\n';

  std::size_t n_utts = 0, n_words = 0, n_oov = 0, n_oov_only = 0;
  std::set<std::string> ids;
  auto in = OpenInput(a.transcripts);
  ForEachJsonl(in, a.transcripts, [&](std::size_t, const nlohmann::json& j) {
    std::string id = j.at("utterance_id").get<std::string>();
    if (!ids.insert(id).second) {
      throw std::invalid_argument("duplicate utterance_id '" + id + "'");
    }
    auto trans = Transcribe(j.at("transcript").get<std::string>(), lexicon, id);
    auto presence = MakePresenceVector(trans, inventory);
    nlohmann::ordered_json rec;
    rec["utterance_id"] = id;
    std::string phones;
    for (const auto& p : trans.phonemes) {
      if (!phones.empty()) phones += ' ';
      phones += p;
    }
    rec["phonemes"] = phones;
    rec["presence"] = presence.ToString();
    rec["cu"] = CountUnique(presence);
    rec["n_words"] = trans.n_words;
    rec["oov_words"] = trans.oov_words;
    if (j.contains("net_speech") && !j["net_speech"].is_null()) {
      rec["net_speech"] = j["net_speech"].get<double>();
    }
    os << rec.dump() << '\n';
    ++n_utts;
    n_words += trans.n_words;
    n_oov += trans.oov_words;
    if (trans.n_words > 0 && trans.oov_words == trans.n_words) ++n_oov_only;
  });

  const double oov_rate =
      n_words == 0 ? 0.0
                   : static_cast<double>(n_oov) / static_cast<double>(n_words);
  nlohmann::ordered_json summary;
  summary["utterances"] = n_utts;
  summary["words"] = n_words;
  summary["oov_words"] = n_oov;
  summary["oov_rate"] = oov_rate;
  summary["oov_only_utterances"] = n_oov_only;
  nlohmann::ordered_json line;
  line["_summary"] = summary;
  os << line.dump() << '\n';
  target.Close();
  err << fmt::format("g2p: {} utterances, {} words, {} OOV ({:.2f}%)\n",
                     n_utts, n_words, n_oov, 100.0 * oov_rate);
  if (n_oov_only > 0) {
    err << fmt::format(
        "warning: {} utterance(s) have only out-of-vocabulary words (CU 0)\n",
        n_oov_only);
  }
  return 0;
}

// ---------------------------------------------------------------- richness

struct RichnessArgs {
  std::string presence, weights, inventory, out;
};

int RunRichness(const RichnessArgs& a, std::ostream& out, std::ostream&) {
  PhonemeInventory inventory = LoadInventory(a.inventory);
  auto records = ReadPresenceFile(a.presence, inventory);
  std::optional<RichnessWeights> weights;
  if (!a.weights.empty()) {
    auto in = OpenInput(a.weights);
    weights = ReadWeights(in, inventory, a.weights);
  }
  QmfTable table;
  for (const auto& r : records) {
    if (!r.net_speech) {
      throw std::runtime_error(
          fmt::format("{}: utterance '{}' has no net_speech", a.presence,
                      r.presence.utterance_id));
    }
    QmfRecord q;
    q.net_speech = *r.net_speech;
    q.cu = CountUnique(r.presence);
    if (weights) q.wcu = WeightedCountUnique(r.presence, *weights);
    table[r.presence.utterance_id] = q;
  }
  auto prov = MakeProvenance("richness", std::nullopt,
                             {a.presence, a.weights, a.inventory});
  OutputTarget target(a.out, out);
  WriteQmfs(target.get(), table, &prov);
  target.Close();
  return 0;
}

// ---------------------------------------------------------------- fit-weights

struct FitWeightsArgs {
  std::string presence, scores, inventory, out;
};

int RunFitWeights(const FitWeightsArgs& a, std::ostream& out, std::ostream&) {
  PhonemeInventory inventory = LoadInventory(a.inventory);
  auto records = ReadPresenceFile(a.presence, inventory);
  std::map<std::string, const PresenceRecord*> by_id;
  for (const auto& r : records) by_id[r.presence.utterance_id] = &r;
  auto trials = ReadScoresFile(a.scores);
  std::vector<WeightTrainingPair> pairs;
  for (const auto& t : trials) {
    if (t.label != Label::kTarget) continue;
    auto it = by_id.find(t.test_id);
    if (it == by_id.end()) continue;
    pairs.push_back({it->second->presence, t.raw_score});
  }
  if (pairs.empty()) {
    throw std::runtime_error(
        "no target trial in the scores matches a presence record");
  }
  RichnessWeights w = FitWeights(pairs);
  auto prov = MakeProvenance("fit-weights", std::nullopt,
                             {a.presence, a.scores, a.inventory});
  OutputTarget target(a.out, out);
  target.get() << prov.TsvLine() << '\n';
  WriteWeights(target.get(), w, inventory);
  target.Close();
  std::ostream& log = a.out.empty() || a.out == "-" ? std::cerr : out;
  log << fmt::format("n_train\t{}\nfit_residual\t{:.6g}\n", w.n_train,
                     w.fit_residual);
  return 0;
}

// ---------------------------------------------------------------- gen-protocol

struct GenProtocolArgs {
  std::string kind, utterances, trials, lexicon, out_prefix, name;
  std::uint64_t seed = 0;
  double target_seconds = 0.0;
  int probes_per_speaker = 160;
  std::size_t max_negatives = 0;
};

int RunGenProtocol(const GenProtocolArgs& a, std::ostream& out,
                   std::ostream&) {
  auto in = OpenInput(a.utterances);
  auto utts = ReadUtteranceInventory(in, a.utterances);
  auto prov = MakeProvenance("gen-protocol", a.seed,
                             {a.utterances, a.trials, a.lexicon});
  prov.AddParam("kind", a.kind);
  ProtocolSpec spec;
  if (a.kind == "clip") {
    if (!(a.target_seconds > 0.0)) {
      throw std::invalid_argument("--target-seconds must be > 0 for clip");
    }
    prov.AddParam("target_seconds", FormatReal(a.target_seconds));
    ClipOptions opt;
    opt.name = a.name.empty() ? fmt::format("clip{}s", a.target_seconds)
                              : a.name;
    std::optional<Lexicon> lexicon;
    if (!a.lexicon.empty()) {
      lexicon = LoadLexicon(a.lexicon);
      opt.lexicon = &*lexicon;
    }
    std::vector<UtteranceRecord> tests;
    if (!a.trials.empty()) {
      auto tin = OpenInput(a.trials);
      ReadTrialList(tin, a.trials, opt.positive_trials, opt.negative_trials);
      std::set<std::string> wanted;
      for (const auto& t : opt.positive_trials) wanted.insert(t.test_id);
      for (const auto& t : opt.negative_trials) wanted.insert(t.test_id);
      for (const auto& u : utts) {
        if (wanted.contains(u.utterance_id)) tests.push_back(u);
      }
    } else {
      for (const auto& u : utts) {
        if (!u.word_durations.empty()) tests.push_back(u);
      }
    }
    spec = BuildClipProtocol(tests, a.target_seconds, a.seed, opt);
  } else if (a.kind == "repetitive") {
    RepetitiveOptions opt;
    if (!a.name.empty()) opt.name = a.name;
    opt.probes_per_speaker = a.probes_per_speaker;
    opt.max_negative_trials = a.max_negatives;
    prov.AddParam("probes_per_speaker", std::to_string(a.probes_per_speaker));
    prov.AddParam("max_negatives", std::to_string(a.max_negatives));
    spec = BuildRepetitiveProtocol(utts, a.seed, opt);
  } else {
    throw std::invalid_argument("--kind must be clip or repetitive");
  }
  auto paths = ProtocolPaths::FromPrefix(a.out_prefix);
  EmitProtocol(spec, paths, &prov);
  out << fmt::format("{}: {} tests, {} target and {} nontarget trials\n",
                     spec.name, spec.tests.size(), spec.positive_trials.size(),
                     spec.negative_trials.size());
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string protocol, lexicon, weights, out_prefix;
  std::uint64_t seed = 0;
  int speakers = 50;
  int dim = 32;
  double sigma0 = 0.6;
  double kappa = 2.0;
  int probes_per_speaker = 160;
  std::size_t max_negatives = 0;
};

int RunSimulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  SimConfig config;
  config.seed = a.seed;
  config.n_speakers = a.speakers;
  config.dim = a.dim;
  config.sigma0 = a.sigma0;
  config.kappa = a.kappa;
  config.Validate();

  std::vector<std::string> inputs;
  if (!a.protocol.empty()) {
    auto paths = ProtocolPaths::FromPrefix(a.protocol);
    inputs = {paths.trials, paths.tests, paths.models, a.lexicon};
  }
  inputs.push_back(a.weights);
  auto prov = MakeProvenance("simulate", a.seed, inputs);
  prov.AddParam("speakers", std::to_string(a.speakers));
  prov.AddParam("dim", std::to_string(a.dim));
  prov.AddParam("sigma0", FormatReal(a.sigma0));
  prov.AddParam("kappa", FormatReal(a.kappa));

  std::optional<RichnessWeights> weights;
  if (!a.weights.empty()) {
    auto in = OpenInput(a.weights);
    weights = ReadWeights(in, PhonemeInventory::Arpabet(), a.weights);
  }

  ProtocolSpec spec;
  Lexicon lexicon;
  if (!a.protocol.empty()) {
    if (a.lexicon.empty()) {
      throw std::invalid_argument("--protocol requires --lexicon");
    }
    spec = ReadProtocol(ProtocolPaths::FromPrefix(a.protocol));
    lexicon = LoadLexicon(a.lexicon);
  } else {
    prov.AddParam("probes_per_speaker", std::to_string(a.probes_per_speaker));
    prov.AddParam("max_negatives", std::to_string(a.max_negatives));
    auto corpus = SynthesizeCorpus(config);
    RepetitiveOptions opt;
    opt.probes_per_speaker = a.probes_per_speaker;
    opt.max_negative_trials = a.max_negatives;
    spec = BuildRepetitiveProtocol(corpus, a.seed, opt);
    lexicon = MakeVocabularyLexicon(config.vocabulary);
    {
      auto os = OpenOutput(a.out_prefix + ".corpus.jsonl");
      WriteUtteranceInventory(os, corpus, &prov);
    }
    {
      auto os = OpenOutput(a.out_prefix + ".lexicon.txt");
      os << ";;; " << prov.TsvLine().substr(2) << '\n';
      for (const auto& v : config.vocabulary) {
        std::string word = v.word;
        std::transform(word.begin(), word.end(), word.begin(), ::toupper);
        os << word << "  " << v.pronunciation << '\n';
      }
    }
    EmitProtocol(spec, ProtocolPaths::FromPrefix(a.out_prefix), &prov);
  }

  auto result = SimulateCorpus(config, spec, lexicon,
                               weights ? &*weights : nullptr);
  {
    auto os = OpenOutput(a.out_prefix + ".scores.tsv");
    WriteScores(os, result.trials, &prov);
  }
  {
    auto os = OpenOutput(a.out_prefix + ".qmf.jsonl");
    WriteQmfs(os, result.qmfs, &prov);
  }
  out << fmt::format("simulated {} trials over {} tests and {} models\n",
                     result.trials.size(), result.test_embeddings.size(),
                     result.model_embeddings.size());
  return 0;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string scores, qmf, features = "raw", out, models_prefix;
  int folds = 5;
  std::uint64_t seed = 0;
};

int RunCalibrate(const CalibrateArgs& a, std::ostream& out, std::ostream&) {
  FeatureSet features = FeatureSet::Parse(a.features);
  auto trials = ReadScoresFile(a.scores);
  QmfTable qmfs;
  if (features.NeedsQmf()) {
    if (a.qmf.empty()) {
      throw std::invalid_argument("features beyond raw need --qmf");
    }
    qmfs = ReadQmfsFile(a.qmf);
  }
  auto cv = CrossValidatedCalibration(trials, qmfs, features, a.folds, a.seed);
  auto prov = MakeProvenance("calibrate", a.seed, {a.scores, a.qmf});
  prov.AddParam("features", features.ToString());
  prov.AddParam("folds", std::to_string(a.folds));
  OutputTarget target(a.out, out);
  WriteScores(target.get(), cv.calibrated, &prov);
  target.Close();
  if (!a.models_prefix.empty()) {
    for (std::size_t f = 0; f < cv.fold_models.size(); ++f) {
      auto os = OpenOutput(fmt::format("{}.fold{}.model", a.models_prefix, f));
      os << prov.TsvLine() << '\n';
      WriteCalibrationModel(os, cv.fold_models[f]);
    }
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string scores, qmf, out;
  std::vector<std::string> feature_sets;
  int folds = 5;
  std::uint64_t seed = 0;
};

int RunEvaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  auto trials = ReadScoresFile(a.scores);
  QmfTable qmfs;
  if (!a.qmf.empty()) qmfs = ReadQmfsFile(a.qmf);

  std::vector<std::optional<FeatureSet>> sets;  // nullopt = uncalibrated
  if (a.feature_sets.empty()) {
    sets.push_back(std::nullopt);
    if (!a.qmf.empty()) {
      bool have_wcu = !qmfs.empty() &&
                      std::all_of(qmfs.begin(), qmfs.end(), [](const auto& kv) {
                        return kv.second.wcu.has_value();
                      });
      using F = Feature;
      sets.push_back(FeatureSet{F::kRaw});
      sets.push_back(FeatureSet{F::kRaw, F::kLns});
      sets.push_back(FeatureSet{F::kRaw, F::kCu});
      if (have_wcu) sets.push_back(FeatureSet{F::kRaw, F::kWcu});
      sets.push_back(FeatureSet{F::kRaw, F::kLns, F::kCu});
      if (have_wcu) sets.push_back(FeatureSet{F::kRaw, F::kLns, F::kWcu});
    } else {
      sets.push_back(FeatureSet{Feature::kRaw});
    }
  } else {
    for (const auto& s : a.feature_sets) {
      if (s == "none") {
        sets.push_back(std::nullopt);
      } else {
        sets.push_back(FeatureSet::Parse(s));
      }
    }
  }

  auto prov = MakeProvenance("evaluate", a.seed, {a.scores, a.qmf});
  prov.AddParam("folds", std::to_string(a.folds));
  OutputTarget target(a.out, out);
  auto& os = target.get();
  os << prov.TsvLine() << '\n';
  os << "features\teer_percent\tmin_c_primary\tn_target\tn_nontarget\n";
  for (const auto& set : sets) {
    std::vector<TrialRecord> scored;
    if (set) {
      if (set->NeedsQmf() && a.qmf.empty()) {
        throw std::invalid_argument("feature set '" + set->ToString() +
                                    "' needs --qmf");
      }
      scored = CrossValidatedCalibration(trials, qmfs, *set, a.folds, a.seed)
                   .calibrated;
    } else {
      scored = trials;
    }
    MetricsReport r = Evaluate(scored);
    os << fmt::format("{}\t{:.2f}\t{:.3f}\t{}\t{}\n",
                      set ? set->ToString() : std::string("none"),
                      100.0 * r.eer, r.min_c_primary, r.n_target,
                      r.n_nontarget);
  }
  target.Close();
  return 0;
}

// ---------------------------------------------------------------- report-weights

struct ReportWeightsArgs {
  std::string weights, presence, inventory, out;
};

int RunReportWeights(const ReportWeightsArgs& a, std::ostream& out,
                     std::ostream&) {
  PhonemeInventory inventory = LoadInventory(a.inventory);
  auto win = OpenInput(a.weights);
  RichnessWeights w = ReadWeights(win, inventory, a.weights);
  auto records = ReadPresenceFile(a.presence, inventory);
  std::vector<PhonemeTranscription> corpus;
  for (auto& r : records) corpus.push_back(r.transcription);
  auto rows = WeightReport(w, corpus, inventory);
  auto prov = MakeProvenance("report-weights", std::nullopt,
                             {a.weights, a.presence, a.inventory});
  OutputTarget target(a.out, out);
  auto& os = target.get();
  os << prov.TsvLine() << '\n';
  os << "phoneme\tnormalized_weight\tfrequency\n";
  for (const auto& row : rows) {
    os << fmt::format("{}\t{:.6f}\t{:.6f}\n", row.phoneme,
                      row.normalized_weight, row.frequency);
  }
  target.Close();
  return 0;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string qmf, scores, out, scatter;
};

int RunStats(const StatsArgs& a, std::ostream& out, std::ostream&) {
  QmfTable qmfs = ReadQmfsFile(a.qmf);
  std::vector<UtteranceQuality> utts;
  for (const auto& [id, q] : qmfs) utts.push_back({q.net_speech, q.cu});
  ProtocolStats s = ComputeProtocolStats(utts);
  auto prov = MakeProvenance("stats", std::nullopt, {a.qmf, a.scores});
  OutputTarget target(a.out, out);
  auto& os = target.get();
  os << prov.TsvLine() << '\n';
  os << "n\tnet_speech_mean\tnet_speech_std\tcu_mean\tcu_std\n";
  os << fmt::format("{}\t{:.1f}\t{:.1f}\t{:.1f}\t{:.1f}\n", s.n,
                    s.net_speech_mean, s.net_speech_std, s.cu_mean, s.cu_std);
  if (!a.scores.empty()) {
    auto trials = ReadScoresFile(a.scores);
    auto report = MakeCorrelationReport(trials, qmfs);
    os << "class\tqmf\tn\tkendall_tau\n";
    for (const auto& row : report.rows) {
      os << fmt::format("{}\t{}\t{}\t{:.3f}\n", LabelName(row.label),
                        row.qmf_name, row.n, row.tau);
    }
    if (!a.scatter.empty()) {
      auto cs = OpenOutput(a.scatter);
      cs << "test_id,qmf_name,qmf_value,score,label\n";
      for (const auto& r : report.scatter) {
        cs << r.test_id << ',' << r.qmf_name << ',' << FormatReal(r.qmf_value)
           << ',' << FormatReal(r.score) << ',' << LabelName(r.label) << '\n';
      }
    }
  }
  target.Close();
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Phonetic-richness quality measures and score calibration "
               "for speaker verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ToolkitVersion()));

  std::function<int()> action;

  G2pArgs g2p;
  auto* c = app.add_subcommand("g2p", "Transcripts to phoneme presence");
  c->add_option("--transcripts", g2p.transcripts,
                "JSONL with utterance_id, transcript[, net_speech]")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--lexicon", g2p.lexicon, "CMU-format pronunciation file")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--inventory", g2p.inventory, "Phoneme inventory override")
      ->check(CLI::ExistingFile);
  c->add_option("--out", g2p.out, "Presence JSONL (default stdout)");
  c->callback([&] { action = [&] { return RunG2p(g2p, out, err); }; });

  RichnessArgs rich;
  c = app.add_subcommand("richness", "Presence records to CU/WCU/net speech");
  c->add_option("--presence", rich.presence, "Presence JSONL from g2p")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--weights", rich.weights, "WCU weights file")
      ->check(CLI::ExistingFile);
  c->add_option("--inventory", rich.inventory, "Phoneme inventory override")
      ->check(CLI::ExistingFile);
  c->add_option("--out", rich.out, "QMF JSONL (default stdout)");
  c->callback([&] { action = [&] { return RunRichness(rich, out, err); }; });

  FitWeightsArgs fit;
  c = app.add_subcommand("fit-weights",
                         "Fit non-negative WCU weights on target scores");
  c->add_option("--presence", fit.presence, "Presence JSONL from g2p")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--scores", fit.scores, "Scores TSV; target rows are used")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--inventory", fit.inventory, "Phoneme inventory override")
      ->check(CLI::ExistingFile);
  c->add_option("--out", fit.out, "Weights file")->required();
  c->callback([&] { action = [&] { return RunFitWeights(fit, out, err); }; });

  GenProtocolArgs gen;
  c = app.add_subcommand("gen-protocol", "Generate an evaluation protocol");
  c->add_option("--kind", gen.kind, "clip or repetitive")
      ->required()
      ->check(CLI::IsMember({"clip", "repetitive"}));
  c->add_option("--utterances", gen.utterances, "Utterance inventory JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--seed", gen.seed, "Random seed")->required();
  c->add_option("--out-prefix", gen.out_prefix,
                "Writes <prefix>.trials.tsv, .tests.jsonl, .models.jsonl")
      ->required();
  c->add_option("--name", gen.name, "Protocol name");
  c->add_option("--target-seconds", gen.target_seconds, "Clip duration");
  c->add_option("--trials", gen.trials, "Base trial list to pass through")
      ->check(CLI::ExistingFile);
  c->add_option("--lexicon", gen.lexicon,
                "Discard clips whose words are all out of vocabulary")
      ->check(CLI::ExistingFile);
  c->add_option("--probes-per-speaker", gen.probes_per_speaker,
                "Repetitive probes per speaker")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--max-negatives", gen.max_negatives,
                "Cap on nontarget trials (0 = all)");
  c->callback([&] { action = [&] { return RunGenProtocol(gen, out, err); }; });

  SimulateArgs sim;
  c = app.add_subcommand("simulate",
                         "Synthetic embeddings and cosine scores");
  c->add_option("--seed", sim.seed, "Random seed")->required();
  c->add_option("--out-prefix", sim.out_prefix, "Output file prefix")
      ->required();
  c->add_option("--protocol", sim.protocol,
                "Existing protocol prefix (default: synthesize corpus)");
  c->add_option("--lexicon", sim.lexicon, "Lexicon for --protocol")
      ->check(CLI::ExistingFile);
  c->add_option("--weights", sim.weights, "WCU weights to add to QMFs")
      ->check(CLI::ExistingFile);
  c->add_option("--speakers", sim.speakers, "Number of speakers");
  c->add_option("--dim", sim.dim, "Embedding dimension");
  c->add_option("--sigma0", sim.sigma0, "Base noise scale");
  c->add_option("--kappa", sim.kappa, "Richness-noise coupling");
  c->add_option("--probes-per-speaker", sim.probes_per_speaker,
                "Repetitive probes per speaker")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--max-negatives", sim.max_negatives,
                "Cap on nontarget trials (0 = all)");
  c->callback([&] { action = [&] { return RunSimulate(sim, out, err); }; });

  CalibrateArgs cal;
  c = app.add_subcommand("calibrate",
                         "Cross-validated logistic-regression calibration");
  c->add_option("--scores", cal.scores, "Scores TSV")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--qmf", cal.qmf, "QMF JSONL")->check(CLI::ExistingFile);
  c->add_option("--features", cal.features, "e.g. raw,lns,cu");
  c->add_option("--folds", cal.folds, "Cross-validation folds");
  c->add_option("--seed", cal.seed, "Random seed")->required();
  c->add_option("--out", cal.out, "Calibrated scores TSV (default stdout)");
  c->add_option("--models-prefix", cal.models_prefix,
                "Writes <prefix>.fold<i>.model");
  c->callback([&] { action = [&] { return RunCalibrate(cal, out, err); }; });

  EvaluateArgs ev;
  c = app.add_subcommand("evaluate",
                         "EER and minC_primary per calibration feature set");
  c->add_option("--scores", ev.scores, "Scores TSV")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--qmf", ev.qmf, "QMF JSONL")->check(CLI::ExistingFile);
  c->add_option("--feature-set", ev.feature_sets,
                "'none' or a feature list such as raw,cu (repeatable)");
  c->add_option("--folds", ev.folds, "Cross-validation folds");
  c->add_option("--seed", ev.seed, "Random seed")->required();
  c->add_option("--out", ev.out, "Report TSV (default stdout)");
  c->callback([&] { action = [&] { return RunEvaluate(ev, out, err); }; });

  ReportWeightsArgs rep;
  c = app.add_subcommand("report-weights",
                         "Normalized weights against phoneme frequency");
  c->add_option("--weights", rep.weights, "Weights file")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--presence", rep.presence, "Presence JSONL (corpus)")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--inventory", rep.inventory, "Phoneme inventory override")
      ->check(CLI::ExistingFile);
  c->add_option("--out", rep.out, "Report TSV (default stdout)");
  c->callback(
      [&] { action = [&] { return RunReportWeights(rep, out, err); }; });

  StatsArgs st;
  c = app.add_subcommand("stats",
                         "Net speech/CU statistics and QMF-score correlation");
  c->add_option("--qmf", st.qmf, "QMF JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--scores", st.scores, "Scores TSV for Kendall's tau")
      ->check(CLI::ExistingFile);
  c->add_option("--scatter", st.scatter, "Scatter CSV output");
  c->add_option("--out", st.out, "Report TSV (default stdout)");
  c->callback([&] { action = [&] { return RunStats(st, out, err); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    return action ? action() : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace phonrich
