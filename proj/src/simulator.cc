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

#include "phonrich/simulator.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "phonrich/rng.h"

namespace phonrich {

const std::vector<VocabularyEntry>& DefaultVocabulary() {
  static const std::vector<VocabularyEntry> kVocabulary = {
      {"measure", "M EH1 ZH ER0"},
      {"boy", "B OY1"},
      {"thing", "TH IH1 NG"},
      {"this", "DH IH1 S"},
      {"church", "CH ER1 CH"},
      {"judge", "JH AH1 JH"},
      {"ship", "SH IH1 P"},
      {"yes", "Y EH1 S"},
      {"zoo", "Z UW1"},
      {"how", "HH AW1"},
      {"my", "M AY1"},
      {"good", "G UH1 D"},
      {"food", "F UW1 D"},
      {"water", "W AO1 T ER0"},
      {"agent", "EY1 JH AH0 N T"},
      {"representative", "R EH2 P R AH0 Z EH1 N T AH0 T IH0 V"},
      {"hello", "HH AH0 L OW1"},
      {"number", "N AH1 M B ER0"},
      {"seven", "S EH1 V AH0 N"},
      {"eight", "EY1 T"},
      {"nine", "N AY1 N"},
      {"zero", "Z IH1 R OW0"},
      {"one", "W AH1 N"},
      {"two", "T UW1"},
      {"three", "TH R IY1"},
      {"four", "F AO1 R"},
      {"five", "F AY1 V"},
      {"six", "S IH1 K S"},
      {"table", "T EY1 B AH0 L"},
      {"chair", "CH EH1 R"},
      {"window", "W IH1 N D OW0"},
      {"garden", "G AA1 R D AH0 N"},
      {"orange", "AO1 R AH0 N JH"},
      {"yellow", "Y EH1 L OW0"},
      {"purple", "P ER1 P AH0 L"},
      {"father", "F AA1 DH ER0"},
      {"mother", "M AH1 DH ER0"},
      {"brother", "B R AH1 DH ER0"},
      {"sister", "S IH1 S T ER0"},
      {"music", "M Y UW1 Z IH0 K"},
      {"summer", "S AH1 M ER0"},
      {"winter", "W IH1 N T ER0"},
      {"morning", "M AO1 R N IH0 NG"},
      {"evening", "IY1 V N IH0 NG"},
      {"village", "V IH1 L AH0 JH"},
      {"voice", "V OY1 S"},
      {"beach", "B IY1 CH"},
      {"vision", "V IH1 ZH AH0 N"},
      {"thousand", "TH AW1 Z AH0 N D"},
      {"leisure", "L EH1 ZH ER0"},
      {"enjoy", "EH2 N JH OY1"},
      {"noise", "N OY1 Z"},
      {"pleasure", "P L EH1 ZH ER0"},
      {"whether", "W EH1 DH ER0"},
      {"nothing", "N AH1 TH IH0 NG"},
      {"year", "Y IH1 R"},
      {"young", "Y AH1 NG"},
      {"north", "N AO1 R TH"},
      {"south", "S AW1 TH"},
      {"kitchen", "K IH1 CH AH0 N"},
      {"money", "M AH1 N IY0"},
      {"paper", "P EY1 P ER0"},
      {"jump", "JH AH1 M P"},
      {"quick", "K W IH1 K"},
      {"azure", "AE1 ZH ER0"},
      {"cheese", "CH IY1 Z"},
  };
  return kVocabulary;
}

Lexicon MakeVocabularyLexicon(std::span<const VocabularyEntry> vocabulary) {
  std::ostringstream text;
  for (const auto& v : vocabulary) {
    text << v.word << "  " << v.pronunciation << '\n';
  }
  std::istringstream in(text.str());
  return ParseLexicon(in, PhonemeInventory::Arpabet(), "<vocabulary>");
}

void SimConfig::Validate() const {
  if (n_speakers < 2) throw std::invalid_argument("need at least 2 speakers");
  if (dim < 2) throw std::invalid_argument("embedding dim must be >= 2");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
  if (vocabulary.empty()) throw std::invalid_argument("empty vocabulary");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (sentences_per_speaker < 1) {
    throw std::invalid_argument("sentences_per_speaker must be >= 1");
  }
}

std::vector<UtteranceRecord> SynthesizeCorpus(const SimConfig& config) {
  config.Validate();
  Lexicon lexicon = MakeVocabularyLexicon(config.vocabulary);
  std::vector<UtteranceRecord> corpus;
  for (int s = 0; s < config.n_speakers; ++s) {
    const std::string speaker = fmt::format("spk{:03d}", s);
    const std::string gender = s % 2 == 0 ? "f" : "m";
    Rng rng = MakeStream(config.seed, "sim/corpus", speaker);
    std::uniform_real_distribution<double> rate(0.85, 1.15);
    const double speaker_rate = rate(rng);

    auto duration = [&](const VocabularyEntry& v) {
      const auto* pron = lexicon.Lookup(v.word);
      double base = 0.2 + 0.09 * static_cast<double>(pron->size());
      return base * speaker_rate * rate(rng);
    };

    for (const auto& v : config.vocabulary) {
      for (int r = 1; r <= config.repetitions; ++r) {
        UtteranceRecord u;
        u.utterance_id = fmt::format("{}_{}_{:02d}", speaker, v.word, r);
        u.speaker_id = speaker;
        u.gender = gender;
        u.kind = UtteranceKind::kWord;
        u.word_text = v.word;
        u.repetition_index = r;
        u.transcript = v.word;
        u.net_speech = duration(v);
        u.word_durations = {u.net_speech};
        corpus.push_back(std::move(u));
      }
    }
    const auto n_words = config.vocabulary.size();
    const auto n_sent = static_cast<std::size_t>(config.sentences_per_speaker);
    for (std::size_t k = 0; k < n_sent; ++k) {
      UtteranceRecord u;
      u.utterance_id = fmt::format("{}_sent{:02d}", speaker, k + 1);
      u.speaker_id = speaker;
      u.gender = gender;
      u.kind = UtteranceKind::kSentence;
      for (std::size_t w = k * n_words / n_sent; w < (k + 1) * n_words / n_sent;
           ++w) {
        double d = duration(config.vocabulary[w]);
        if (!u.transcript.empty()) u.transcript += ' ';
        u.transcript += config.vocabulary[w].word;
        u.word_durations.push_back(d);
        u.net_speech += d;
      }
      if (u.word_durations.empty()) continue;
      corpus.push_back(std::move(u));
    }
  }
  return corpus;
}

double CosineScore(const Embedding& a, const Embedding& b) {
  if (a.vector.size() != b.vector.size()) {
    throw std::invalid_argument(fmt::format(
        "embedding dimensions differ ({} vs {})", a.vector.size(),
        b.vector.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    dot += a.vector[i] * b.vector[i];
  }
  return std::clamp(dot, -1.0, 1.0);
}

namespace {

void Normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw std::runtime_error("degenerate zero embedding");
  for (double& x : v) x /= norm;
}

std::vector<double> Perturb(const std::vector<double>& mean, double sigma,
                            Rng rng) {
  std::normal_distribution<double> noise(
      0.0, sigma / std::sqrt(static_cast<double>(mean.size())));
  std::vector<double> v = mean;
  for (double& x : v) x += noise(rng);
  Normalize(v);
  return v;
}

}  // namespace

SimulationResult SimulateCorpus(const SimConfig& config,
                                const ProtocolSpec& protocol,
                                const Lexicon& lexicon,
                                const RichnessWeights* weights) {
  config.Validate();
  const auto dim = static_cast<std::size_t>(config.dim);
  std::map<std::string, std::vector<double>> speaker_mean;
  auto mean_of = [&](const std::string& speaker) -> const std::vector<double>& {
    auto it = speaker_mean.find(speaker);
    if (it != speaker_mean.end()) return it->second;
    Rng rng = MakeStream(config.seed, "sim/speaker", speaker);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    Normalize(v);
    return speaker_mean.emplace(speaker, std::move(v)).first->second;
  };

  SimulationResult result;
  std::map<std::string, std::size_t> model_index, test_index;
  for (const auto& m : protocol.models) {
    Embedding e{m.model_id,
                Perturb(mean_of(m.speaker_id), config.sigma0 / 4.0,
                        MakeStream(config.seed, "sim/model", m.model_id))};
    model_index[m.model_id] = result.model_embeddings.size();
    result.model_embeddings.push_back(std::move(e));
  }
  for (const auto& t : protocol.tests) {
    auto trans = Transcribe(t.transcript, lexicon, t.test_id);
    auto presence = MakePresenceVector(trans, lexicon.inventory());
    const int cu = CountUnique(presence);
    const double sigma =
        config.sigma0 *
        (1.0 + config.kappa * static_cast<double>(kInventorySize - cu) /
                   static_cast<double>(kInventorySize));
    Embedding e{t.test_id,
                Perturb(mean_of(t.speaker_id), sigma,
                        MakeStream(config.seed, "sim/test", t.test_id))};
    test_index[t.test_id] = result.test_embeddings.size();
    result.test_embeddings.push_back(std::move(e));
    QmfRecord q;
    q.net_speech = t.net_speech;
    q.cu = cu;
    if (weights != nullptr) q.wcu = WeightedCountUnique(presence, *weights);
    result.qmfs[t.test_id] = q;
  }

  auto score = [&](const TrialPair& pair, Label label) {
    auto m = model_index.find(pair.model_id);
    auto t = test_index.find(pair.test_id);
    if (m == model_index.end() || t == test_index.end()) {
      throw std::invalid_argument(fmt::format(
          "trial {} {} does not match the protocol manifests", pair.model_id,
          pair.test_id));
    }
    result.trials.push_back(
        {pair.model_id, pair.test_id, label,
         CosineScore(result.model_embeddings[m->second],
                     result.test_embeddings[t->second])});
  };
  for (const auto& p : protocol.positive_trials) score(p, Label::kTarget);
  for (const auto& p : protocol.negative_trials) score(p, Label::kNontarget);
  return result;
}

}  // namespace phonrich
