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

#include "phonrich/protocols.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "phonrich/rng.h"

namespace phonrich {

namespace {

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream ss{std::string(text)};
  std::string w;
  while (ss >> w) words.push_back(std::move(w));
  return words;
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

bool GendersMatch(const std::string& a, const std::string& b) {
  return a.empty() || b.empty() || a == b;
}

}  // namespace

std::string_view UtteranceKindName(UtteranceKind kind) {
  switch (kind) {
    case UtteranceKind::kSentence:
      return "sentence";
    case UtteranceKind::kWord:
      return "word";
    case UtteranceKind::kDigit:
      return "digit";
    case UtteranceKind::kFree:
      return "free";
  }
  return "free";
}

UtteranceKind ParseUtteranceKind(std::string_view text) {
  if (text == "sentence") return UtteranceKind::kSentence;
  if (text == "word") return UtteranceKind::kWord;
  if (text == "digit") return UtteranceKind::kDigit;
  if (text == "free") return UtteranceKind::kFree;
  throw std::invalid_argument(fmt::format(
      "unknown utterance kind '{}' (sentence, word, digit, free)", text));
}

std::vector<UtteranceRecord> ReadUtteranceInventory(std::istream& in,
                                                    const std::string& source) {
  std::vector<UtteranceRecord> out;
  std::set<std::string> ids;
  std::set<std::tuple<std::string, std::string, int>> recordings;
  ForEachJsonl(in, source, [&](std::size_t, const nlohmann::json& j) {
    UtteranceRecord u;
    u.utterance_id = j.at("utterance_id").get<std::string>();
    u.speaker_id = j.at("speaker_id").get<std::string>();
    u.gender = j.value("gender", std::string());
    u.kind = ParseUtteranceKind(j.value("kind", std::string("free")));
    u.word_text = j.value("word_text", std::string());
    u.repetition_index = j.value("repetition_index", 1);
    u.net_speech = j.at("net_speech").get<double>();
    u.transcript = j.value("transcript", std::string());
    if (j.contains("word_durations")) {
      u.word_durations = j["word_durations"].get<std::vector<double>>();
    }
    if (!(u.net_speech > 0.0) || !std::isfinite(u.net_speech)) {
      throw std::invalid_argument("net_speech must be positive");
    }
    if (u.repetition_index < 1) {
      throw std::invalid_argument("repetition_index must be >= 1");
    }
    bool single_word =
        u.kind == UtteranceKind::kWord || u.kind == UtteranceKind::kDigit;
    if (single_word && u.word_text.empty()) {
      throw std::invalid_argument("word recording without word_text");
    }
    if (!ids.insert(u.utterance_id).second) {
      throw std::invalid_argument("duplicate utterance_id '" +
                                  u.utterance_id + "'");
    }
    if (single_word && !recordings
                            .emplace(u.speaker_id, u.word_text,
                                     u.repetition_index)
                            .second) {
      throw std::invalid_argument(fmt::format(
          "duplicate recording ({}, {}, {})", u.speaker_id, u.word_text,
          u.repetition_index));
    }
    out.push_back(std::move(u));
  });
  return out;
}

void WriteUtteranceInventory(std::ostream& out,
                             std::span<const UtteranceRecord> utterances,
                             const Provenance* provenance) {
  if (provenance) out << provenance->JsonlLine() << '\n';
  for (const auto& u : utterances) {
    nlohmann::ordered_json j;
    j["utterance_id"] = u.utterance_id;
    j["speaker_id"] = u.speaker_id;
    j["gender"] = u.gender;
    j["kind"] = UtteranceKindName(u.kind);
    j["word_text"] = u.word_text;
    j["repetition_index"] = u.repetition_index;
    j["net_speech"] = u.net_speech;
    j["transcript"] = u.transcript;
    j["word_durations"] = u.word_durations;
    out << j.dump() << '\n';
  }
}

std::vector<EnrollmentModel> BuildEnrollment(
    std::span<const UtteranceRecord> utterances) {
  std::map<std::string, EnrollmentModel> by_speaker;
  for (const auto& u : utterances) {
    auto& m = by_speaker[u.speaker_id];
    m.model_id = u.speaker_id;
    m.speaker_id = u.speaker_id;
    if (m.gender.empty()) m.gender = u.gender;
    if (u.kind != UtteranceKind::kSentence) continue;
    m.utterance_ids.push_back(u.utterance_id);
    m.net_speech += u.net_speech;
    if (!u.transcript.empty()) {
      if (!m.transcript.empty()) m.transcript += ' ';
      m.transcript += u.transcript;
    }
  }
  std::vector<EnrollmentModel> models;
  for (auto& [speaker, m] : by_speaker) {
    if (m.utterance_ids.empty()) {
      throw std::invalid_argument(fmt::format(
          "speaker '{}' has no sentence recordings for enrollment", speaker));
    }
    models.push_back(std::move(m));
  }
  return models;
}

ProtocolSpec BuildClipProtocol(std::span<const UtteranceRecord> tests,
                               double target_seconds, std::uint64_t seed,
                               const ClipOptions& options) {
  if (tests.empty()) {
    throw std::invalid_argument("clip protocol needs at least one test");
  }
  if (!(target_seconds > 0.0)) {
    throw std::invalid_argument("clip target duration must be positive");
  }
  ProtocolSpec spec;
  spec.name = options.name;
  spec.models = options.models;
  std::set<std::string> kept;
  std::set<std::string> known;
  for (const auto& u : tests) {
    known.insert(u.utterance_id);
    auto words = SplitWords(u.transcript);
    if (words.empty()) {
      throw std::invalid_argument(
          fmt::format("test '{}' has no words to clip", u.utterance_id));
    }
    if (words.size() != u.word_durations.size()) {
      throw std::invalid_argument(fmt::format(
          "test '{}' has {} words but {} word durations", u.utterance_id,
          words.size(), u.word_durations.size()));
    }
    const std::size_t m = words.size();
    for (double d : u.word_durations) {
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument(fmt::format(
            "test '{}' has a non-positive word duration", u.utterance_id));
      }
    }
    const double total =
        std::accumulate(u.word_durations.begin(), u.word_durations.end(), 0.0);
    const bool repeat = total < target_seconds - kDurationEpsilon;

    std::vector<std::size_t> starts;
    if (repeat) {
      starts.resize(m);
      std::iota(starts.begin(), starts.end(), 0);
    } else {
      double suffix = 0.0;
      std::vector<double> suffix_sum(m);
      for (std::size_t i = m; i-- > 0;) {
        suffix += u.word_durations[i];
        suffix_sum[i] = suffix;
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (suffix_sum[i] >= target_seconds - kDurationEpsilon) {
          starts.push_back(i);
        }
      }
    }
    Rng rng = MakeStream(seed, "protocol/clip", u.utterance_id);
    const std::size_t start = starts[static_cast<std::size_t>(
        UniformInt(rng, 0, static_cast<std::int64_t>(starts.size()) - 1))];

    TestProbe probe;
    probe.test_id = u.utterance_id;
    probe.speaker_id = u.speaker_id;
    probe.gender = u.gender;
    probe.source_ids = {u.utterance_id};
    probe.clip_target = target_seconds;
    probe.clip_start_word = start;
    std::vector<std::string> clip_words;
    double sum = 0.0;
    for (std::size_t i = start; sum < target_seconds - kDurationEpsilon; ++i) {
      sum += u.word_durations[i % m];
      clip_words.push_back(words[i % m]);
    }
    probe.clip_word_count = clip_words.size();
    probe.transcript = JoinWords(clip_words);
    probe.net_speech = sum;

    if (options.lexicon != nullptr) {
      auto trans = Transcribe(probe.transcript, *options.lexicon);
      if (trans.phonemes.empty()) continue;
    }
    kept.insert(probe.test_id);
    spec.tests.push_back(std::move(probe));
  }

  auto pass_through = [&](const std::vector<TrialPair>& in,
                          std::vector<TrialPair>& out) {
    for (const auto& t : in) {
      if (!known.contains(t.test_id)) {
        throw std::invalid_argument(fmt::format(
            "trial references unknown test utterance '{}'", t.test_id));
      }
      if (kept.contains(t.test_id)) out.push_back(t);
    }
  };
  pass_through(options.positive_trials, spec.positive_trials);
  pass_through(options.negative_trials, spec.negative_trials);
  return spec;
}

ProtocolSpec BuildRepetitiveProtocol(std::span<const UtteranceRecord> utterances,
                                     std::uint64_t seed,
                                     const RepetitiveOptions& options) {
  if (options.min_words < 1 || options.max_words < options.min_words ||
      options.max_unique_words < 1 || options.probes_per_speaker < 0) {
    throw std::invalid_argument("invalid repetitive protocol options");
  }
  ProtocolSpec spec;
  spec.name = options.name;
  spec.models = BuildEnrollment(utterances);

  // speaker -> word type -> recordings ordered by repetition index.
  std::map<std::string,
           std::map<std::string, std::vector<const UtteranceRecord*>>>
      words;
  for (const auto& u : utterances) {
    if (u.kind == UtteranceKind::kWord || u.kind == UtteranceKind::kDigit) {
      words[u.speaker_id][u.word_text].push_back(&u);
    }
  }
  for (auto& [speaker, types] : words) {
    for (auto& [word, recs] : types) {
      std::sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) {
        return a->repetition_index < b->repetition_index;
      });
    }
  }

  for (const auto& model : spec.models) {
    auto found = words.find(model.speaker_id);
    if (found == words.end()) continue;
    const auto& types = found->second;
    std::vector<std::string> type_names;
    for (const auto& [word, recs] : types) type_names.push_back(word);

    Rng rng = MakeStream(seed, "protocol/repetitive", model.speaker_id);
    for (int p = 0; p < options.probes_per_speaker; ++p) {
      const auto total =
          static_cast<int>(UniformInt(rng, options.min_words, options.max_words));
      const auto unique = static_cast<int>(
          UniformInt(rng, 1, std::min(options.max_unique_words, total)));
      if (static_cast<std::size_t>(unique) > type_names.size()) {
        throw std::invalid_argument(fmt::format(
            "speaker '{}' has {} word types, a probe needs {}",
            model.speaker_id, type_names.size(), unique));
      }

      std::vector<const UtteranceRecord*> slots;
      for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        std::vector<std::string> pool = type_names;
        for (int i = 0; i < unique; ++i) {
          auto j = UniformInt(rng, i, static_cast<std::int64_t>(pool.size()) - 1);
          std::swap(pool[static_cast<std::size_t>(i)],
                    pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(unique));
        std::vector<int> count(static_cast<std::size_t>(unique), 1);
        for (int extra = unique; extra < total; ++extra) {
          ++count[static_cast<std::size_t>(UniformInt(rng, 0, unique - 1))];
        }
        bool enough = true;
        for (int i = 0; i < unique; ++i) {
          if (types.at(pool[i]).size() <
              static_cast<std::size_t>(count[static_cast<std::size_t>(i)])) {
            enough = false;
          }
        }
        if (!enough) continue;
        for (int i = 0; i < unique; ++i) {
          auto recs = types.at(pool[i]);
          const int c = count[static_cast<std::size_t>(i)];
          for (int r = 0; r < c; ++r) {
            auto j = UniformInt(rng, r, static_cast<std::int64_t>(recs.size()) - 1);
            std::swap(recs[static_cast<std::size_t>(r)],
                      recs[static_cast<std::size_t>(j)]);
            slots.push_back(recs[static_cast<std::size_t>(r)]);
          }
        }
        std::shuffle(slots.begin(), slots.end(), rng);
        break;
      }
      if (slots.empty()) {
        throw std::invalid_argument(fmt::format(
            "speaker '{}': no probe with {} words over {} types after {} "
            "retries (too few repetitions)",
            model.speaker_id, total, unique, options.max_retries));
      }

      TestProbe probe;
      probe.test_id = fmt::format("{}_rep{:05d}", model.speaker_id, p);
      probe.speaker_id = model.speaker_id;
      probe.gender = model.gender;
      std::vector<std::string> slot_words;
      for (const auto* rec : slots) {
        probe.source_ids.push_back(rec->utterance_id);
        probe.net_speech += rec->net_speech;
        slot_words.push_back(rec->transcript.empty() ? rec->word_text
                                                     : rec->transcript);
      }
      probe.transcript = JoinWords(slot_words);
      spec.positive_trials.push_back({model.model_id, probe.test_id});
      spec.tests.push_back(std::move(probe));
    }
  }

  std::vector<TrialPair> negatives;
  for (const auto& probe : spec.tests) {
    for (const auto& model : spec.models) {
      if (model.speaker_id == probe.speaker_id) continue;
      if (!GendersMatch(model.gender, probe.gender)) continue;
      negatives.push_back({model.model_id, probe.test_id});
    }
  }
  if (options.max_negative_trials > 0 &&
      negatives.size() > options.max_negative_trials) {
    std::vector<std::size_t> idx(negatives.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng = MakeStream(seed, "protocol/negatives");
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(options.max_negative_trials);
    std::sort(idx.begin(), idx.end());
    std::vector<TrialPair> kept;
    kept.reserve(idx.size());
    for (auto i : idx) kept.push_back(negatives[i]);
    negatives.swap(kept);
  }
  spec.negative_trials = std::move(negatives);
  return spec;
}

ProtocolPaths ProtocolPaths::FromPrefix(const std::string& prefix) {
  return {prefix + ".trials.tsv", prefix + ".tests.jsonl",
          prefix + ".models.jsonl"};
}

void WriteTrialList(std::ostream& out, const ProtocolSpec& spec,
                    const Provenance* provenance) {
  if (provenance) out << provenance->TsvLine() << '\n';
  out << "# protocol=" << spec.name << '\n';
  out << "model_id\ttest_id\tlabel\n";
  for (const auto& t : spec.positive_trials) {
    out << t.model_id << '\t' << t.test_id << "\ttarget\n";
  }
  for (const auto& t : spec.negative_trials) {
    out << t.model_id << '\t' << t.test_id << "\tnontarget\n";
  }
}

void WriteTestManifest(std::ostream& out, const ProtocolSpec& spec,
                       const Provenance* provenance) {
  if (provenance) out << provenance->JsonlLine() << '\n';
  for (const auto& t : spec.tests) {
    nlohmann::ordered_json j;
    j["test_id"] = t.test_id;
    j["speaker_id"] = t.speaker_id;
    j["gender"] = t.gender;
    j["source_ids"] = t.source_ids;
    j["transcript"] = t.transcript;
    j["net_speech"] = t.net_speech;
    if (t.clip_target) {
      j["clip_target"] = *t.clip_target;
      j["clip_start_word"] = t.clip_start_word;
      j["clip_word_count"] = t.clip_word_count;
    }
    out << j.dump() << '\n';
  }
}

void WriteModelManifest(std::ostream& out, const ProtocolSpec& spec,
                        const Provenance* provenance) {
  if (provenance) out << provenance->JsonlLine() << '\n';
  for (const auto& m : spec.models) {
    nlohmann::ordered_json j;
    j["model_id"] = m.model_id;
    j["speaker_id"] = m.speaker_id;
    j["gender"] = m.gender;
    j["utterance_ids"] = m.utterance_ids;
    j["net_speech"] = m.net_speech;
    j["transcript"] = m.transcript;
    out << j.dump() << '\n';
  }
}

void EmitProtocol(const ProtocolSpec& spec, const ProtocolPaths& paths,
                  const Provenance* provenance) {
  {
    auto out = OpenOutput(paths.trials);
    WriteTrialList(out, spec, provenance);
    if (!out) throw std::runtime_error("write failed: " + paths.trials);
  }
  {
    auto out = OpenOutput(paths.tests);
    WriteTestManifest(out, spec, provenance);
    if (!out) throw std::runtime_error("write failed: " + paths.tests);
  }
  {
    auto out = OpenOutput(paths.models);
    WriteModelManifest(out, spec, provenance);
    if (!out) throw std::runtime_error("write failed: " + paths.models);
  }
}

void ReadTrialList(std::istream& in, const std::string& source,
                   std::vector<TrialPair>& positive,
                   std::vector<TrialPair>& negative) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = SplitWords(line);
    if (f.size() >= 2 && f[0] == "model_id" && f[1] == "test_id") continue;
    if (f.size() != 3 && f.size() != 4) {
      throw std::runtime_error(fmt::format(
          "{}:{}: expected model_id, test_id, label columns", source,
          line_no));
    }
    Label label;
    try {
      label = ParseLabel(f[2]);
    } catch (const std::exception& e) {
      throw std::runtime_error(
          fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
    (label == Label::kTarget ? positive : negative)
        .push_back({f[0], f[1]});
  }
}

ProtocolSpec ReadProtocol(const ProtocolPaths& paths) {
  ProtocolSpec spec;
  {
    auto in = OpenInput(paths.trials);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("# protocol=", 0) == 0) {
        spec.name = line.substr(11);
        break;
      }
      if (!line.empty() && line[0] != '#') break;
    }
    in.clear();
    in.seekg(0);
    ReadTrialList(in, paths.trials, spec.positive_trials,
                  spec.negative_trials);
  }
  {
    auto in = OpenInput(paths.tests);
    ForEachJsonl(in, paths.tests, [&](std::size_t, const nlohmann::json& j) {
      TestProbe t;
      t.test_id = j.at("test_id").get<std::string>();
      t.speaker_id = j.at("speaker_id").get<std::string>();
      t.gender = j.value("gender", std::string());
      t.source_ids = j.at("source_ids").get<std::vector<std::string>>();
      t.transcript = j.at("transcript").get<std::string>();
      t.net_speech = j.at("net_speech").get<double>();
      if (j.contains("clip_target")) {
        t.clip_target = j["clip_target"].get<double>();
        t.clip_start_word = j.at("clip_start_word").get<std::size_t>();
        t.clip_word_count = j.at("clip_word_count").get<std::size_t>();
      }
      spec.tests.push_back(std::move(t));
    });
  }
  {
    auto in = OpenInput(paths.models);
    ForEachJsonl(in, paths.models, [&](std::size_t, const nlohmann::json& j) {
      EnrollmentModel m;
      m.model_id = j.at("model_id").get<std::string>();
      m.speaker_id = j.at("speaker_id").get<std::string>();
      m.gender = j.value("gender", std::string());
      m.utterance_ids = j.at("utterance_ids").get<std::vector<std::string>>();
      m.net_speech = j.at("net_speech").get<double>();
      m.transcript = j.value("transcript", std::string());
      spec.models.push_back(std::move(m));
    });
  }
  return spec;
}

}  // namespace phonrich
