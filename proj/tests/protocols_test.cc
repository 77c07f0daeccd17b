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

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "phonrich/io.h"
#include "phonrich/lexicon.h"
#include "phonrich/protocols.h"
#include "phonrich/richness.h"
#include "phonrich/simulator.h"

namespace phonrich {
namespace {

UtteranceRecord Sentence(const std::string& id, const std::string& speaker,
                         const std::vector<std::string>& words,
                         double word_seconds) {
  UtteranceRecord u;
  u.utterance_id = id;
  u.speaker_id = speaker;
  u.kind = UtteranceKind::kSentence;
  for (const auto& w : words) {
    if (!u.transcript.empty()) u.transcript += ' ';
    u.transcript += w;
    u.word_durations.push_back(word_seconds);
    u.net_speech += word_seconds;
  }
  return u;
}

std::vector<std::string> Words(int n) {
  std::vector<std::string> w;
  for (int i = 0; i < n; ++i) w.push_back("w" + std::to_string(i));
  return w;
}

std::vector<std::string> Split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

const std::vector<UtteranceRecord>& ToyCorpus() {
  static const auto* corpus = [] {
    SimConfig config;
    config.n_speakers = 10;
    config.seed = 5;
    return new std::vector<UtteranceRecord>(SynthesizeCorpus(config));
  }();
  return *corpus;
}

TEST(ClipProtocolTest, WholeUtteranceWhenExactlyOneWindow) {
  std::vector<UtteranceRecord> base = {Sentence("u1", "s1", Words(10), 0.5)};
  auto spec = BuildClipProtocol(base, 5.0, 1);
  ASSERT_EQ(spec.tests.size(), 1u);
  const auto& t = spec.tests[0];
  EXPECT_EQ(t.clip_start_word, 0u);
  EXPECT_EQ(t.clip_word_count, 10u);
  EXPECT_EQ(t.transcript, base[0].transcript);
  EXPECT_DOUBLE_EQ(t.net_speech, 5.0);
  EXPECT_EQ(t.clip_target, 5.0);
}

TEST(ClipProtocolTest, ShortUtteranceIsRepeated) {
  std::vector<UtteranceRecord> base = {Sentence("u1", "s1", Words(4), 0.5)};
  std::set<std::size_t> starts;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    auto spec = BuildClipProtocol(base, 3.0, seed);
    const auto& t = spec.tests[0];
    EXPECT_EQ(t.clip_word_count, 6u);
    EXPECT_DOUBLE_EQ(t.net_speech, 3.0);
    auto words = Split(t.transcript);
    ASSERT_EQ(words.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(words[i], "w" + std::to_string((t.clip_start_word + i) % 4));
    }
    starts.insert(t.clip_start_word);
  }
  // Every word boundary is a valid start once the sequence wraps around.
  EXPECT_EQ(starts, (std::set<std::size_t>{0, 1, 2, 3}));
}

TEST(ClipProtocolTest, WindowDurationInvariant) {
  const auto& corpus = ToyCorpus();
  std::vector<UtteranceRecord> sentences;
  for (const auto& u : corpus) {
    if (u.kind == UtteranceKind::kSentence) sentences.push_back(u);
  }
  for (double target : {0.3, 1.0, 2.0, 5.0, 30.0}) {
    auto spec = BuildClipProtocol(sentences, target, 3);
    ASSERT_EQ(spec.tests.size(), sentences.size());
    for (std::size_t i = 0; i < spec.tests.size(); ++i) {
      const auto& t = spec.tests[i];
      const double longest = *std::max_element(
          sentences[i].word_durations.begin(), sentences[i].word_durations.end());
      ASSERT_GE(t.net_speech, target - kDurationEpsilon);
      ASSERT_LT(t.net_speech, target + longest);
    }
  }
}

TEST(ClipProtocolTest, StartsAreUniform) {
  std::vector<UtteranceRecord> base;
  for (int i = 0; i < 6000; ++i) {
    base.push_back(Sentence("u" + std::to_string(i), "s", Words(5), 1.0));
  }
  // Windows of three words: starts 0..2 are valid.
  auto spec = BuildClipProtocol(base, 3.0, 8);
  std::map<std::size_t, int> count;
  for (const auto& t : spec.tests) ++count[t.clip_start_word];
  ASSERT_EQ(count.size(), 3u);
  for (const auto& [start, c] : count) EXPECT_NEAR(c, 2000, 150);
}

TEST(ClipProtocolTest, PassThroughAndOovDiscard) {
  std::vector<UtteranceRecord> base = {
      Sentence("u1", "s1", {"cat", "cat"}, 0.5),
      Sentence("u2", "s2", {"zork", "zork"}, 0.5)};
  Lexicon lexicon;
  lexicon.Add("cat", {"K", "AE", "T"});
  ClipOptions opt;
  opt.lexicon = &lexicon;
  opt.positive_trials = {{"s1", "u1"}, {"s2", "u2"}};
  opt.negative_trials = {{"s2", "u1"}, {"s1", "u2"}};
  auto spec = BuildClipProtocol(base, 0.5, 1, opt);
  ASSERT_EQ(spec.tests.size(), 1u);
  EXPECT_EQ(spec.tests[0].test_id, "u1");
  EXPECT_EQ(spec.positive_trials, (std::vector<TrialPair>{{"s1", "u1"}}));
  EXPECT_EQ(spec.negative_trials, (std::vector<TrialPair>{{"s2", "u1"}}));
  opt.positive_trials.push_back({"s1", "nope"});
  EXPECT_THROW(BuildClipProtocol(base, 0.5, 1, opt), std::invalid_argument);
}

TEST(ClipProtocolTest, Errors) {
  std::vector<UtteranceRecord> none;
  EXPECT_THROW(BuildClipProtocol(none, 1.0, 1), std::invalid_argument);
  std::vector<UtteranceRecord> base = {Sentence("u1", "s1", Words(2), 0.5)};
  EXPECT_THROW(BuildClipProtocol(base, 0.0, 1), std::invalid_argument);
  base[0].word_durations.clear();
  EXPECT_THROW(BuildClipProtocol(base, 1.0, 1), std::invalid_argument);
  std::vector<UtteranceRecord> empty = {Sentence("u1", "s1", {}, 0.5)};
  EXPECT_THROW(BuildClipProtocol(empty, 1.0, 1), std::invalid_argument);
}

TEST(EnrollmentTest, SumsSentences) {
  std::vector<UtteranceRecord> utts = {Sentence("a1", "a", Words(3), 39.0),
                                       Sentence("a2", "a", Words(1), 0.0),
                                       Sentence("b1", "b", Words(2), 1.0)};
  utts[1].net_speech = 0.0;
  utts[1].word_durations = {0.0};
  auto models = BuildEnrollment(utts);
  ASSERT_EQ(models.size(), 2u);
  EXPECT_EQ(models[0].model_id, "a");
  EXPECT_DOUBLE_EQ(models[0].net_speech, 117.0);
  EXPECT_EQ(models[0].utterance_ids, (std::vector<std::string>{"a1", "a2"}));
  UtteranceRecord word = utts[2];
  word.utterance_id = "c_w";
  word.speaker_id = "c";
  word.kind = UtteranceKind::kWord;
  utts.push_back(word);
  EXPECT_THROW(BuildEnrollment(utts), std::invalid_argument);
}

TEST(EnrollmentTest, FullVocabularyEnrollmentHasCu39) {
  const auto& corpus = ToyCorpus();
  auto models = BuildEnrollment(corpus);
  auto lexicon = MakeVocabularyLexicon(DefaultVocabulary());
  for (const auto& m : models) {
    auto p = MakePresenceVector(Transcribe(m.transcript, lexicon),
                                lexicon.inventory());
    EXPECT_EQ(CountUnique(p), 39) << m.model_id;
  }
}

TEST(RepetitiveProtocolTest, ProbeStructure) {
  const auto& corpus = ToyCorpus();
  std::map<std::string, const UtteranceRecord*> by_id;
  for (const auto& u : corpus) by_id[u.utterance_id] = &u;
  RepetitiveOptions opt;
  opt.probes_per_speaker = 300;
  auto spec = BuildRepetitiveProtocol(corpus, 21, opt);
  ASSERT_EQ(spec.tests.size(), 3000u);
  ASSERT_EQ(spec.models.size(), 10u);
  bool saw_minimal = false, saw_maximal = false;
  for (const auto& t : spec.tests) {
    const auto words = Split(t.transcript);
    const std::set<std::string> types(words.begin(), words.end());
    const std::set<std::string> recordings(t.source_ids.begin(),
                                           t.source_ids.end());
    ASSERT_EQ(words.size(), t.source_ids.size());
    ASSERT_GE(words.size(), 2u);
    ASSERT_LE(words.size(), 10u);
    ASSERT_EQ(recordings.size(), t.source_ids.size()) << t.test_id;
    double net = 0.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto* src = by_id.at(t.source_ids[i]);
      ASSERT_EQ(src->kind, UtteranceKind::kWord);
      ASSERT_EQ(src->word_text, words[i]);
      ASSERT_EQ(src->speaker_id, t.speaker_id);
      net += src->net_speech;
    }
    ASSERT_NEAR(t.net_speech, net, 1e-12);
    if (words.size() == 2 && types.size() == 1) saw_minimal = true;
    if (words.size() == 10 && types.size() == 10) saw_maximal = true;
  }
  EXPECT_TRUE(saw_minimal);
  EXPECT_TRUE(saw_maximal);
}

TEST(RepetitiveProtocolTest, MinimalProbeCuMatchesWord) {
  const auto& corpus = ToyCorpus();
  auto lexicon = MakeVocabularyLexicon(DefaultVocabulary());
  RepetitiveOptions opt;
  opt.probes_per_speaker = 200;
  opt.max_words = 2;
  opt.max_unique_words = 1;
  auto spec = BuildRepetitiveProtocol(corpus, 2, opt);
  for (const auto& t : spec.tests) {
    auto words = Split(t.transcript);
    ASSERT_EQ(words.size(), 2u);
    ASSERT_EQ(words[0], words[1]);
    ASSERT_NE(t.source_ids[0], t.source_ids[1]);
    auto probe = MakePresenceVector(Transcribe(t.transcript, lexicon),
                                    lexicon.inventory());
    auto single = MakePresenceVector(Transcribe(words[0], lexicon),
                                     lexicon.inventory());
    ASSERT_EQ(CountUnique(probe), CountUnique(single));
  }
}

TEST(RepetitiveProtocolTest, TrialsAreGenderMatchedAndLabelledBySpeaker) {
  const auto& corpus = ToyCorpus();
  std::map<std::string, std::string> gender;
  for (const auto& u : corpus) gender[u.speaker_id] = u.gender;
  int f = 0, m = 0;
  for (const auto& [spk, g] : gender) (g == "f" ? f : m)++;
  ASSERT_EQ(f, 5);
  ASSERT_EQ(m, 5);
  RepetitiveOptions opt;
  opt.probes_per_speaker = 20;
  auto spec = BuildRepetitiveProtocol(corpus, 4, opt);
  std::map<std::string, std::string> test_speaker;
  for (const auto& t : spec.tests) test_speaker[t.test_id] = t.speaker_id;
  EXPECT_EQ(spec.positive_trials.size(), 200u);
  // Each probe against the four other same-gender speakers.
  EXPECT_EQ(spec.negative_trials.size(), 800u);
  for (const auto& p : spec.positive_trials) {
    EXPECT_EQ(p.model_id, test_speaker.at(p.test_id));
  }
  std::set<TrialPair> positives(spec.positive_trials.begin(),
                                spec.positive_trials.end());
  for (const auto& n : spec.negative_trials) {
    EXPECT_NE(n.model_id, test_speaker.at(n.test_id));
    EXPECT_EQ(gender.at(n.model_id), gender.at(test_speaker.at(n.test_id)));
    EXPECT_FALSE(positives.contains(n));
  }
}

TEST(RepetitiveProtocolTest, NegativeCapSubsamples) {
  RepetitiveOptions opt;
  opt.probes_per_speaker = 20;
  opt.max_negative_trials = 123;
  auto a = BuildRepetitiveProtocol(ToyCorpus(), 4, opt);
  auto b = BuildRepetitiveProtocol(ToyCorpus(), 4, opt);
  EXPECT_EQ(a.negative_trials.size(), 123u);
  EXPECT_EQ(a, b);
  std::set<TrialPair> unique(a.negative_trials.begin(), a.negative_trials.end());
  EXPECT_EQ(unique.size(), 123u);
}

TEST(RepetitiveProtocolTest, TooFewRecordingsFails) {
  auto corpus = ToyCorpus();
  // Keep a single recording per word: no probe can repeat a word.
  std::erase_if(corpus, [](const UtteranceRecord& u) {
    return u.kind == UtteranceKind::kWord && u.repetition_index > 1;
  });
  RepetitiveOptions opt;
  opt.probes_per_speaker = 50;
  opt.max_words = 2;
  opt.max_unique_words = 1;
  EXPECT_THROW(BuildRepetitiveProtocol(corpus, 1, opt), std::invalid_argument);
}

TEST(RepetitiveProtocolTest, MissingSentencesFails) {
  auto corpus = ToyCorpus();
  std::erase_if(corpus, [](const UtteranceRecord& u) {
    return u.kind == UtteranceKind::kSentence && u.speaker_id == "spk003";
  });
  EXPECT_THROW(BuildRepetitiveProtocol(corpus, 1), std::invalid_argument);
}

std::string Emit(const ProtocolSpec& spec) {
  std::ostringstream out;
  WriteTrialList(out, spec);
  WriteTestManifest(out, spec);
  WriteModelManifest(out, spec);
  return out.str();
}

TEST(EmitProtocolTest, ByteStableForSameSeed) {
  RepetitiveOptions opt;
  opt.probes_per_speaker = 30;
  auto a = BuildRepetitiveProtocol(ToyCorpus(), 77, opt);
  auto b = BuildRepetitiveProtocol(ToyCorpus(), 77, opt);
  auto c = BuildRepetitiveProtocol(ToyCorpus(), 78, opt);
  EXPECT_EQ(Emit(a), Emit(b));
  EXPECT_NE(Emit(a), Emit(c));
}

TEST(EmitProtocolTest, EmptySpecIsHeaderOnly) {
  ProtocolSpec spec;
  spec.name = "empty";
  std::ostringstream trials, tests, models;
  WriteTrialList(trials, spec);
  WriteTestManifest(tests, spec);
  WriteModelManifest(models, spec);
  EXPECT_EQ(trials.str(), "# protocol=empty\nmodel_id\ttest_id\tlabel\n");
  EXPECT_EQ(tests.str(), "");
  EXPECT_EQ(models.str(), "");
}

TEST(EmitProtocolTest, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("phonrich_protocols_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  RepetitiveOptions opt;
  opt.probes_per_speaker = 15;
  auto rep = BuildRepetitiveProtocol(ToyCorpus(), 3, opt);
  auto paths = ProtocolPaths::FromPrefix((dir / "rep").string());
  Provenance prov;
  prov.subcommand = "test";
  prov.seed = 3;
  EmitProtocol(rep, paths, &prov);
  EXPECT_EQ(ReadProtocol(paths), rep);

  std::vector<UtteranceRecord> sentences;
  for (const auto& u : ToyCorpus()) {
    if (u.kind == UtteranceKind::kSentence) sentences.push_back(u);
  }
  ClipOptions copt;
  copt.name = "clip2s";
  copt.models = BuildEnrollment(ToyCorpus());
  copt.positive_trials = {{"spk000", "spk000_sent01"}};
  copt.negative_trials = {{"spk002", "spk000_sent01"}};
  auto clip = BuildClipProtocol(sentences, 2.0, 9, copt);
  auto cpaths = ProtocolPaths::FromPrefix((dir / "clip").string());
  EmitProtocol(clip, cpaths);
  EXPECT_EQ(ReadProtocol(cpaths), clip);
  std::filesystem::remove_all(dir);
}

TEST(UtteranceInventoryTest, RoundTripAndValidation) {
  std::vector<UtteranceRecord> corpus(ToyCorpus().begin(),
                                      ToyCorpus().begin() + 50);
  std::stringstream buf;
  WriteUtteranceInventory(buf, corpus);
  auto back = ReadUtteranceInventory(buf);
  ASSERT_EQ(back.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(back[i].utterance_id, corpus[i].utterance_id);
    EXPECT_EQ(back[i].net_speech, corpus[i].net_speech);
    EXPECT_EQ(back[i].word_durations, corpus[i].word_durations);
    EXPECT_EQ(back[i].kind, corpus[i].kind);
  }
  std::stringstream dup;
  corpus.push_back(corpus.front());
  WriteUtteranceInventory(dup, corpus);
  EXPECT_THROW(ReadUtteranceInventory(dup), std::runtime_error);
  std::stringstream bad;
  corpus.pop_back();
  corpus[0].net_speech = 0.0;
  WriteUtteranceInventory(bad, corpus);
  EXPECT_THROW(ReadUtteranceInventory(bad), std::runtime_error);
}

}  // namespace
}  // namespace phonrich
