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

#include "phonrich/io.h"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace phonrich {

std::string_view ToolkitVersion() { return PHONRICH_VERSION; }

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path);
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

std::string FileSha256(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(),
                       static_cast<std::size_t>(in.gcount()));
    }
  }
  if (in.bad()) throw std::runtime_error("read error on " + path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void Provenance::AddInput(const std::string& path) {
  inputs.emplace_back(path, FileSha256(path));
}

void Provenance::AddParam(std::string key, std::string value) {
  params.emplace_back(std::move(key), std::move(value));
}

std::string Provenance::TsvLine() const {
  std::string line = fmt::format("# phonrich {} subcommand={}",
                                 ToolkitVersion(), subcommand);
  if (seed) line += fmt::format(" seed={}", *seed);
  for (const auto& [k, v] : params) line += fmt::format(" {}={}", k, v);
  for (const auto& [path, sha] : inputs) {
    line += fmt::format(" input={}@sha256:{}", path, sha);
  }
  return line;
}

nlohmann::ordered_json Provenance::Json() const {
  nlohmann::ordered_json j;
  j["tool"] = "phonrich";
  j["version"] = ToolkitVersion();
  j["subcommand"] = subcommand;
  if (seed) j["seed"] = *seed;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  nlohmann::ordered_json in = nlohmann::ordered_json::array();
  for (const auto& [path, sha] : inputs) {
    in.push_back({{"path", path}, {"sha256", sha}});
  }
  j["inputs"] = in;
  return j;
}

std::string Provenance::JsonlLine() const {
  nlohmann::ordered_json j;
  j["_provenance"] = Json();
  return j.dump();
}

std::string FormatReal(double v) { return fmt::format("{:.17g}", v); }

void WriteScores(std::ostream& out, const std::vector<TrialRecord>& trials,
                 const Provenance* provenance) {
  if (provenance) out << provenance->TsvLine() << '\n';
  out << "model_id\ttest_id\tlabel\traw_score\n";
  for (const auto& t : trials) {
    out << t.model_id << '\t' << t.test_id << '\t' << LabelName(t.label)
        << '\t' << FormatReal(t.raw_score) << '\n';
  }
}

std::vector<TrialRecord> ReadScores(std::istream& in,
                                    const std::string& source) {
  std::vector<TrialRecord> trials;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string field;
    while (ss >> field) f.push_back(field);
    if (f.size() == 4 && f[0] == "model_id" && f[1] == "test_id") continue;
    auto fail = [&](const std::string& what) {
      return std::runtime_error(
          fmt::format("{}:{}: {}", source, line_no, what));
    };
    if (f.size() != 4) {
      throw fail(fmt::format("expected 4 columns, found {}", f.size()));
    }
    TrialRecord t;
    t.model_id = f[0];
    t.test_id = f[1];
    try {
      t.label = ParseLabel(f[2]);
      std::size_t used = 0;
      t.raw_score = std::stod(f[3], &used);
      if (used != f[3].size()) throw std::invalid_argument(f[3]);
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
    if (!std::isfinite(t.raw_score)) throw fail("score is not finite");
    if (!seen.emplace(t.model_id, t.test_id).second) {
      throw fail(fmt::format("duplicate trial {} {}", t.model_id, t.test_id));
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

std::vector<TrialRecord> ReadScoresFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadScores(in, path);
}

void ForEachJsonl(
    std::istream& in, const std::string& source,
    const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(fmt::format("{}:{}: malformed JSON: {}", source,
                                           line_no, e.what()));
    }
    if (!j.is_object()) {
      throw std::runtime_error(
          fmt::format("{}:{}: expected a JSON object", source, line_no));
    }
    if (j.size() == 1 && j.begin().key().starts_with("_")) continue;
    try {
      fn(line_no, j);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(
          fmt::format("{}:{}: {}", source, line_no, e.what()));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(
          fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
}

void WriteQmfs(std::ostream& out, const QmfTable& qmfs,
               const Provenance* provenance) {
  if (provenance) out << provenance->JsonlLine() << '\n';
  for (const auto& [id, q] : qmfs) {
    nlohmann::ordered_json j;
    j["test_id"] = id;
    j["net_speech"] = q.net_speech;
    j["cu"] = static_cast<int>(q.cu);
    if (q.wcu) j["wcu"] = *q.wcu;
    out << j.dump() << '\n';
  }
}

QmfTable ReadQmfs(std::istream& in, const std::string& source) {
  QmfTable table;
  ForEachJsonl(in, source, [&](std::size_t, const nlohmann::json& j) {
    QmfRecord q;
    std::string id = j.at("test_id").get<std::string>();
    q.net_speech = j.at("net_speech").get<double>();
    q.cu = j.at("cu").get<double>();
    if (j.contains("wcu") && !j["wcu"].is_null()) {
      q.wcu = j["wcu"].get<double>();
    }
    if (!table.emplace(id, q).second) {
      throw std::invalid_argument("duplicate QMF record for '" + id + "'");
    }
  });
  return table;
}

QmfTable ReadQmfsFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadQmfs(in, path);
}

}  // namespace phonrich
