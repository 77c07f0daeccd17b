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

// File formats shared by the command-line tools.
//
//   scores TSV   model_id<TAB>test_id<TAB>label<TAB>raw_score
//   QMF JSONL    {"test_id", "net_speech", "cu", "wcu"?}
//
// Every file the tools write starts with a provenance header: a '#' line in
// TSV files, a {"_provenance": {...}} record in JSONL files. Readers skip
// both, as well as JSONL records whose only key starts with '_'.

#ifndef PHONRICH_IO_H_
#define PHONRICH_IO_H_

#include <cstdint>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "phonrich/metrics.h"

namespace phonrich {

std::string_view ToolkitVersion();

// Lowercase hex SHA-256 of a file's bytes.
std::string FileSha256(const std::string& path);

struct Provenance {
  std::string subcommand;
  std::optional<std::uint64_t> seed;
  // (path as given, sha256)
  std::vector<std::pair<std::string, std::string>> inputs;
  // Extra settings, in insertion order.
  std::vector<std::pair<std::string, std::string>> params;

  void AddInput(const std::string& path);
  void AddParam(std::string key, std::string value);

  // "# phonrich 0.1.0 subcommand=... seed=... input=path@sha256 ..."
  std::string TsvLine() const;
  nlohmann::ordered_json Json() const;
  // {"_provenance": ...} on one line.
  std::string JsonlLine() const;
};

// Formats a real with 17 significant digits.
std::string FormatReal(double v);

void WriteScores(std::ostream& out, const std::vector<TrialRecord>& trials,
                 const Provenance* provenance = nullptr);
std::vector<TrialRecord> ReadScores(std::istream& in,
                                    const std::string& source = "<stream>");
std::vector<TrialRecord> ReadScoresFile(const std::string& path);

// Calls `fn(line_number, record)` for each data record of a JSONL stream,
// skipping blank lines and '_'-prefixed metadata records. Parse errors are
// reported as `source:line: ...`.
void ForEachJsonl(
    std::istream& in, const std::string& source,
    const std::function<void(std::size_t, const nlohmann::json&)>& fn);

void WriteQmfs(std::ostream& out, const QmfTable& qmfs,
               const Provenance* provenance = nullptr);
QmfTable ReadQmfs(std::istream& in, const std::string& source = "<stream>");
QmfTable ReadQmfsFile(const std::string& path);

// Opens for reading/writing or throws std::runtime_error naming the path.
std::ifstream OpenInput(const std::string& path);
std::ofstream OpenOutput(const std::string& path);

}  // namespace phonrich

#endif  // PHONRICH_IO_H_
