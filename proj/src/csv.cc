// Copyright 2026 The airdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "airdp/csv.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "airdp/version.h"

namespace airdp {

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.17g", x);
}

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvWriter::AddComment(absl::string_view text) {
  comments_.emplace_back(text);
}

void CsvWriter::AddFooter(absl::string_view text) {
  footers_.emplace_back(text);
}

void CsvWriter::AddRow(std::vector<std::string> cells) {
  cells.resize(columns_.size());
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::ToString() const {
  std::string out;
  for (const std::string& c : comments_) absl::StrAppend(&out, "# ", c, "\n");
  absl::StrAppend(&out, absl::StrJoin(columns_, ","), "\n");
  for (const auto& row : rows_) {
    absl::StrAppend(&out, absl::StrJoin(row, ","), "\n");
  }
  for (const std::string& f : footers_) absl::StrAppend(&out, "# ", f, "\n");
  return out;
}

void AddProvenance(CsvWriter& writer, absl::string_view resolved_json) {
  writer.AddComment(absl::StrCat("airdp ", kVersion));
  writer.AddComment(absl::StrCat("config: ", resolved_json));
}

}  // namespace airdp
