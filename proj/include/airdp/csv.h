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

#ifndef AIRDP_CSV_H_
#define AIRDP_CSV_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/strings/string_view.h"

namespace airdp {

// 17 significant digits, which parses back to the same double. Non-finite
// values print as "inf", "-inf" or "nan".
std::string FormatDouble(double x);

// Builds a CSV document: "# " comment lines, one header row, data rows and
// trailing comment lines.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void AddComment(absl::string_view text);
  void AddFooter(absl::string_view text);

  // Cells are converted by the caller; the row length must match the header.
  void AddRow(std::vector<std::string> cells);

  std::string ToString() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> footers_;
};

// "# airdp <version>" and "# config: <json>" lines for an output file.
void AddProvenance(CsvWriter& writer, absl::string_view resolved_json);

}  // namespace airdp

#endif  // AIRDP_CSV_H_
