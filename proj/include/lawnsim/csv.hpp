// Copyright 2026 The lawnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace lawnsim {

/// Shortest round-trippable-enough decimal text for a double ("%.12g"),
/// with "inf"/"-inf"/"nan" spelled out. Output is locale independent.
std::string format_number(double value);

/// Line-oriented CSV writer. Fields are written verbatim; callers are
/// responsible for keeping commas out of text fields.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  void end_row();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_in_row_ = true;
};

/// Splits a CSV file into rows of fields (no quoting support).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace lawnsim
