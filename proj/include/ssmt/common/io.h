/* Copyright 2026 The SSMT Desk Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef SSMT_COMMON_IO_H_
#define SSMT_COMMON_IO_H_

#include <filesystem>
#include <string>
#include <vector>

namespace ssmt {

// Root of the shipped data files (lexicons, marker lists, fixtures).
// $SSMT_DATA_DIR wins over the build-time default.
std::filesystem::path DataDir();

// Whole-file reads. Missing or unreadable files raise ConfigError.
std::string ReadFile(const std::filesystem::path& path);
std::vector<std::string> ReadLines(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& contents);

// Lines with '#' comments and surrounding whitespace removed; blank lines
// dropped. Used for lexicons and word lists.
std::vector<std::string> ReadEntryList(const std::filesystem::path& path);

std::vector<std::string> SplitString(const std::string& s, char sep);
std::string Trim(const std::string& s);

}  // namespace ssmt

#endif  // SSMT_COMMON_IO_H_
