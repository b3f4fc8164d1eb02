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
#ifndef SSMT_TOOLS_CLI_H_
#define SSMT_TOOLS_CLI_H_

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace ssmt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

// Runs the `ssmt` command line. `args` excludes the program name. Data goes
// to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Long flags accepted at each command path ("" is the top level, then
// "filter", "filter score", ...), read back from the parser itself.
std::map<std::string, std::vector<std::string>> CliFlagTable();

}  // namespace ssmt

#endif  // SSMT_TOOLS_CLI_H_
