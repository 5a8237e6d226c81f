// Copyright 2026 The dpcdr Authors
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
// The dpcdr command line: publish, verify, train, eval, synth, split and
// bench subcommands over the core library.
//
// Exit codes: 0 success, 1 failed check, 2 usage or I/O error, 3 numeric
// failure.

#ifndef DPCDR_TOOLS_COMMANDS_H_
#define DPCDR_TOOLS_COMMANDS_H_

#include <ostream>

namespace dpcdr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// Parses argv, runs one subcommand and returns its exit code. Messages go
// to out and err; nothing is thrown.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpcdr::cli

#endif  // DPCDR_TOOLS_COMMANDS_H_
