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

// JSON config files for CLI11. Top-level keys are global options; a nested
// object named after a subcommand holds that subcommand's options:
//
//   {"seed": 7, "publish": {"epsilon": 8, "transform": "sjlt"}}

#ifndef DPCDR_TOOLS_JSON_CONFIG_H_
#define DPCDR_TOOLS_JSON_CONFIG_H_

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace dpcdr::cli {

class JsonConfig : public CLI::Config {
 public:
  // Every option of the app and of its selected subcommands with its
  // current value (or default), keys sorted.
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace dpcdr::cli

#endif  // DPCDR_TOOLS_JSON_CONFIG_H_
