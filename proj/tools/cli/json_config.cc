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

#include "json_config.h"

#include "json.hpp"

namespace dpcdr::cli {
namespace {

using nlohmann::json;

// Numbers and booleans keep their JSON type; everything else is a string.
json scalar(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (!text.empty() && json::accept(text)) {
    json parsed = json::parse(text);
    if (parsed.is_number()) return parsed;
  }
  return text;
}

std::string option_key(const CLI::Option* opt) {
  if (!opt->get_lnames().empty()) return opt->get_lnames().front();
  return opt->get_name(false, true);
}

json app_to_json(const CLI::App* app) {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (!opt->get_configurable()) continue;
    const std::string key = option_key(opt);
    if (key.empty() || key == "help" || key == "config") continue;
    std::vector<std::string> values;
    if (opt->count() > 0) {
      values = opt->results();
    } else if (!opt->get_default_str().empty()) {
      values = {opt->get_default_str()};
    } else {
      continue;
    }
    if (opt->get_expected_max() > 1) {
      // Defaults of vector options are captured as "[a,b,c]".
      if (opt->count() == 0 && values.size() == 1 && values[0].size() >= 2 &&
          values[0].front() == '[' && values[0].back() == ']') {
        std::vector<std::string> split;
        std::string item;
        for (char c : values[0].substr(1, values[0].size() - 2)) {
          if (c == ',') {
            split.push_back(item);
            item.clear();
          } else if (c != ' ') {
            item += c;
          }
        }
        if (!item.empty()) split.push_back(item);
        values = split;
      }
      json arr = json::array();
      for (const auto& v : values) arr.push_back(scalar(v));
      out[key] = arr;
    } else if (opt->get_type_size() == 0 && values.size() == 1) {
      out[key] = values[0] == "true" || values[0] == "1";
    } else {
      out[key] = scalar(values.back());
    }
  }
  for (const CLI::App* sub : app->get_subcommands()) {
    out[sub->get_name()] = app_to_json(sub);
  }
  return out;
}

void flatten(const json& node, std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& items) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const json& value = it.value();
    if (value.is_object()) {
      parents.push_back(it.key());
      flatten(value, parents, items);
      parents.pop_back();
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = it.key();
    auto text = [](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      return v.dump();
    };
    if (value.is_null()) continue;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(text(v));
    } else {
      item.inputs.push_back(text(value));
    }
    items.push_back(std::move(item));
  }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool, bool, std::string) const {
  return app_to_json(app).dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json root;
  try {
    root = json::parse(input);
  } catch (const json::parse_error& e) {
    throw CLI::ConversionError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw CLI::ConversionError("config", "top level must be an object");
  std::vector<CLI::ConfigItem> items;
  std::vector<std::string> parents;
  flatten(root, parents, items);
  return items;
}

}  // namespace dpcdr::cli
