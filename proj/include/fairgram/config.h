// Copyright 2026 The Fairgram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairgram/campaign.h"
#include "fairgram/grammar.h"
#include "fairgram/mut.h"
#include "json.hpp"

namespace fairgram {

struct CampaignConfig {
  std::filesystem::path grammar_path;  // resolved
  std::string grammar_ref;             // as written, echoed in reports
  Task task = Task::kSa;
  std::size_t n = 2;
  std::uint64_t iters = 1000;
  std::uint64_t seed = 0;
  double tau = 0.1;
  std::vector<Phase> phases = {Phase::kRand, Phase::kProb};
  std::optional<MutSpec> mut;
  nlohmann::ordered_json mut_echo;
  std::vector<std::string> prob_rules;
  std::optional<std::map<std::string, std::vector<std::size_t>, std::less<>>> bias;
  std::string sensitive;
  double threshold = 2.0;
  bool saturation = false;
  std::optional<std::filesystem::path> label_rules;
  std::string label_rules_ref;
  std::size_t iters_per_group = 150;
  std::vector<std::string> probes = {"his", "her"};
};

// Paths inside the document resolve against `base_dir`.
CampaignConfig parse_config(const std::string& json, const std::filesystem::path& base_dir);
CampaignConfig load_config(const std::filesystem::path& path);

// Reads a mut spec file and stores it in `config`.
void set_mut_from_file(CampaignConfig& config, const std::filesystem::path& path);

// Grammar with the config's bias and prob_rules overrides applied.
Grammar load_config_grammar(const CampaignConfig& config);

CampaignOptions campaign_options(const CampaignConfig& config, const Grammar& g,
                                 std::size_t workers);

// Deterministic echo of the campaign-defining settings.
nlohmann::ordered_json config_echo(const CampaignConfig& config);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fairgram
