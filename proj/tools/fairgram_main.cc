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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairgram/artifacts.h"
#include "fairgram/augment.h"
#include "fairgram/commands.h"
#include "fairgram/config.h"
#include "fairgram/error.h"
#include "fairgram/oracles.h"
#include "fairgram/parallel.h"

namespace fs = std::filesystem;
using namespace fairgram;

namespace {

constexpr int kExitError = 1;
constexpr int kExitViolations = 3;

struct Globals {
  std::string grammar;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "fairgram-out";
  std::size_t workers = default_workers();
  std::string mut;
  bool fail_on_violations = false;
};

CampaignConfig build_config(const Globals& g) {
  CampaignConfig c = g.config.empty() ? CampaignConfig{} : load_config(g.config);
  if (!g.grammar.empty()) {
    c.grammar_ref = g.grammar;
    c.grammar_path = g.grammar;
  }
  if (g.seed) c.seed = *g.seed;
  if (!g.mut.empty()) set_mut_from_file(c, g.mut);
  return c;
}

void print_file(const fs::path& path) { std::cout << read_text_file(path); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grammar-based fairness testing for NLP models"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--grammar", globals.grammar, "Grammar JSON file");
  app.add_option("--config", globals.config, "Campaign config JSON file");
  app.add_option("--seed", globals.seed, "Campaign seed");
  app.add_option("--out-dir", globals.out_dir, "Directory for artifacts")->capture_default_str();
  app.add_option("--workers", globals.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--mut", globals.mut, "Model spec JSON file");
  app.add_flag("--fail-on-violations", globals.fail_on_violations,
               "Exit with status 3 when violations are found");

  CLI::App* test = app.add_subcommand("test", "Run RAND and PROB phases");
  CLI::App* group = app.add_subcommand("group", "Run a group-fairness campaign");

  CLI::App* diagnose = app.add_subcommand("diagnose", "Recompute diagnosis from a saved state");
  std::string state_path;
  double threshold = 2.0;
  std::string diagnose_out;
  diagnose->add_option("--state", state_path, "state.json (default: <out-dir>/state.json)");
  diagnose->add_option("--threshold", threshold, "Anomaly threshold")->capture_default_str();
  diagnose->add_option("--out", diagnose_out, "Write the table here instead of stdout");

  CLI::App* augment = app.add_subcommand("augment", "Emit a labelled augmentation set");
  AugmentOptions aug;
  std::string label_rules_path;
  std::string augment_out;
  std::string augment_state;
  std::optional<std::uint64_t> augment_seed;
  augment->add_option("--top-k", aug.top_k)->capture_default_str();
  augment->add_option("--percent", aug.percent)->capture_default_str();
  augment->add_option("--base-size", aug.base_size)->required();
  augment->add_option("--label-rules", label_rules_path, "Label rules (default: from grammar)");
  augment->add_option("--seed", augment_seed, "Augmentation seed (default: campaign seed)");
  augment->add_option("--out", augment_out, "Output jsonl (default: <out-dir>/augment.jsonl)");
  augment->add_option("--state", augment_state, "state.json (default: <out-dir>/state.json)");
  augment->add_option("--rule", aug.rule, "Rule restricted to the top-k tokens");

  CLI::App* cov = app.add_subcommand("coverage", "Coverage of saved traces");
  std::string traces_path;
  std::string coverage_out;
  cov->add_option("--traces", traces_path, "traces.jsonl (default: <out-dir>/traces.jsonl)");
  cov->add_option("--out", coverage_out, "Also write the figures as JSON");

  CLI::App* gen = app.add_subcommand("gen-label-rules", "Derive label rules from a grammar");
  std::string gen_out;
  gen->add_option("--out", gen_out, "Write here instead of stdout");

  app.fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out_dir = globals.out_dir;
    if (*test) {
      const CampaignConfig config = build_config(globals);
      const TestRun run = run_test_command(config, out_dir, globals.workers);
      print_file(out_dir / "report.txt");
      for (const PhaseStats& p : run.result.state.phases) {
        for (const std::string& f : p.failure_log) std::cerr << "mut failure: " << f << "\n";
      }
      return globals.fail_on_violations && run.violations > 0 ? kExitViolations : 0;
    }
    if (*group) {
      const CampaignConfig config = build_config(globals);
      const GroupReport report = run_group_command(config, out_dir, globals.workers);
      std::cout << group_summary_table(
          report, config.mut ? mut_kind_name(config.mut->kind) : std::string_view());
      bool any = false;
      for (const ProbeSummary& s : report.summary) any = any || s.violations > 0;
      return globals.fail_on_violations && any ? kExitViolations : 0;
    }
    if (*diagnose) {
      const fs::path path = state_path.empty() ? out_dir / "state.json" : fs::path(state_path);
      const std::string table =
          dump_diagnosis_tsv(diagnose_state(parse_state(read_text_file(path)), threshold));
      if (diagnose_out.empty()) {
        std::cout << table;
      } else {
        write_text_file(diagnose_out, table);
      }
      return 0;
    }
    if (*augment) {
      const CampaignConfig config = build_config(globals);
      const Grammar g = load_config_grammar(config);
      const fs::path path =
          augment_state.empty() ? out_dir / "state.json" : fs::path(augment_state);
      const CampaignState state = parse_state(read_text_file(path));
      const std::vector<LabelRule> rules = label_rules_path.empty()
                                               ? label_rules_from_grammar(g)
                                               : load_label_rules(label_rules_path);
      aug.seed = augment_seed.value_or(state.seed);
      if (aug.rule.empty()) aug.rule = resolve_sensitive(g, config.sensitive);
      const AugmentationSet set =
          build_augmentation(g, diagnose_state(state, config.threshold), rules, aug);
      const fs::path out = augment_out.empty() ? out_dir / "augment.jsonl" : fs::path(augment_out);
      write_text_file(out, augmentation_jsonl(set));
      std::cout << "wrote " << set.records.size() << " records to " << out.string() << "\n";
      std::cout << "source tokens:";
      for (const TerminalId& t : set.source_tokens) std::cout << " " << t.literal;
      std::cout << "\n";
      return 0;
    }
    if (*cov) {
      const CampaignConfig config = build_config(globals);
      const Grammar g = load_config_grammar(config);
      const fs::path path = traces_path.empty() ? out_dir / "traces.jsonl" : fs::path(traces_path);
      const auto rows = coverage_by_phase(g, parse_traces(read_text_file(path)));
      std::cout << format_coverage_table(rows);
      if (!coverage_out.empty()) {
        nlohmann::ordered_json doc = nlohmann::ordered_json::object();
        for (const auto& [name, c] : rows) doc[name] = coverage_json(c);
        write_text_file(coverage_out, doc.dump(2) + "\n");
      }
      return 0;
    }
    if (*gen) {
      const CampaignConfig config = build_config(globals);
      const std::string text = dump_label_rules(label_rules_from_grammar(load_config_grammar(config)));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(gen_out, text);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "fairgram: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "fairgram: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
