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

#include "fairgram/commands.h"

#include <chrono>

#include "fairgram/artifacts.h"
#include "fairgram/error.h"

namespace fairgram {
namespace {

std::unique_ptr<Model> model_for(const CampaignConfig& config) {
  if (!config.mut) throw Error(ErrorCode::kInvalidArgument, "no model given (--mut or \"mut\")");
  return make_model(*config.mut);
}

}  // namespace

std::vector<std::pair<std::string, CoverageReport>> coverage_by_phase(
    const Grammar& g, const std::vector<TraceRecord>& records) {
  std::vector<std::pair<std::string, CoverageReport>> rows;
  std::vector<DerivationTrace> all;
  for (Phase phase : {Phase::kRand, Phase::kProb}) {
    std::vector<DerivationTrace> traces;
    for (const TraceRecord& r : records) {
      if (r.phase == phase) traces.push_back(r.trace);
    }
    if (traces.empty()) continue;
    rows.emplace_back(std::string(phase_name(phase)), coverage(traces, g));
    all.insert(all.end(), traces.begin(), traces.end());
  }
  rows.emplace_back("all", coverage(all, g));
  return rows;
}

AnomalyReport diagnose_state(const CampaignState& state, double threshold) {
  for (const PhaseStats& p : state.phases) {
    if (p.phase == Phase::kRand) return fault_diagnosis(p.term_err, p.term_count, threshold);
  }
  return fault_diagnosis(state.term_err, state.term_count, threshold);
}

TestRun run_test_command(const CampaignConfig& config, const std::filesystem::path& out_dir,
                         std::size_t workers) {
  const auto started = std::chrono::steady_clock::now();
  const Grammar g = load_config_grammar(config);
  const CampaignOptions opts = campaign_options(config, g, workers);
  const std::unique_ptr<Model> model = model_for(config);

  TestRun run;
  run.result = run_individual_campaign(*model, g, opts);
  const CampaignState& state = run.result.state;
  run.violations = state.s_err.size();

  const std::string traces = dump_traces(state, g);
  CampaignSummary summary;
  summary.config = config_echo(config);
  summary.result = &run.result;
  summary.coverage = coverage_by_phase(g, parse_traces(traces));
  if (config.task == Task::kMlm) {
    const auto counts = violations_by_tau(state, opts.oracle.probes, kTauGrid);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      summary.tau_sweep.emplace_back(kTauGrid[i], counts[i]);
    }
  }

  nlohmann::ordered_json report = campaign_report_json(summary);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  report["timing"] = {{"workers", workers}, {"elapsed_ms", elapsed.count()}};

  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "report.json", report.dump(2) + "\n");
  write_text_file(out_dir / "report.txt", campaign_report_text(summary));
  write_text_file(out_dir / "state.json", dump_state(state));
  write_text_file(out_dir / "unique_tests.jsonl", dump_cases(state, false));
  write_text_file(out_dir / "violations.jsonl", dump_cases(state, true));
  write_text_file(out_dir / "traces.jsonl", traces);
  write_text_file(out_dir / "diagnosis.tsv", dump_diagnosis_tsv(run.result.diagnosis));
  return run;
}

GroupReport run_group_command(const CampaignConfig& config, const std::filesystem::path& out_dir,
                              std::size_t workers) {
  const Grammar g = load_config_grammar(config);
  const std::unique_ptr<Model> model = model_for(config);
  GroupOptions opts;
  opts.task = config.task;
  opts.sensitive = resolve_sensitive(g, config.sensitive);
  opts.iters_per_group = config.iters_per_group;
  opts.probes = config.probes;
  opts.seed = config.seed;
  opts.workers = workers;
  opts.threshold = config.threshold;
  GroupReport report = run_group_campaign(*model, g, opts);

  nlohmann::ordered_json echo = config_echo(config);
  echo.erase("n");
  echo.erase("iters");
  echo.erase("phases");
  echo.erase("prob_rules");
  echo.erase("saturation");
  echo.erase("tau");
  echo["iters_per_group"] = config.iters_per_group;
  echo["probes"] = config.probes;
  const std::string mut = config.mut ? std::string(mut_kind_name(config.mut->kind)) : "";
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "group.json", group_report_json(report, echo, mut).dump(2) + "\n");
  write_text_file(out_dir / "group.tsv", group_report_tsv(report));
  return report;
}

}  // namespace fairgram
