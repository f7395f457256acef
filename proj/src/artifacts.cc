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

#include "fairgram/artifacts.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fairgram/error.h"
#include "fairgram/mut.h"

namespace fairgram {
namespace {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

constexpr std::string_view kStateFormat = "fairgram-state";
constexpr int kStateVersion = 1;

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptArtifact, what);
}

json parse_doc(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    corrupt(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& doc, const char* key, const char* what) {
  if (!doc.is_object() || !doc.contains(key)) {
    corrupt(std::string(what) + ": missing \"" + key + "\"");
  }
  return doc.at(key);
}

template <typename T>
T get(const json& doc, const char* key, const char* what) {
  try {
    return field(doc, key, what).get<T>();
  } catch (const json::exception& e) {
    corrupt(std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

std::string fixed(double x, int digits = 6) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

ojson counts_json(const TokenCountMap& map) {
  ojson out = ojson::array();
  for (const auto& [t, c] : map.entries()) out.push_back({t.rule, t.literal, c});
  return out;
}

TokenCountMap counts_from(const json& list, const char* what) {
  if (!list.is_array()) corrupt(std::string(what) + ": count map must be a list");
  TokenCountMap map;
  for (const json& row : list) {
    if (!row.is_array() || row.size() != 3 || !row[0].is_string() || !row[1].is_string() ||
        !row[2].is_number_unsigned()) {
      corrupt(std::string(what) + ": count rows are [rule, literal, count]");
    }
    map.add({row[0].get<std::string>(), row[1].get<std::string>()}, row[2].get<std::uint64_t>());
  }
  return map;
}

void check_bounded(const TokenCountMap& err, const TokenCountMap& count, const char* what) {
  for (const auto& [t, e] : err.entries()) {
    if (e > count.get(t)) corrupt(std::string(what) + ": error count exceeds count");
  }
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> out;
  std::string current;
  for (char c : key) {
    if (c == '\x1e') {
      out.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  return out;
}

ojson keys_json(const std::set<std::string>& keys) {
  ojson out = ojson::array();
  for (const std::string& k : keys) out.push_back(split_key(k));
  return out;
}

std::set<std::string> keys_from(const json& list, const char* what) {
  if (!list.is_array()) corrupt(std::string(what) + ": key set must be a list");
  std::set<std::string> keys;
  for (const json& entry : list) {
    TestCase tc;
    try {
      tc.sentences = entry.get<std::vector<std::string>>();
    } catch (const json::exception&) {
      corrupt(std::string(what) + ": keys are sentence lists");
    }
    keys.insert(tc.dedup_key());
  }
  return keys;
}

ojson output_record(const TaskOutput& out) {
  ojson o;
  o[std::string(task_name(task_of(out)))] = ojson::parse(output_to_json(out).dump());
  return o;
}

TaskOutput output_from_record(const json& rec) {
  if (!rec.is_object() || rec.size() != 1) corrupt("cases: output must be {task: payload}");
  try {
    return output_from_json(parse_task(rec.begin().key()), rec.begin().value());
  } catch (const Error& e) {
    corrupt(std::string("cases: ") + e.what());
  }
}

template <typename Fn>
void for_each_line(std::string_view text, const char* what, Fn&& fn) {
  if (!text.empty() && text.back() != '\n') corrupt(std::string(what) + ": truncated last line");
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view line = text.substr(start, end - start);
    if (!line.empty()) fn(parse_doc(line, what));
    start = end + 1;
  }
}

ojson phase_json(const PhaseStats& p) {
  ojson o;
  o["phase"] = phase_name(p.phase);
  o["iterations"] = p.iterations;
  o["unique"] = p.unique;
  o["duplicates"] = p.duplicates;
  o["violations"] = p.violations;
  o["error_rate"] = p.error_rate();
  o["mut_failures"] = p.mut_failures;
  o["prediction_errors"] = p.prediction_errors;
  o["saturated"] = p.saturated;
  return o;
}

}  // namespace

ojson index_json(const std::optional<double>& index) {
  if (!index) return nullptr;
  if (std::isinf(*index)) return *index > 0 ? "inf" : "-inf";
  return *index;
}

std::string dump_state(const CampaignState& state) {
  ojson doc;
  doc["format"] = kStateFormat;
  doc["version"] = kStateVersion;
  doc["seed"] = state.seed;
  ojson cursor = ojson::object();
  for (const auto& [phase, next] : state.cursor) cursor[std::string(phase_name(phase))] = next;
  doc["cursor"] = cursor;
  doc["term_count"] = counts_json(state.term_count);
  doc["term_err"] = counts_json(state.term_err);
  doc["unique"] = keys_json(state.s_count);
  doc["errors"] = keys_json(state.s_err);
  ojson phases = ojson::array();
  for (const PhaseStats& p : state.phases) {
    ojson o = phase_json(p);
    o.erase("error_rate");
    o["failure_log"] = p.failure_log;
    o["term_count"] = counts_json(p.term_count);
    o["term_err"] = counts_json(p.term_err);
    phases.push_back(std::move(o));
  }
  doc["phases"] = phases;
  return doc.dump(1) + "\n";
}

CampaignState parse_state(std::string_view text) {
  const char* what = "state";
  const json doc = parse_doc(text, what);
  if (get<std::string>(doc, "format", what) != kStateFormat ||
      get<int>(doc, "version", what) != kStateVersion) {
    corrupt("state: unknown format or version");
  }
  CampaignState s;
  s.seed = get<std::uint64_t>(doc, "seed", what);
  const json& cursor = field(doc, "cursor", what);
  if (!cursor.is_object()) corrupt("state: cursor must be an object");
  for (const auto& [name, next] : cursor.items()) {
    try {
      s.cursor[parse_phase(name)] = next.get<std::uint64_t>();
    } catch (const std::exception&) {
      corrupt("state: bad cursor entry '" + name + "'");
    }
  }
  s.term_count = counts_from(field(doc, "term_count", what), what);
  s.term_err = counts_from(field(doc, "term_err", what), what);
  check_bounded(s.term_err, s.term_count, what);
  s.s_count = keys_from(field(doc, "unique", what), what);
  s.s_err = keys_from(field(doc, "errors", what), what);
  for (const std::string& k : s.s_err) {
    if (s.s_count.count(k) == 0) corrupt("state: violating case missing from unique set");
  }
  const json& phases = field(doc, "phases", what);
  if (!phases.is_array()) corrupt("state: phases must be a list");
  for (const json& p : phases) {
    PhaseStats st;
    try {
      st.phase = parse_phase(get<std::string>(p, "phase", what));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptArtifact) throw;
      corrupt(std::string("state: ") + e.what());
    }
    st.iterations = get<std::uint64_t>(p, "iterations", what);
    st.unique = get<std::uint64_t>(p, "unique", what);
    st.duplicates = get<std::uint64_t>(p, "duplicates", what);
    st.violations = get<std::uint64_t>(p, "violations", what);
    st.mut_failures = get<std::uint64_t>(p, "mut_failures", what);
    st.prediction_errors = get<std::uint64_t>(p, "prediction_errors", what);
    st.saturated = get<bool>(p, "saturated", what);
    st.failure_log = get<std::vector<std::string>>(p, "failure_log", what);
    st.term_count = counts_from(field(p, "term_count", what), what);
    st.term_err = counts_from(field(p, "term_err", what), what);
    check_bounded(st.term_err, st.term_count, what);
    if (st.violations > st.unique) corrupt("state: more violations than test cases");
    s.phases.push_back(std::move(st));
  }
  return s;
}

std::string dump_cases(const CampaignState& state, bool violations_only) {
  std::string out;
  for (const CaseOutcome& c : state.cases) {
    if (violations_only && !c.violation) continue;
    ojson o;
    o["phase"] = phase_name(c.phase);
    o["iteration"] = c.iteration;
    o["sentences"] = c.test.sentences;
    o["sensitive_rule"] = c.test.sensitive_rule;
    o["sensitive_choices"] = c.test.sensitive_choices;
    o["violation"] = c.violation;
    if (!c.prediction_errors.empty()) o["prediction_errors"] = c.prediction_errors;
    ojson outputs = ojson::array();
    for (const TaskOutput& t : c.outputs) outputs.push_back(output_record(t));
    o["outputs"] = outputs;
    out += o.dump();
    out += '\n';
  }
  return out;
}

std::vector<CaseOutcome> parse_cases(std::string_view text) {
  const char* what = "cases";
  std::vector<CaseOutcome> out;
  for_each_line(text, what, [&](const json& doc) {
    CaseOutcome c;
    try {
      c.phase = parse_phase(get<std::string>(doc, "phase", what));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptArtifact) throw;
      corrupt(std::string("cases: ") + e.what());
    }
    c.iteration = get<std::uint64_t>(doc, "iteration", what);
    c.test.sentences = get<std::vector<std::string>>(doc, "sentences", what);
    c.test.sensitive_rule = get<std::string>(doc, "sensitive_rule", what);
    c.test.sensitive_choices = get<std::vector<std::string>>(doc, "sensitive_choices", what);
    c.violation = get<bool>(doc, "violation", what);
    if (doc.contains("prediction_errors")) {
      c.prediction_errors = get<std::vector<bool>>(doc, "prediction_errors", what);
    }
    const json& outputs = field(doc, "outputs", what);
    if (!outputs.is_array()) corrupt("cases: outputs must be a list");
    for (const json& o : outputs) c.outputs.push_back(output_from_record(o));
    out.push_back(std::move(c));
  });
  return out;
}

std::string dump_traces(const CampaignState& state, const Grammar& g) {
  std::string out;
  for (const CaseOutcome& c : state.cases) {
    for (std::size_t i = 0; i < c.test.traces.size(); ++i) {
      const DerivationTrace& t = c.test.traces[i];
      verify_trace(g, t);
      ojson o;
      o["phase"] = phase_name(c.phase);
      o["iteration"] = c.iteration;
      o["sentence"] = i;
      o["text"] = t.sentence;
      ojson choices = ojson::array();
      for (const Choice& ch : t.choices) {
        choices.push_back({ch.rule, ch.alternative, ch.leaf ? ojson(*ch.leaf) : ojson(nullptr)});
      }
      o["choices"] = choices;
      out += o.dump();
      out += '\n';
    }
  }
  return out;
}

std::vector<TraceRecord> parse_traces(std::string_view text) {
  const char* what = "traces";
  std::vector<TraceRecord> out;
  for_each_line(text, what, [&](const json& doc) {
    TraceRecord r;
    try {
      r.phase = parse_phase(get<std::string>(doc, "phase", what));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptArtifact) throw;
      corrupt(std::string("traces: ") + e.what());
    }
    r.iteration = get<std::uint64_t>(doc, "iteration", what);
    r.sentence = get<std::size_t>(doc, "sentence", what);
    r.trace.sentence = get<std::string>(doc, "text", what);
    const json& choices = field(doc, "choices", what);
    if (!choices.is_array()) corrupt("traces: choices must be a list");
    for (const json& ch : choices) {
      if (!ch.is_array() || ch.size() != 3 || !ch[0].is_string() || !ch[1].is_number_unsigned() ||
          !(ch[2].is_string() || ch[2].is_null())) {
        corrupt("traces: choices are [rule, alternative, leaf]");
      }
      Choice c{ch[0].get<std::string>(), ch[1].get<std::size_t>(), std::nullopt};
      if (ch[2].is_string()) c.leaf = ch[2].get<std::string>();
      r.trace.choices.push_back(std::move(c));
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::string dump_diagnosis_tsv(const AnomalyReport& report) {
  std::string out = "rule\tterminal\tcount\terr\trate\tindex\tflagged\n";
  for (const TokenDiagnosis& t : report.tokens) {
    out += t.terminal.rule + '\t' + t.terminal.literal + '\t' + std::to_string(t.count) + '\t' +
           std::to_string(t.err) + '\t' + fixed(t.rate) + '\t' +
           (t.index ? fixed(*t.index) : std::string()) + '\t' + (t.flagged ? "yes" : "no") +
           '\n';
  }
  return out;
}

AnomalyReport parse_diagnosis_tsv(std::string_view text, double threshold) {
  AnomalyReport report;
  report.threshold = threshold;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "rule\tterminal\tcount\terr\trate\tindex\tflagged") {
    corrupt("diagnosis: missing header");
  }
  std::map<std::string, bool> scored;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 7) corrupt("diagnosis: expected 7 columns");
    TokenDiagnosis t;
    t.terminal = {cols[0], cols[1]};
    try {
      t.count = std::stoull(cols[2]);
      t.err = std::stoull(cols[3]);
      if (!cols[5].empty()) {
        t.index = cols[5] == "inf"    ? std::numeric_limits<double>::infinity()
                  : cols[5] == "-inf" ? -std::numeric_limits<double>::infinity()
                                      : std::stod(cols[5]);
      }
    } catch (const std::exception&) {
      corrupt("diagnosis: bad number in row for '" + cols[1] + "'");
    }
    if (t.count == 0 || t.err > t.count) corrupt("diagnosis: inconsistent counts");
    if (cols[6] != "yes" && cols[6] != "no") corrupt("diagnosis: flagged must be yes or no");
    t.rate = static_cast<double>(t.err) / static_cast<double>(t.count);
    t.flagged = cols[6] == "yes";
    scored[t.terminal.rule] = scored[t.terminal.rule] || t.index.has_value();
    report.tokens.push_back(std::move(t));
  }
  if (!text.empty() && text.back() != '\n') corrupt("diagnosis: truncated last line");
  for (const auto& [rule, has_index] : scored) {
    if (!has_index) report.insufficient_rules.push_back(rule);
  }
  return report;
}

ojson coverage_json(const CoverageReport& c) {
  ojson o;
  o["terminals_covered"] = c.terminals_covered;
  o["terminals_total"] = c.terminals_total;
  o["terminal_coverage"] = c.terminal_ratio();
  o["pairs_covered"] = c.pairs_covered;
  o["pairs_total"] = c.pairs_total;
  o["pair_coverage"] = c.pair_ratio();
  return o;
}

std::string format_coverage_table(
    const std::vector<std::pair<std::string, CoverageReport>>& rows) {
  std::string out = "phase  terminals        terminal%  pairs              pair%\n";
  for (const auto& [name, c] : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6s %6zu / %-6zu  %8.2f  %7zu / %-7zu  %7.2f\n",
                  name.c_str(), c.terminals_covered, c.terminals_total,
                  100.0 * c.terminal_ratio(), c.pairs_covered, c.pairs_total,
                  100.0 * c.pair_ratio());
    out += buf;
  }
  return out;
}

ojson campaign_report_json(const CampaignSummary& summary) {
  const CampaignResult& r = *summary.result;
  ojson doc;
  doc["tool"] = "fairgram";
  doc["config"] = summary.config;
  doc["seed"] = r.state.seed;
  ojson phases = ojson::array();
  std::optional<double> rand_rate;
  std::optional<double> prob_rate;
  for (const PhaseStats& p : r.state.phases) {
    phases.push_back(phase_json(p));
    if (p.phase == Phase::kRand) rand_rate = p.error_rate();
    if (p.phase == Phase::kProb) prob_rate = p.error_rate();
  }
  doc["phases"] = phases;
  ojson total;
  total["unique"] = r.state.s_count.size();
  total["violations"] = r.state.s_err.size();
  total["error_rate"] = r.state.s_count.empty() ? 0.0
                                                : static_cast<double>(r.state.s_err.size()) /
                                                      static_cast<double>(r.state.s_count.size());
  doc["total"] = total;
  if (rand_rate && prob_rate && *rand_rate > 0.0) doc["prob_over_rand"] = *prob_rate / *rand_rate;

  ojson weights = ojson::object();
  for (const auto& [rule, row] : r.prob_weights.weights) {
    bool uniform = true;
    double first = -1.0;
    for (double x : row) {
      if (x == 0.0) continue;
      if (first < 0.0) first = x;
      uniform = uniform && std::fabs(x - first) < 1e-15;
    }
    if (uniform) continue;
    weights[rule] = row;
  }
  doc["prob_weights"] = weights;

  ojson diag;
  diag["threshold"] = r.diagnosis.threshold;
  ojson flagged = ojson::array();
  for (const TokenDiagnosis& t : r.diagnosis.tokens) {
    if (!t.flagged) continue;
    flagged.push_back({{"rule", t.terminal.rule},
                       {"terminal", t.terminal.literal},
                       {"count", t.count},
                       {"err", t.err},
                       {"rate", t.rate},
                       {"index", index_json(t.index)}});
  }
  diag["flagged"] = flagged;
  diag["insufficient_rules"] = r.diagnosis.insufficient_rules;
  doc["diagnosis"] = diag;

  ojson cov = ojson::object();
  for (const auto& [name, c] : summary.coverage) cov[name] = coverage_json(c);
  doc["coverage"] = cov;
  if (!summary.tau_sweep.empty()) {
    ojson sweep = ojson::array();
    for (const auto& [tau, v] : summary.tau_sweep) sweep.push_back({{"tau", tau}, {"violations", v}});
    doc["tau_sweep"] = sweep;
  }
  ojson failures = ojson::array();
  for (const PhaseStats& p : r.state.phases) {
    for (const std::string& f : p.failure_log) failures.push_back(std::string(phase_name(p.phase)) + " " + f);
  }
  doc["mut_failure_log"] = failures;
  return doc;
}

std::string campaign_report_text(const CampaignSummary& summary) {
  const CampaignResult& r = *summary.result;
  std::string out;
  char buf[256];
  out += "fairgram campaign report\n";
  out += "grammar: " + summary.config.value("grammar_path", std::string()) +
         "  task: " + summary.config.value("task", std::string()) +
         "  seed: " + std::to_string(r.state.seed) + "\n\n";
  out += "phase  iterations  unique  duplicates  violations  error_rate  mut_failures\n";
  for (const PhaseStats& p : r.state.phases) {
    std::snprintf(buf, sizeof buf, "%-6s %10llu  %6llu  %10llu  %10llu  %10.4f  %12llu\n",
                  std::string(phase_name(p.phase)).c_str(),
                  static_cast<unsigned long long>(p.iterations),
                  static_cast<unsigned long long>(p.unique),
                  static_cast<unsigned long long>(p.duplicates),
                  static_cast<unsigned long long>(p.violations), p.error_rate(),
                  static_cast<unsigned long long>(p.mut_failures));
    out += buf;
  }
  out += "\nflagged tokens (|index| > " + fixed(r.diagnosis.threshold, 2) + ")\n";
  bool any = false;
  for (const TokenDiagnosis& t : r.diagnosis.tokens) {
    if (!t.flagged) continue;
    any = true;
    std::snprintf(buf, sizeof buf, "  %-20s %-24s rate %.4f  index %s\n", t.terminal.rule.c_str(),
                  t.terminal.literal.c_str(), t.rate, fixed(*t.index, 2).c_str());
    out += buf;
  }
  if (!any) out += "  none\n";
  if (!summary.coverage.empty()) {
    out += "\ncoverage\n" + format_coverage_table(summary.coverage);
  }
  if (!summary.tau_sweep.empty()) {
    out += "\ntau  violations\n";
    for (const auto& [tau, v] : summary.tau_sweep) {
      std::snprintf(buf, sizeof buf, "%.2f %llu\n", tau, static_cast<unsigned long long>(v));
      out += buf;
    }
  }
  return out;
}

ojson group_report_json(const GroupReport& report, const ojson& config,
                        std::string_view mut_name) {
  ojson doc;
  doc["tool"] = "fairgram";
  doc["config"] = config;
  doc["mut"] = mut_name;
  doc["bases"] = report.bases.size();
  doc["mut_failures"] = report.mut_failures;
  ojson summary = ojson::array();
  for (const ProbeSummary& s : report.summary) {
    summary.push_back({{"probe", s.probe},
                       {"violations", s.violations},
                       {"groups", s.groups},
                       {"percent", s.percent()}});
  }
  doc["summary"] = summary;
  ojson scores = ojson::array();
  for (const GroupScore& s : report.scores) {
    scores.push_back({{"group", s.group},
                      {"probe", s.probe},
                      {"mean", s.mean_score},
                      {"samples", s.sample_count},
                      {"index", index_json(s.anomaly_index)},
                      {"violation", s.violation}});
  }
  doc["scores"] = scores;
  return doc;
}

std::string group_report_tsv(const GroupReport& report) {
  std::string out = "group\tprobe\tmean\tsamples\tindex\tviolation\n";
  for (const GroupScore& s : report.scores) {
    out += s.group + '\t' + s.probe + '\t' + fixed(s.mean_score) + '\t' +
           std::to_string(s.sample_count) + '\t' + fixed(s.anomaly_index) + '\t' +
           (s.violation ? "yes" : "no") + '\n';
  }
  return out;
}

std::string group_summary_table(const GroupReport& report, std::string_view mut_name) {
  std::string out = "mut                  probe     #violations  %violation\n";
  char buf[200];
  for (const ProbeSummary& s : report.summary) {
    std::snprintf(buf, sizeof buf, "%-20s %-9s %11llu  %9.1f%%\n", std::string(mut_name).c_str(),
                  s.probe.c_str(), static_cast<unsigned long long>(s.violations), s.percent());
    out += buf;
  }
  return out;
}

}  // namespace fairgram
