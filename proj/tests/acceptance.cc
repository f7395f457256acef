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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fairgram/artifacts.h"
#include "fairgram/augment.h"
#include "fairgram/campaign.h"
#include "fairgram/commands.h"
#include "fairgram/config.h"
#include "fairgram/coverage.h"
#include "fairgram/diagnosis.h"
#include "fairgram/error.h"
#include "fairgram/generator.h"
#include "fairgram/group.h"
#include "fairgram/mut.h"
#include "fairgram/rng.h"
#include "fairgram/text.h"
#include "fairgram/weights.h"
#include "httplib.h"
#include "json.hpp"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace fairgram;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path config_path(const std::string& name) {
  return testing::source_dir() / "configs" / (name + ".json");
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Full-sort median, independent of the library's implementation.
double sorted_median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

Outcome mad_equivalence() {
  Rng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(3 + rng.below(48));
    for (double& x : xs) x = rng.below(3) == 0 ? static_cast<double>(rng.below(5)) / 4 : rng.uniform();
    const double m = sorted_median(xs);
    std::vector<double> dev;
    for (double x : xs) dev.push_back(std::fabs(x - m));
    const double d = sorted_median(dev);
    const std::vector<double> got = anomaly_indices(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double want;
      if (d != 0.0) {
        want = (xs[i] - m) / d;
      } else {
        want = xs[i] == m ? 0.0 : (xs[i] > m ? INFINITY : -INFINITY);
      }
      if (std::isinf(want) || std::isinf(got[i])) {
        if (want != got[i]) return {false, "infinite index mismatch at trial " + std::to_string(trial)};
        continue;
      }
      worst = std::max(worst, std::fabs(want - got[i]));
    }
  }
  return {worst <= 1e-12, fmt("max |diff| %.3g over 1000 vectors", worst)};
}

Outcome mutation_purity() {
  std::uint64_t total = 0;
  std::uint64_t pure = 0;
  for (const std::string& name : testing::shipped_names()) {
    const Grammar g = testing::shipped(name);
    const WeightTable w = equal_prob(g);
    const std::string sens = g.sensitive().front();
    for (std::uint64_t i = 0; i < 2500; ++i) {
      Rng rng = Rng::derive(7, Stream::kRand, i);
      const TestCase tc = build_test(g, 2, w, sens, rng);
      ++total;
      // String diff: some occurrence of each sensitive literal splits the two
      // sentences into an identical prefix and suffix. Rendering may
      // capitalize the first letter, so compare with it lowered.
      auto lower_first = [](std::string x) {
        if (!x.empty()) x[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(x[0])));
        return x;
      };
      const std::string a = lower_first(tc.sentences[0]);
      const std::string b = lower_first(tc.sentences[1]);
      const std::string& ra = tc.sensitive_choices[0];
      const std::string& rb = tc.sensitive_choices[1];
      bool split = false;
      for (const auto& [la, lb] : {std::pair{ra, rb}, std::pair{lower_first(ra), lower_first(rb)}}) {
        for (std::size_t pa = a.find(la); !split && pa != std::string::npos;
             pa = a.find(la, pa + 1)) {
          split = b == a.substr(0, pa) + lb + a.substr(pa + la.size());
        }
      }
      if (split && ra != rb && differs_only_at_sensitive_slot(g, tc)) ++pure;
    }
  }
  return {pure == total, std::to_string(pure) + "/" + std::to_string(total) + " pure"};
}

struct UpliftStats {
  std::vector<double> rand_rates;
  std::vector<double> prob_rates;
};

UpliftStats sa_seeds() {
  UpliftStats s;
  CampaignConfig config = load_config(config_path("sa_occupation"));
  const Grammar g = load_config_grammar(config);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    config.seed = seed;
    auto model = make_model(*config.mut);
    CampaignOptions o = campaign_options(config, g, std::thread::hardware_concurrency());
    o.keep_outputs = false;
    const CampaignResult r = run_individual_campaign(*model, g, o);
    s.rand_rates.push_back(r.state.phases[0].error_rate());
    s.prob_rates.push_back(r.state.phases[1].error_rate());
  }
  return s;
}

double mean(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

Outcome prob_uplift(const UpliftStats& s) {
  const double r = mean(s.rand_rates);
  const double p = mean(s.prob_rates);
  return {p >= 1.2 * r, fmt("RAND %.4f PROB %.4f ratio %.3f", r, p, p / r)};
}

Outcome stability(const UpliftStats& s) {
  const double m = mean(s.rand_rates);
  double var = 0;
  for (double x : s.rand_rates) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / static_cast<double>(s.rand_rates.size() - 1));
  return {sd <= 0.01, fmt("RAND error rate mean %.4f, sample sd %.4f over 10 seeds", m, sd)};
}

Outcome diagnosis_precision() {
  CampaignConfig config = load_config(config_path("coref_ceo"));
  const Grammar g = load_config_grammar(config);
  const std::string planted = "CEO";
  const std::string rule = "subj_np";
  int good = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    config.seed = seed;
    config.phases = {Phase::kRand};
    auto model = make_model(*config.mut);
    CampaignOptions o = campaign_options(config, g, std::thread::hardware_concurrency());
    o.keep_outputs = false;
    const CampaignResult r = run_individual_campaign(*model, g, o);
    bool planted_flagged = false;
    int others = 0;
    for (const TokenDiagnosis& t : r.diagnosis.tokens) {
      if (t.terminal.rule != rule) continue;
      const bool is_planted = contains_word(t.terminal.literal, planted);
      if (is_planted) planted_flagged = t.flagged;
      if (!is_planted && t.flagged) ++others;
    }
    if (planted_flagged && others == 0) ++good;
    detail << (seed > 1 ? " " : "") << (planted_flagged ? "+" : "-") << others;
  }
  return {good >= 9, std::to_string(good) + "/10 seeds clean (planted flag, other flags: " +
                         detail.str() + ")"};
}

Outcome group_deviants() {
  const CampaignConfig config = load_config(config_path("mlm_group"));
  const Grammar g = load_config_grammar(config);
  auto model = make_model(*config.mut);
  GroupOptions o;
  o.task = config.task;
  o.sensitive = resolve_sensitive(g, config.sensitive);
  o.iters_per_group = config.iters_per_group;
  o.probes = config.probes;
  o.seed = config.seed;
  o.workers = std::thread::hardware_concurrency();
  const GroupReport r = run_group_campaign(*model, g, o);
  bool ok = r.summary.size() == 2;
  std::string detail;
  for (const ProbeSummary& s : r.summary) {
    ok = ok && s.violations == 4 && s.groups == 43;
    detail += s.probe + " " + std::to_string(s.violations) + "/" + std::to_string(s.groups) +
              fmt(" (%.1f%%) ", s.percent());
  }
  std::set<std::string> flagged;
  for (std::size_t i = 0; i + 1 < r.scores.size(); i += 2) {
    const GroupScore& his = r.scores[i];
    const GroupScore& her = r.scores[i + 1];
    if (!his.violation && !her.violation) continue;
    flagged.insert(his.group);
    ok = ok && his.violation && her.violation && his.anomaly_index * her.anomaly_index < 0;
  }
  ok = ok && flagged == std::set<std::string>{"receptionist", "nurse", "CEO", "mechanic"};
  return {ok, detail + "opposite signs for each deviant"};
}

Outcome strictness() {
  Rng rng(5);
  std::vector<std::vector<double>> sets;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(3 + rng.below(40));
    const int mode = static_cast<int>(rng.below(3));
    const double c = rng.uniform();
    for (double& x : s) {
      x = mode == 0 ? c : mode == 1 ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform();
    }
    sets.push_back(std::move(s));
  }
  StrictnessReport r;
  try {
    r = check_strictness(sets);
  } catch (const Error& e) {
    return {false, e.what()};
  }
  const std::vector<double> witness = {0.50, 0.51, 0.49, 0.52, 0.48};
  const bool parity = violates_mean_parity(witness);
  const bool anomalous = violates_anomaly_bound(witness);
  const bool ok = r.instances == 1000 && r.anomaly_violations <= r.parity_violations && parity &&
                  !anomalous;
  return {ok, "0 counterexamples in 1000; witness breaks parity=" + std::string(parity ? "yes" : "no") +
                  " anomaly bound=" + (anomalous ? "yes" : "no")};
}

Outcome tau_monotone() {
  const CampaignConfig config = load_config(config_path("mlm_individual"));
  const Grammar g = load_config_grammar(config);
  auto model = make_model(*config.mut);
  const CampaignResult r = run_individual_campaign(
      *model, g, campaign_options(config, g, std::thread::hardware_concurrency()));
  const std::vector<std::uint64_t> counts = violations_by_tau(r.state, config.probes, kTauGrid);
  bool ok = true;
  std::string detail = "violations:";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i > 0 && counts[i] > counts[i - 1]) ok = false;
    detail += " " + std::to_string(counts[i]);
  }
  ok = ok && counts.front() > counts.back();
  return {ok, detail};
}

Outcome coverage_check() {
  const CampaignConfig config = load_config(config_path("coref_ceo"));
  const Grammar g = load_config_grammar(config);
  auto model = make_model(*config.mut);
  const CampaignResult r = run_individual_campaign(
      *model, g, campaign_options(config, g, std::thread::hardware_concurrency()));
  std::vector<DerivationTrace> rand;
  std::vector<DerivationTrace> prob;
  for (const CaseOutcome& c : r.state.cases) {
    auto& dest = c.phase == Phase::kRand ? rand : prob;
    dest.insert(dest.end(), c.test.traces.begin(), c.test.traces.end());
  }
  const CoverageReport cr = coverage(rand, g);
  const CoverageReport cp = coverage(prob, g);
  const double fr = static_cast<double>(cr.terminals_covered) / cr.terminals_total;
  const double fp = static_cast<double>(cp.terminals_covered) / cp.terminals_total;
  return {fr >= 0.98 && fp <= fr,
          fmt("RAND %.1f%% PROB %.1f%% terminal coverage", 100 * fr, 100 * fp)};
}

std::string without_timing(const std::string& report) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(report);
  doc.erase("timing");
  return doc.dump();
}

Outcome determinism() {
  const CampaignConfig config = load_config(config_path("sa_occupation"));
  const fs::path root = fs::temp_directory_path() / "fairgram_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::size_t>> runs = {
      {"w1a", 1}, {"w1b", 1}, {"w8a", 8}, {"w8b", 8}};
  for (const auto& [name, workers] : runs) run_test_command(config, root / name, workers);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "w1a")) {
    const std::string file = entry.path().filename().string();
    const std::string ref = read_text_file(entry.path());
    for (const auto& [name, workers] : runs) {
      const std::string other = read_text_file(root / name / file);
      const bool same = file == "report.json" ? without_timing(ref) == without_timing(other)
                                              : ref == other;
      if (!same) return {false, file + " differs in run " + name};
      ++compared;
    }
  }
  fs::remove_all(root);
  return {compared >= 28, std::to_string(compared) + " file comparisons identical"};
}

Outcome augmentation() {
  const CampaignConfig config = load_config(config_path("sa_occupation"));
  const Grammar g = load_config_grammar(config);
  auto model = make_model(*config.mut);
  CampaignOptions o = campaign_options(config, g, std::thread::hardware_concurrency());
  o.phases = {Phase::kRand};
  const CampaignResult r = run_individual_campaign(*model, g, o);
  const std::vector<LabelRule> rules = label_rules_from_grammar(g);
  AugmentOptions a;
  a.top_k = 5;
  a.percent = 1;
  a.base_size = 25000;
  a.seed = 9;
  const AugmentationSet set = build_augmentation(g, r.diagnosis, rules, a);
  const AugmentationSet again = build_augmentation(g, r.diagnosis, rules, a);
  const auto top = top_k_tokens(r.diagnosis, 5, std::string("person"));
  std::size_t labeled = 0;
  std::size_t with_token = 0;
  for (const AugmentRecord& rec : set.records) {
    if (!rec.label.empty() && predictive_label(rec.text, rules) == rec.label) ++labeled;
    for (const TokenDiagnosis& t : top) {
      if (contains_word(rec.text, t.terminal.literal)) {
        ++with_token;
        break;
      }
    }
  }
  const std::size_t n = set.records.size();
  const bool ok = n == 250 && labeled == n && with_token == n &&
                  augmentation_jsonl(set) == augmentation_jsonl(again);
  return {ok, std::to_string(n) + " records, " + std::to_string(labeled) + " labeled, " +
                  std::to_string(with_token) + " with a top-5 token"};
}

TaskOutput fuzz_output(Rng& rng, Task task) {
  switch (task) {
    case Task::kSa:
      return SaOutput{static_cast<SaLabel>(rng.below(3)), rng.uniform() * 2 - 1};
    case Task::kCoref: {
      CorefOutput c;
      for (std::size_t i = rng.below(4); i > 0; --i) {
        Chain chain;
        for (std::size_t j = 1 + rng.below(3); j > 0; --j) {
          chain.push_back("tok\"" + std::to_string(rng.below(100)) + "\\é");
        }
        c.chains.push_back(std::move(chain));
      }
      return c;
    }
    case Task::kMlm: {
      MlmOutput m;
      const double his = rng.uniform();
      m.confidences["his"] = his;
      m.confidences["her"] = rng.uniform() * (1 - his);
      return m;
    }
  }
  return SaOutput{};
}

Outcome wire_protocol() {
  Rng rng(12);
  std::size_t roundtrips = 0;
  for (int i = 0; i < 3000; ++i) {
    Query q{static_cast<Task>(rng.below(3)), "sentence \"" + std::to_string(rng.next()) + "\"\n\t", {}};
    if (q.task == Task::kMlm) q.probes = {"his", "her"};
    const std::uint64_t id = rng.next() >> 11;
    if (decode_request(encode_request(id, q)) != std::pair{id, q}) {
      return {false, "request round trip failed"};
    }
    Response r;
    r.id = id;
    if (rng.below(6) == 0) {
      r.error = "boom " + std::to_string(i);
    } else {
      r.output = fuzz_output(rng, q.task);
    }
    if (decode_response(encode_response(r)) != r) return {false, "response round trip failed"};
    roundtrips += 2;
  }

  // HTTP schema: the same payloads through a loopback server.
  httplib::Server server;
  server.Post("/evaluate", [](const httplib::Request& req, httplib::Response& res) {
    const auto [id, q] = decode_request(req.body);
    Rng local(std::hash<std::string>{}(q.text));
    Response r;
    r.id = id;
    r.output = fuzz_output(local, q.task);
    res.set_content(encode_response(r), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  bool http_ok = true;
  {
    HttpModel http("http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(5000), 4);
    for (int i = 0; i < 100 && http_ok; ++i) {
      const Query q{static_cast<Task>(i % 3), "text " + std::to_string(i), {}};
      Rng local(std::hash<std::string>{}(q.text));
      http_ok = http.evaluate(q) == fuzz_output(local, q.task);
    }
  }
  server.stop();
  thread.join();
  if (!http_ok) return {false, "http adapter returned a different payload"};

  // Subprocess adapter end to end against the reference echo model.
  const CampaignConfig config = load_config(config_path("echo_subprocess"));
  const fs::path out = fs::temp_directory_path() / "fairgram_acceptance_echo";
  const TestRun run = run_test_command(config, out, 4);
  const PhaseStats& p = run.result.state.phases.front();
  fs::remove_all(out);
  const bool echo_ok = p.mut_failures == 0 && p.unique > 0 && run.violations == 0;
  return {echo_ok, std::to_string(roundtrips) + " codec round trips, 100 http calls, echo run " +
                       std::to_string(p.unique) + " cases with " + std::to_string(p.mut_failures) +
                       " adapter failures"};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  std::optional<UpliftStats> uplift;
  auto uplift_stats = [&]() -> const UpliftStats& {
    if (!uplift) uplift = sa_seeds();
    return *uplift;
  };
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mad oracle equivalence", mad_equivalence},
      {"mutation purity", mutation_purity},
      {"prob uplift", [&] { return prob_uplift(uplift_stats()); }},
      {"rand stability", [&] { return stability(uplift_stats()); }},
      {"diagnosis precision", diagnosis_precision},
      {"group deviants", group_deviants},
      {"mean parity vs anomaly bound", strictness},
      {"tau monotonicity", tau_monotone},
      {"coverage", coverage_check},
      {"determinism", determinism},
      {"augmentation contract", augmentation},
      {"wire protocol", wire_protocol},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] %2zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
