// End-to-end acceptance checks. Each numbered criterion prints one PASS or
// FAIL line; the process exits nonzero if any criterion fails. The CLI binary
// path arrives via the TOOLSIM_CLI_PATH compile definition.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "toolsim/blocksworld.hpp"
#include "toolsim/eval.hpp"
#include "toolsim/jsonl.hpp"
#include "toolsim/metaset.hpp"
#include "toolsim/planner.hpp"
#include "toolsim/rng.hpp"
#include "toolsim/sampler.hpp"
#include "toolsim/saw.hpp"

using namespace toolsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(TOOLSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "toolsim-acceptance";
  fs::create_directories(dir);
  return dir;
}

// Test-local executability oracles, independent of the library step code.
bool local_saw_ok(const SawState& s, const Action& a) {
  if (a.params.size() != 1 || a.params[0].size() != 1) return false;
  char c = a.params[0][0];
  if (c < 'a' || c > 'z') return false;
  if (a.tool == "Add") return c != 'z';
  if (a.tool != "Swap") return false;
  for (size_t i = 0; i + 1 < s.letters.size(); ++i) {
    if (s.letters[i] == c && s.letters[i + 1] != c) return true;
  }
  return false;
}

bool local_bw_ok(const BwState& s, const Action& a) {
  if (a.params.size() != 1) return false;
  const std::string& t = a.params[0];
  auto is_top = [&](const std::string& c) {
    for (const auto& st : s.stacks) {
      if (!st.empty() && st.back() == c) return true;
    }
    return false;
  };
  if (a.tool == "Pick") return !s.hand && is_top(t);
  if (a.tool == "Stack") return s.hand && (t == "table" || is_top(t));
  return false;
}

// 1. Documented worked example, exact state sequence.
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<Action> actions = {{"Add", {"a"}}, {"Add", {"n"}}, {"Add", {"y"}},
                                 {"Swap", {"a"}}, {"Swap", {"o"}}};
  std::vector<std::string> expect = {"ab", "abno", "abnoyz", "banoyz", "banyoz"};
  SawState s;
  bool ok = true;
  for (size_t i = 0; i < actions.size(); ++i) {
    auto out = saw::step(s, actions[i]);
    if (!out.ok()) {
      ok = false;
      break;
    }
    s = std::get<SawState>(*out.state_after);
    ok = ok && s.letters == expect[i];
  }
  ok = ok && saw::is_goal(s, SawGoal{"any"});
  auto ms = std::chrono::duration_cast<std::chrono::microseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  report(1, ok, "trace replay in " + std::to_string(ms) + "us");
}

// 2. Boundary labels equal brute-force ground truth on exhaustively
// enumerated small state spaces.
void criterion_2() {
  size_t checked = 0;
  bool ok = true;
  const Template in_t = templates_for(default_templates(), MetaTaskKind::InputBoundary)[0];
  const Template out_t = templates_for(default_templates(), MetaTaskKind::OutputBoundary)[0];

  auto check_state = [&](EnvId env, const State& s,
                         auto&& local_ok) {
    // Ground-truth one-step successor set via the local oracle decision and
    // library transition application.
    std::set<uint64_t> successors;
    for (const auto& [a, out] : enumerate_actions(env, s)) {
      bool truth = local_ok(a);
      if (truth != out.ok()) ok = false;
      if (out.ok()) successors.insert(hash_state(env, *out.state_after));

      // InputBoundary label through the builder.
      ExecutionRecord r;
      r.env_id = to_string(env);
      r.record_id = "acc";
      r.state_before = s;
      r.action = a;
      r.outcome = out;
      auto sample = build_meta_sample(r, MetaTaskKind::InputBoundary, in_t, 1);
      if (sample.answer != (truth ? "yes" : "no")) ok = false;
      ++checked;

      if (out.ok()) {
        // OutputBoundary positive: the recorded successor must be reachable.
        auto pos = build_meta_sample(r, MetaTaskKind::OutputBoundary, out_t, 1);
        if (pos.answer != "yes" || successors.count(hash_state(env, *out.state_after)) == 0)
          ok = false;
        // OutputBoundary negative: the mutated candidate must not be.
        auto neg = build_output_boundary_negative(r, out_t, 7);
        auto slots = invert_slots(out_t.question_pattern, neg.question);
        if (!slots) {
          ok = false;
        } else {
          State candidate = parse_state(env, slots->at("outcome"));
          if (successors.count(hash_state(env, candidate)) != 0) ok = false;
        }
        checked += 2;
      }
    }
  };

  // All SAW states within 3 steps of the empty string.
  {
    std::set<std::string> seen = {""};
    std::vector<SawState> frontier = {SawState{}};
    std::vector<SawState> all = frontier;
    for (int depth = 0; depth < 3; ++depth) {
      std::vector<SawState> next;
      for (const auto& s : frontier) {
        for (const auto& [a, out] : saw::enumerate_actions(s)) {
          if (!out.ok()) continue;
          const auto& ns = std::get<SawState>(*out.state_after);
          if (seen.insert(ns.letters).second) {
            next.push_back(ns);
            all.push_back(ns);
          }
        }
      }
      frontier = std::move(next);
    }
    for (const auto& s : all) {
      check_state(EnvId::Saw, s, [&](const Action& a) { return local_saw_ok(s, a); });
    }
  }

  // All 4-block configurations plus their hand-holding successors.
  {
    std::vector<std::string> colors(bw::palette().begin(), bw::palette().begin() + 4);
    for (const auto& config : bw::all_configurations(colors)) {
      std::vector<BwState> states = {config};
      for (const auto& [a, out] : bw::enumerate_actions(config)) {
        if (out.ok() && a.tool == "Pick") states.push_back(std::get<BwState>(*out.state_after));
      }
      for (const auto& s : states) {
        check_state(EnvId::Bw, s, [&](const Action& a) { return local_bw_ok(s, a); });
      }
    }
  }
  report(2, ok, std::to_string(checked) + " boundary labels checked");
}

// 3. gen-metaset at n=10000 per env: verified 100%, all kinds, balanced labels.
void criterion_3() {
  bool ok = true;
  std::string detail;
  for (const std::string& env : {"saw", "bw", "log"}) {
    fs::path out = scratch() / ("metaset-" + env + ".jsonl");
    auto t0 = std::chrono::steady_clock::now();
    int rc = run_cli("gen-metaset --env " + env + " --n 10000 --seed 7 --out " + out.string());
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    if (rc != 0) {
      ok = false;
      detail += env + ": generation/verification failed; ";
      continue;
    }
    std::map<std::string, size_t> kinds;
    std::map<std::string, size_t> labels;
    size_t turns = 0;
    for (const auto& row : read_jsonl(out.string())) {
      Conversation c = conversation_from_json(row);
      for (const auto& t : c.turns) {
        ++turns;
        ++kinds[to_string(t.kind)];
        if (t.kind == MetaTaskKind::InputBoundary || t.kind == MetaTaskKind::OutputBoundary)
          ++labels[t.answer];
      }
    }
    double yes = static_cast<double>(labels["yes"]) / (labels["yes"] + labels["no"]);
    if (turns != 10000 || kinds.size() != 6 || yes < 0.45 || yes > 0.55) {
      ok = false;
      detail += env + ": shape off; ";
    }
    detail += env + "=" + std::to_string(secs) + "s ";
  }
  report(3, ok, detail);
}

// 4. gen-solutions at n=2000 per env, all replay-valid; BW minimality.
void criterion_4() {
  bool ok = true;
  std::string detail;
  for (EnvId env : {EnvId::Saw, EnvId::Bw, EnvId::Log}) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<SolutionTrace> traces;
    try {
      traces = emit_solution_corpus(env, 2026, 2000);
    } catch (const std::exception& e) {
      ok = false;
      detail += std::string(to_string(env)) + ": " + e.what() + "; ";
      continue;
    }
    size_t valid = 0;
    for (const auto& t : traces) {
      std::vector<Action> actions;
      for (const auto& s : t.steps) actions.push_back(s.action);
      if (t.solved && plan_is_valid(env, t.init_state, t.goal, actions)) ++valid;
    }
    if (valid != 2000) ok = false;
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    detail += std::string(to_string(env)) + "=" + std::to_string(valid) + "/2000 in " +
              std::to_string(secs) + "s; ";
  }

  // 200 random 4-block instances: BFS plans are optimal, heuristic >= BFS.
  Rng rng(404);
  for (int i = 0; i < 200; ++i) {
    auto [init, goal] = bw::sample_instance(rng.next_u64(), 4);
    auto p = plan_bw(init, goal);
    if (!p || !p->optimal || !plan_is_valid(EnvId::Bw, init, goal, p->actions)) {
      ok = false;
      break;
    }
    if (!p->actions.empty() &&
        bfs_plan(EnvId::Bw, init, goal, 500000, static_cast<int>(p->actions.size()) - 1)) {
      ok = false;  // a shorter plan existed
      break;
    }
  }
  report(4, ok, detail + "200 BW minimality checks");
}

// 5. Scripted agents separate cleanly on 100-case suites.
void criterion_5() {
  bool ok = true;
  std::string detail;
  for (EnvId env : {EnvId::Saw, EnvId::Bw, EnvId::Log}) {
    OracleAgent oracle;
    SuiteConfig cfg;
    cfg.seed = 5;
    cfg.episodes = 100;
    EvalReport r = run_suite(env, oracle, cfg);
    if (r.success_rate != 1.0) {
      ok = false;
      detail += std::string("oracle ") + to_string(env) + "=" +
                std::to_string(100 * r.success_rate) + "%; ";
    }
  }
  for (uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    RandomAgent rnd(seed);
    SuiteConfig cfg;
    cfg.seed = seed;
    cfg.episodes = 100;
    EvalReport log_r = run_suite(EnvId::Log, rnd, cfg);
    EvalReport saw_r = run_suite(EnvId::Saw, rnd, cfg);
    if (log_r.success_rate > 0.10 || saw_r.success_rate > 0.50) {
      ok = false;
      detail += "random seed " + std::to_string(seed) + ": log=" +
                std::to_string(100 * log_r.success_rate) + "% saw=" +
                std::to_string(100 * saw_r.success_rate) + "%; ";
    }
  }
  for (EnvId env : {EnvId::Saw, EnvId::Bw, EnvId::Log}) {
    AlwaysInvalidAgent agent;
    SuiteConfig cfg;
    cfg.seed = 6;
    cfg.episodes = 100;
    cfg.budget = 12;
    EvalReport r = run_suite(env, agent, cfg);
    if (r.successes != 0) ok = false;
    for (const auto& ep : r.results) {
      // State provably unchanged: every turn rejected.
      if (ep.invalid_steps != ep.steps_used) ok = false;
      for (const auto& s : ep.transcript) {
        if (s.executed) ok = false;
      }
    }
  }
  report(5, ok, detail.empty() ? "oracle=100%, random bounded, always-invalid=0%" : detail);
}

// 6. Identical CLI invocations produce byte-identical artifacts.
void criterion_6() {
  bool ok = true;
  std::string detail;
  struct Job {
    std::string name;
    std::string args;
  };
  fs::path dir = scratch();
  std::vector<Job> jobs = {
      {"gen-exec", "gen-exec --env log --n 400 --seed 21 --mode mixed --out "},
      {"gen-metaset", "gen-metaset --env bw --n 240 --seed 22 --out "},
      {"gen-solutions", "gen-solutions --env saw --n 60 --seed 23 --out "},
      {"gen-icl", "gen-icl --env bw --seed 24 --k-per-task 2 --out "},
  };
  for (const auto& job : jobs) {
    fs::path a = dir / (job.name + "-a.jsonl");
    fs::path b = dir / (job.name + "-b.jsonl");
    if (run_cli(job.args + a.string()) != 0 || run_cli(job.args + b.string()) != 0) {
      ok = false;
      detail += job.name + ": run failed; ";
      continue;
    }
    if (file_fingerprint(a.string()) != file_fingerprint(b.string())) {
      ok = false;
      detail += job.name + ": bytes differ; ";
    }
  }
  report(6, ok, detail.empty() ? "4 subcommands byte-identical across reruns" : detail);
}

// 7. gen-icl with k=2 emits exactly 12 demonstrations plus tool docs.
void criterion_7() {
  fs::path out = scratch() / "icl.jsonl";
  bool ok = run_cli("gen-icl --env saw --seed 31 --k-per-task 2 --out " + out.string()) == 0;
  std::string detail;
  if (ok) {
    auto rows = read_jsonl(out.string());
    ok = rows.size() == 1;
    if (ok) {
      const json& bundle = rows[0];
      std::string prompt = bundle.at("prompt").get<std::string>();
      ok = bundle.at("demos").size() == 12 &&
           prompt.find(tool_docs(EnvId::Saw)) != std::string::npos;
      std::set<std::string> kinds;
      for (const auto& d : bundle.at("demos")) kinds.insert(d.at("meta_task").get<std::string>());
      ok = ok && kinds.size() == 6;
      detail = std::to_string(bundle.at("demos").size()) + " demos, " +
               std::to_string(kinds.size()) + " kinds";
    }
  }
  report(7, ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  if (g_failures == 0) {
    std::cout << "all acceptance criteria passed" << std::endl;
    return 0;
  }
  std::cout << g_failures << " acceptance criteria failed" << std::endl;
  return 1;
}
