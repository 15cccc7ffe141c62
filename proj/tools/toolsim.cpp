#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "toolsim/eval.hpp"
#include "toolsim/jsonl.hpp"
#include "toolsim/metaset.hpp"
#include "toolsim/planner.hpp"
#include "toolsim/record.hpp"
#include "toolsim/rng.hpp"
#include "toolsim/sampler.hpp"

using namespace toolsim;

namespace {

struct CommonOpts {
  std::string env = "saw";
  uint64_t seed = 0;
  size_t n = 0;
  std::string out;
  std::string config_path;
};

// Config file values fill in flags the user did not pass; flags win.
void merge_config(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", std::string("bad json: ") + e.what());
  }
  for (auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

json effective_config(const CommonOpts& o, json extra = json::object()) {
  extra["env"] = o.env;
  extra["n"] = o.n;
  return extra;
}

SamplerConfig sampler_config(uint64_t seed, size_t n) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.n = n;
  return cfg;
}

// Mixed stream: guided walks for goal-directed coverage, random walks for
// breadth. Ids stay distinct (-g / -r suffixes).
std::vector<ExecutionRecord> sample_mixed_records(EnvId env, uint64_t seed, size_t n) {
  size_t guided = n / 2;
  auto records = sample_guided_records(env, sampler_config(mix_seed(seed, 1), guided));
  auto rnd = sample_random_records(env, sampler_config(mix_seed(seed, 2), n - guided));
  records.insert(records.end(), rnd.begin(), rnd.end());
  return records;
}

int cmd_gen_exec(const CommonOpts& o, const std::string& mode) {
  EnvId env = env_from_string(o.env);
  SamplerConfig cfg = sampler_config(o.seed, o.n);
  std::vector<ExecutionRecord> records;
  if (mode == "random") {
    records = sample_random_records(env, cfg);
  } else if (mode == "guided") {
    records = sample_guided_records(env, cfg);
  } else if (mode == "mixed") {
    records = sample_mixed_records(env, o.seed, o.n);
  } else {
    std::cerr << "unknown --mode: " << mode << "\n";
    return 2;
  }
  std::vector<json> rows;
  for (const auto& r : records) rows.push_back(record_to_json(r));
  write_jsonl(o.out, make_header("exec-records", o.seed, effective_config(o, {{"mode", mode}})),
              rows);
  auto replay = replay_trace(records);
  std::cout << "wrote " << rows.size() << " records to " << o.out << "; replay "
            << (replay.all_match() ? "clean" : "MISMATCH") << "\n";
  return replay.all_match() ? 0 : 1;
}

int cmd_gen_metaset(const CommonOpts& o, int turns_min, int turns_max) {
  EnvId env = env_from_string(o.env);
  // Oversample so every kind quota can be filled from compatible records.
  auto records = sample_mixed_records(env, mix_seed(o.seed, 0xec0ULL), o.n * 3 + 64);
  MetasetConfig cfg;
  cfg.seed = o.seed;
  cfg.n = o.n;
  cfg.turns_min = turns_min;
  cfg.turns_max = turns_max;
  auto conversations = build_metaset(records, default_templates(), cfg);

  RecordStore store(records);
  auto report = verify_metaset(conversations, store, default_templates());

  std::vector<json> rows;
  for (const auto& c : conversations) rows.push_back(conversation_to_json(c));
  json header = make_header(
      "metaset", o.seed,
      effective_config(o, {{"turns_min", turns_min}, {"turns_max", turns_max}}));
  write_jsonl(o.out, header, rows);

  std::vector<json> record_rows;
  for (const auto& r : records) record_rows.push_back(record_to_json(r));
  write_jsonl(o.out + ".records.jsonl", make_header("exec-records", o.seed, effective_config(o)),
              record_rows);

  std::cout << "wrote " << rows.size() << " conversations (" << report.total << " turns) to "
            << o.out << "; verified " << report.passed << "/" << report.total << "\n";
  for (size_t i = 0; i < report.failures.size() && i < 5; ++i) {
    const auto& f = report.failures[i];
    std::cerr << "verify failure: " << f.conversation_id << " turn " << f.turn << " ("
              << f.kind << "): " << f.message << "\n";
  }
  return report.all_pass() ? 0 : 1;
}

int cmd_gen_solutions(const CommonOpts& o, const std::string& format) {
  EnvId env = env_from_string(o.env);
  auto traces = emit_solution_corpus(env, o.seed, o.n);
  std::vector<json> rows;
  for (const auto& t : traces)
    rows.push_back(format == "chat" ? trace_to_chat_json(t) : trace_to_json(t));
  write_jsonl(o.out, make_header("solutions", o.seed, effective_config(o, {{"format", format}})),
              rows);
  std::cout << "wrote " << rows.size() << " solution traces to " << o.out << "\n";
  return 0;
}

int cmd_gen_icl(const CommonOpts& o, int k_per_task) {
  EnvId env = env_from_string(o.env);
  size_t pool = std::max<size_t>(o.n, static_cast<size_t>(kMetaTaskCount) * k_per_task * 4);
  auto records = sample_mixed_records(env, mix_seed(o.seed, 0x1c1ULL), pool * 3 + 64);
  MetasetConfig cfg;
  cfg.seed = o.seed;
  cfg.n = pool;
  auto conversations = build_metaset(records, default_templates(), cfg);
  auto samples = flatten(conversations);

  std::string prompt = build_icl_prompt(samples, mix_seed(o.seed, 0x1c2ULL), k_per_task, env);

  // Reconstruct the chosen demos the same way build_icl_prompt picks them.
  std::map<MetaTaskKind, std::vector<const MetaSample*>> by_kind;
  for (const auto& s : samples) by_kind[s.kind].push_back(&s);
  Rng rng(mix_seed(o.seed, 0x1c2ULL));
  json demos = json::array();
  for (MetaTaskKind kind : all_meta_tasks()) {
    auto& bucket = by_kind[kind];
    rng.shuffle(bucket);
    for (int i = 0; i < k_per_task; ++i) {
      demos.push_back({{"meta_task", to_string(kind)},
                       {"question", bucket[i]->question},
                       {"answer", bucket[i]->answer}});
    }
  }

  json row{{"env_id", o.env},
           {"k_per_task", k_per_task},
           {"tool_docs", tool_docs(env)},
           {"prompt", prompt},
           {"demos", demos}};
  write_jsonl(o.out, make_header("icl-bundle", o.seed, effective_config(o, {{"k_per_task", k_per_task}})),
              {row});
  std::cout << "wrote ICL bundle with " << demos.size() << " demos to " << o.out << "\n";
  return 0;
}

std::unique_ptr<Agent> make_agent(const std::string& spec, uint64_t seed, int timeout_ms) {
  if (spec.rfind("cmd:", 0) == 0)
    return std::make_unique<CommandAgent>(spec.substr(4), timeout_ms);
  if (spec.rfind("http:", 0) == 0) {
    std::string rest = spec.substr(5);
    std::string path = "/act";
    size_t slash = rest.find('/');
    if (slash != std::string::npos) {
      path = rest.substr(slash);
      rest = rest.substr(0, slash);
    }
    size_t colon = rest.rfind(':');
    if (colon == std::string::npos)
      throw AgentError("http agent spec needs host:port");
    return std::make_unique<HttpAgent>(rest.substr(0, colon),
                                       std::stoi(rest.substr(colon + 1)), path, timeout_ms);
  }
  return make_scripted_agent(spec, seed);
}

int cmd_eval(const CommonOpts& o, size_t cases, const std::string& agent_spec, int budget,
             int timeout_ms) {
  EnvId env = env_from_string(o.env);
  auto agent = make_agent(agent_spec, o.seed, timeout_ms);
  SuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.episodes = cases;
  cfg.budget = budget;
  EvalReport report = run_suite(env, *agent, cfg);
  json j = report_to_json(report);
  if (!o.out.empty()) {
    write_jsonl(o.out, make_header("eval-report", o.seed,
                                   effective_config(o, {{"agent", agent_spec},
                                                        {"cases", cases},
                                                        {"budget", budget}})),
                {j});
  }
  std::cout << "env=" << report.env_id << " agent=" << report.agent
            << " SR=" << 100.0 * report.success_rate << "% (" << report.successes << "/"
            << report.episodes << ")\n";
  return 0;
}

int verify_metaset_file(const std::string& path, const std::string& records_path) {
  auto rows = read_jsonl(path);
  std::vector<Conversation> conversations;
  for (const auto& r : rows) conversations.push_back(conversation_from_json(r));
  std::vector<ExecutionRecord> records;
  for (const auto& r : read_jsonl(records_path)) records.push_back(record_from_json(r));
  RecordStore store(records);
  auto report = verify_metaset(conversations, store, default_templates());
  std::cout << "metaset verify: " << report.passed << "/" << report.total << " turns pass\n";
  for (size_t i = 0; i < report.failures.size() && i < 10; ++i) {
    const auto& f = report.failures[i];
    std::cerr << f.conversation_id << " turn " << f.turn << " (" << f.kind
              << "): " << f.message << "\n";
  }
  return report.all_pass() ? 0 : 1;
}

int verify_records_file(const std::string& path) {
  std::vector<ExecutionRecord> records;
  for (const auto& r : read_jsonl(path)) records.push_back(record_from_json(r));
  auto report = replay_trace(records);
  std::cout << "record replay: " << (report.total - report.mismatches.size()) << "/"
            << report.total << " match\n";
  for (size_t i = 0; i < report.mismatches.size() && i < 10; ++i) {
    std::cerr << report.mismatches[i].record_id << ": " << report.mismatches[i].detail << "\n";
  }
  return report.all_match() ? 0 : 1;
}

int verify_solutions_file(const std::string& path) {
  size_t total = 0, good = 0;
  for (const auto& r : read_jsonl(path)) {
    ++total;
    SolutionTrace t = trace_from_json(r);
    EnvId env = env_from_string(t.env_id);
    std::vector<Action> actions;
    for (const auto& s : t.steps) actions.push_back(s.action);
    if (plan_is_valid(env, t.init_state, t.goal, actions)) {
      ++good;
    } else {
      std::cerr << t.id << ": replay or goal check failed\n";
    }
  }
  std::cout << "solution verify: " << good << "/" << total << " traces valid\n";
  return good == total ? 0 : 1;
}

int cmd_verify(const std::string& path, const std::string& records_path) {
  auto header = read_jsonl_header(path);
  std::string artifact =
      header ? (*header)["header"].value("artifact", "") : std::string();
  if (artifact == "metaset") {
    std::string rp = records_path.empty() ? path + ".records.jsonl" : records_path;
    return verify_metaset_file(path, rp);
  }
  if (artifact == "exec-records") return verify_records_file(path);
  if (artifact == "solutions") return verify_solutions_file(path);
  std::cerr << "cannot determine corpus kind for " << path << " (artifact: '" << artifact
            << "')\n";
  return 2;
}

int cmd_report(const std::string& path) {
  auto rows = read_jsonl(path);
  if (rows.empty()) {
    std::cerr << "empty report file\n";
    return 2;
  }
  const json& r = rows.front();
  std::cout << "Evaluation report\n"
            << "  environment:  " << r.value("env_id", "?") << "\n"
            << "  agent:        " << r.value("agent", "?") << "\n"
            << "  episodes:     " << r.value("episodes", 0) << "\n"
            << "  successes:    " << r.value("successes", 0) << "\n"
            << "  success rate: " << 100.0 * r.value("success_rate", 0.0) << "%\n"
            << "  mean steps:   " << r.value("mean_steps", 0.0) << "\n"
            << "  invalid rate: " << 100.0 * r.value("invalid_rate", 0.0) << "%\n";
  std::map<std::string, int> reasons;
  for (const auto& e : r.value("results", json::array())) {
    std::string why = e.value("failure_reason", "");
    if (!why.empty()) ++reasons[why];
  }
  for (const auto& [why, count] : reasons) {
    std::cout << "  failures[" << why << "]: " << count << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolsim: deterministic tool-use environments, dataset synthesis, and evaluation"};
  app.require_subcommand(1);

  auto add_common = [](CLI::App* cmd, CommonOpts& o, bool needs_out) {
    cmd->add_option("--env", o.env, "environment id (saw|bw|log)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--n", o.n, "number of items");
    auto* out = cmd->add_option("--out", o.out, "output path");
    if (needs_out) out->required();
    cmd->add_option("--config", o.config_path, "JSON config file; flags override");
  };

  CommonOpts exec_o;
  std::string exec_mode = "random";
  auto* gen_exec = app.add_subcommand("gen-exec", "sample execution records");
  add_common(gen_exec, exec_o, true);
  gen_exec->add_option("--mode", exec_mode, "random|guided|mixed");

  CommonOpts meta_o;
  int turns_min = 1, turns_max = 1;
  auto* gen_metaset = app.add_subcommand("gen-metaset", "build and verify a meta-task corpus");
  add_common(gen_metaset, meta_o, true);
  gen_metaset->add_option("--turns-min", turns_min, "minimum turns per conversation");
  gen_metaset->add_option("--turns-max", turns_max, "maximum turns per conversation");

  CommonOpts sol_o;
  std::string sol_format = "trace";
  auto* gen_solutions = app.add_subcommand("gen-solutions", "emit planner solution traces");
  add_common(gen_solutions, sol_o, true);
  gen_solutions->add_option("--format", sol_format, "trace|chat");

  CommonOpts icl_o;
  int k_per_task = 2;
  auto* gen_icl = app.add_subcommand("gen-icl", "emit an in-context-learning prompt bundle");
  add_common(gen_icl, icl_o, true);
  gen_icl->add_option("--k-per-task", k_per_task, "demonstrations per meta-task kind");

  CommonOpts eval_o;
  size_t cases = 100;
  std::string agent_spec = "oracle";
  int budget = 0;
  int timeout_ms = 30000;
  auto* eval_cmd = app.add_subcommand("eval", "run an agent over simulated episodes");
  add_common(eval_cmd, eval_o, false);
  eval_cmd->add_option("--cases", cases, "number of episodes");
  eval_cmd->add_option("--agent", agent_spec, "oracle|random|always-invalid|cmd:...|http:host:port[/path]");
  eval_cmd->add_option("--budget", budget, "step budget (0 = auto)");
  eval_cmd->add_option("--timeout-ms", timeout_ms, "per-turn agent timeout");

  std::string verify_path, verify_records;
  auto* verify_cmd = app.add_subcommand("verify", "re-verify a corpus file");
  verify_cmd->add_option("--in", verify_path, "corpus path")->required();
  verify_cmd->add_option("--records", verify_records, "execution record sidecar (metaset)");

  std::string report_path;
  auto* report_cmd = app.add_subcommand("report", "summarize an eval report");
  report_cmd->add_option("--in", report_path, "eval report path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_exec->parsed()) {
      merge_config(gen_exec, exec_o.config_path);
      return cmd_gen_exec(exec_o, exec_mode);
    }
    if (gen_metaset->parsed()) {
      merge_config(gen_metaset, meta_o.config_path);
      return cmd_gen_metaset(meta_o, turns_min, turns_max);
    }
    if (gen_solutions->parsed()) {
      merge_config(gen_solutions, sol_o.config_path);
      return cmd_gen_solutions(sol_o, sol_format);
    }
    if (gen_icl->parsed()) {
      merge_config(gen_icl, icl_o.config_path);
      return cmd_gen_icl(icl_o, k_per_task);
    }
    if (eval_cmd->parsed()) {
      merge_config(eval_cmd, eval_o.config_path);
      return cmd_eval(eval_o, cases, agent_spec, budget, timeout_ms);
    }
    if (verify_cmd->parsed()) return cmd_verify(verify_path, verify_records);
    if (report_cmd->parsed()) return cmd_report(report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
