#include "toolsim/record.hpp"

#include <set>

namespace toolsim {

json record_to_json(const ExecutionRecord& r) {
  EnvId env = r.env();
  json action;
  action["tool"] = r.action.tool;
  json params = json::array();
  for (const auto& p : r.action.params) {
    bool num = !p.empty() && p.find_first_not_of("0123456789") == std::string::npos;
    if (num) {
      params.push_back(std::stoll(p));
    } else {
      params.push_back(p);
    }
  }
  action["params"] = params;

  json outcome;
  if (r.outcome.ok()) {
    outcome["status"] = "success";
    outcome["state_after"] = state_to_json(env, *r.outcome.state_after);
  } else {
    outcome["status"] = "invalid";
    outcome["reason"] = r.outcome.reason;
  }

  json j;
  j["env_id"] = r.env_id;
  j["record_id"] = r.record_id;
  j["seed"] = r.seed;
  j["state_before"] = state_to_json(env, r.state_before);
  j["action"] = action;
  j["outcome"] = outcome;
  return j;
}

ExecutionRecord record_from_json(const json& j) {
  ExecutionRecord r;
  r.env_id = j.at("env_id").get<std::string>();
  EnvId env = r.env();
  r.record_id = j.at("record_id").get<std::string>();
  r.seed = j.at("seed").get<uint64_t>();
  r.state_before = state_from_json(env, j.at("state_before"));
  r.action.tool = j.at("action").at("tool").get<std::string>();
  for (const auto& p : j.at("action").at("params")) {
    if (p.is_number_integer()) {
      r.action.params.push_back(std::to_string(p.get<long long>()));
    } else {
      r.action.params.push_back(p.get<std::string>());
    }
  }
  const json& o = j.at("outcome");
  if (o.at("status") == "success") {
    r.outcome = StepOutcome::success(state_from_json(env, o.at("state_after")));
  } else {
    r.outcome = StepOutcome::invalid(o.at("reason").get<std::string>());
  }
  return r;
}

ReplayReport replay_trace(const std::vector<ExecutionRecord>& records) {
  ReplayReport report;
  report.total = records.size();
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    EnvId env;
    try {
      env = r.env();
    } catch (const EnvError& e) {
      report.mismatches.push_back({i, r.record_id, e.what()});
      continue;
    }
    StepOutcome actual = step(env, r.state_before, r.action);
    if (actual.ok() != r.outcome.ok()) {
      report.mismatches.push_back({i, r.record_id, "executability differs"});
      continue;
    }
    if (actual.ok()) {
      if (hash_state(env, *actual.state_after) != hash_state(env, *r.outcome.state_after))
        report.mismatches.push_back({i, r.record_id, "state_after differs"});
    } else if (actual.reason != r.outcome.reason) {
      report.mismatches.push_back(
          {i, r.record_id, "reason differs: " + actual.reason + " vs " + r.outcome.reason});
    }
  }
  return report;
}

CoverageStats coverage_report(const std::vector<ExecutionRecord>& records) {
  CoverageStats stats;
  stats.records = records.size();
  std::set<uint64_t> states;
  for (const auto& r : records) {
    states.insert(hash_state(r.env(), r.state_before));
    if (r.outcome.ok()) {
      ++stats.success_count;
    } else {
      ++stats.invalid_count;
    }
    ++stats.per_tool[r.action.tool];
  }
  stats.distinct_states = states.size();
  return stats;
}

}  // namespace toolsim
