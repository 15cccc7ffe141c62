#include "toolsim/agent.hpp"

#include <algorithm>
#include <regex>

#include <httplib.h>

#include "toolsim/rng.hpp"
#include "toolsim/subprocess.hpp"

namespace toolsim {

json observation_to_json(const Observation& o) {
  json history = json::array();
  for (const auto& h : o.history) {
    history.push_back({{"thought", h.thought}, {"action", h.action}, {"result", h.result}});
  }
  json j{{"episode_id", o.episode_id},
         {"step", o.step},
         {"env_id", o.env_id},
         {"tool_docs", o.tool_docs},
         {"goal", o.goal},
         {"state", o.state},
         {"history", history}};
  j["last_error"] = o.last_error ? json(*o.last_error) : json(nullptr);
  return j;
}

Observation observation_from_json(const json& j) {
  Observation o;
  o.episode_id = j.at("episode_id").get<std::string>();
  o.step = j.at("step").get<int>();
  o.env_id = j.at("env_id").get<std::string>();
  o.tool_docs = j.at("tool_docs").get<std::string>();
  o.goal = j.at("goal").get<std::string>();
  o.state = j.at("state").get<std::string>();
  for (const auto& h : j.at("history")) {
    o.history.push_back({h.at("thought").get<std::string>(), h.at("action").get<std::string>(),
                         h.at("result").get<std::string>()});
  }
  if (j.contains("last_error") && !j.at("last_error").is_null())
    o.last_error = j.at("last_error").get<std::string>();
  return o;
}

json reply_to_json(const AgentReply& r) {
  return json{{"thought", r.thought}, {"tool", r.tool}, {"input", r.input}};
}

AgentReply reply_from_json(const json& j) {
  AgentReply r;
  r.thought = j.value("thought", "");
  r.tool = j.at("tool").get<std::string>();
  for (const auto& p : j.at("input")) {
    if (p.is_string()) {
      r.input.push_back(p.get<std::string>());
    } else if (p.is_number_integer()) {
      r.input.push_back(std::to_string(p.get<long long>()));
    } else {
      throw AgentError("protocol_error: non-scalar action input");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Goal prose parsing (inverse of render_goal)

namespace {

Goal parse_goal_text(EnvId env, const std::string& text) {
  switch (env) {
    case EnvId::Saw: {
      size_t open = text.find('\'');
      size_t close = text.rfind('\'');
      if (open == std::string::npos || close <= open)
        throw AgentError("protocol_error: bad saw goal text");
      return SawGoal{text.substr(open + 1, close - open - 1)};
    }
    case EnvId::Bw: {
      BwGoal g;
      static const std::regex rel(
          "the ([a-z]+) block is on (?:top of the ([a-z]+) block|the table)");
      for (auto it = std::sregex_iterator(text.begin(), text.end(), rel);
           it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        g.on.emplace_back(m[1].str(), m[2].matched ? m[2].str() : "table");
      }
      if (g.on.empty()) throw AgentError("protocol_error: bad bw goal text");
      return g;
    }
    case EnvId::Log: {
      const std::string pkg_tag = "package ";
      const std::string loc_tag = " to location ";
      size_t p = text.find(pkg_tag);
      size_t l = text.find(loc_tag);
      if (p == std::string::npos || l == std::string::npos)
        throw AgentError("protocol_error: bad log goal text");
      std::string package = text.substr(p + pkg_tag.size(), l - p - pkg_tag.size());
      return LogGoal{package, std::stoi(text.substr(l + loc_tag.size()))};
    }
  }
  throw AgentError("bad env");
}

}  // namespace

AgentReply OracleAgent::act(const Observation& obs) {
  EnvId env = env_from_string(obs.env_id);
  if (obs.episode_id != episode_ || obs.step == 0 || queue_.empty()) {
    State state = parse_state(env, obs.state);
    Goal goal = parse_goal_text(env, obs.goal);
    auto p = plan(env, state, goal);
    if (!p || p->actions.empty()) throw AgentError("oracle: no plan from current state");
    episode_ = obs.episode_id;
    queue_ = p->actions;
  }
  Action next = queue_.front();
  queue_.erase(queue_.begin());
  AgentReply r;
  r.thought = "Following the plan, the next action is " + next.to_text() + ".";
  r.tool = next.tool;
  r.input = next.params;
  return r;
}

AgentReply RandomAgent::act(const Observation& obs) {
  EnvId env = env_from_string(obs.env_id);
  State state = parse_state(env, obs.state);
  Rng rng(mix_seed(seed_, mix_seed(fnv1a64(obs.episode_id), obs.step)));
  auto candidates = enumerate_actions(env, state);
  const Action& a = candidates[rng.below(candidates.size())].first;
  AgentReply r;
  r.thought = "Trying " + a.to_text() + ".";
  r.tool = a.tool;
  r.input = a.params;
  return r;
}

AgentReply AlwaysInvalidAgent::act(const Observation& obs) {
  EnvId env = env_from_string(obs.env_id);
  State state = parse_state(env, obs.state);
  for (const auto& [a, out] : enumerate_actions(env, state)) {
    if (!out.ok()) {
      AgentReply r;
      r.thought = "Trying " + a.to_text() + ".";
      r.tool = a.tool;
      r.input = a.params;
      return r;
    }
  }
  throw AgentError("always-invalid: every candidate action is executable");
}

CommandAgent::CommandAgent(const std::string& command, int timeout_ms)
    : proc_(std::make_unique<Subprocess>(command)), timeout_ms_(timeout_ms) {}

CommandAgent::~CommandAgent() = default;

AgentReply CommandAgent::act(const Observation& obs) {
  try {
    proc_->write_line(observation_to_json(obs).dump());
  } catch (const SubprocessError& e) {
    throw AgentError(std::string("protocol_error: ") + e.what());
  }
  auto line = proc_->read_line(timeout_ms_);
  if (!line) throw AgentError("timeout: agent produced no reply line");
  try {
    return reply_from_json(json::parse(*line));
  } catch (const json::exception& e) {
    throw AgentError(std::string("protocol_error: bad reply json: ") + e.what());
  }
}

HttpAgent::HttpAgent(const std::string& host, int port, const std::string& path, int timeout_ms)
    : host_(host), port_(port), path_(path), timeout_ms_(timeout_ms) {}

AgentReply HttpAgent::act(const Observation& obs) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(0, timeout_ms_ * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  auto res = client.Post(path_, observation_to_json(obs).dump(), "application/json");
  if (!res) throw AgentError("timeout: http agent unreachable");
  if (res->status != 200)
    throw AgentError("protocol_error: http status " + std::to_string(res->status));
  try {
    return reply_from_json(json::parse(res->body));
  } catch (const json::exception& e) {
    throw AgentError(std::string("protocol_error: bad reply json: ") + e.what());
  }
}

std::unique_ptr<Agent> make_scripted_agent(const std::string& name, uint64_t seed) {
  if (name == "oracle") return std::make_unique<OracleAgent>();
  if (name == "random") return std::make_unique<RandomAgent>(seed);
  if (name == "always-invalid") return std::make_unique<AlwaysInvalidAgent>();
  throw AgentError("unknown scripted agent: " + name);
}

}  // namespace toolsim
