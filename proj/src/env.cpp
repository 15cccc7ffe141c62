#include "toolsim/env.hpp"

#include <algorithm>

#include "toolsim/blocksworld.hpp"
#include "toolsim/logistics.hpp"
#include "toolsim/planner.hpp"
#include "toolsim/rng.hpp"
#include "toolsim/saw.hpp"

namespace toolsim {

const char* to_string(EnvId id) {
  switch (id) {
    case EnvId::Saw: return "saw";
    case EnvId::Bw: return "bw";
    case EnvId::Log: return "log";
  }
  return "?";
}

EnvId env_from_string(const std::string& s) {
  if (s == "saw") return EnvId::Saw;
  if (s == "bw") return EnvId::Bw;
  if (s == "log") return EnvId::Log;
  throw EnvError("unknown env_id: " + s);
}

namespace {

bool numeric(const std::string& p) {
  if (p.empty()) return false;
  for (char c : p) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

std::string Action::to_text() const {
  std::string out = tool + "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out += ",";
    if (numeric(params[i])) {
      out += params[i];
    } else {
      out += "'" + params[i] + "'";
    }
  }
  out += ")";
  return out;
}

const LogCity* LogState::city_of(int location) const {
  for (const auto& c : cities) {
    for (int l : c.locations) {
      if (l == location) return &c;
    }
  }
  return nullptr;
}

StepOutcome step(EnvId env, const State& state, const Action& action) {
  switch (env) {
    case EnvId::Saw: return saw::step(std::get<SawState>(state), action);
    case EnvId::Bw: return bw::step(std::get<BwState>(state), action);
    case EnvId::Log: return lg::step(std::get<LogState>(state), action);
  }
  throw EnvError("bad env");
}

std::vector<std::pair<Action, StepOutcome>> enumerate_actions(EnvId env, const State& state) {
  switch (env) {
    case EnvId::Saw: return saw::enumerate_actions(std::get<SawState>(state));
    case EnvId::Bw: return bw::enumerate_actions(std::get<BwState>(state));
    case EnvId::Log: return lg::enumerate_actions(std::get<LogState>(state));
  }
  throw EnvError("bad env");
}

bool is_goal(EnvId env, const State& state, const Goal& goal) {
  switch (env) {
    case EnvId::Saw: return saw::is_goal(std::get<SawState>(state), std::get<SawGoal>(goal));
    case EnvId::Bw: return bw::is_goal(std::get<BwState>(state), std::get<BwGoal>(goal));
    case EnvId::Log: return lg::is_goal(std::get<LogState>(state), std::get<LogGoal>(goal));
  }
  throw EnvError("bad env");
}

State canonicalize(EnvId env, const State& state) {
  switch (env) {
    case EnvId::Saw: return state;  // already canonical
    case EnvId::Bw: return bw::canonicalize(std::get<BwState>(state));
    case EnvId::Log: return lg::canonicalize(std::get<LogState>(state));
  }
  throw EnvError("bad env");
}

std::string render_state(EnvId env, const State& state) {
  switch (env) {
    case EnvId::Saw: return saw::render(std::get<SawState>(state));
    case EnvId::Bw: return bw::render(std::get<BwState>(state));
    case EnvId::Log: return lg::render(std::get<LogState>(state));
  }
  throw EnvError("bad env");
}

State parse_state(EnvId env, const std::string& text) {
  switch (env) {
    case EnvId::Saw: return saw::parse(text);
    case EnvId::Bw: return bw::parse(text);
    case EnvId::Log: return lg::parse(text);
  }
  throw EnvError("bad env");
}

uint64_t hash_state(EnvId env, const State& state) {
  std::string key = std::string(to_string(env)) + "|" + render_state(env, canonicalize(env, state));
  return fnv1a64(key);
}

json state_to_json(EnvId env, const State& state) {
  switch (env) {
    case EnvId::Saw: {
      const auto& s = std::get<SawState>(state);
      std::vector<std::string> letters;
      for (char c : s.letters) letters.emplace_back(1, c);
      return json{{"letters", letters}};
    }
    case EnvId::Bw:
      return json::parse(bw::render(std::get<BwState>(state)));
    case EnvId::Log:
      return json::parse(lg::render(std::get<LogState>(state)));
  }
  throw EnvError("bad env");
}

State state_from_json(EnvId env, const json& j) {
  switch (env) {
    case EnvId::Saw: {
      SawState s;
      for (const auto& l : j.at("letters")) {
        auto v = l.get<std::string>();
        if (v.size() != 1) throw EnvError("bad saw letter: " + v);
        s.letters += v;
      }
      return s;
    }
    case EnvId::Bw:
      return bw::parse(j.dump());
    case EnvId::Log:
      return lg::parse(j.dump());
  }
  throw EnvError("bad env");
}

json goal_to_json(const Goal& goal) {
  if (const auto* g = std::get_if<SawGoal>(&goal)) return json{{"target", g->target}};
  if (const auto* g = std::get_if<BwGoal>(&goal)) {
    json on = json::array();
    for (const auto& [a, b] : g->on) on.push_back({a, b});
    return json{{"on", on}};
  }
  const auto& g = std::get<LogGoal>(goal);
  return json{{"package", g.package}, {"target_location", g.target_location}};
}

Goal goal_from_json(EnvId env, const json& j) {
  switch (env) {
    case EnvId::Saw: return SawGoal{j.at("target").get<std::string>()};
    case EnvId::Bw: {
      BwGoal g;
      for (const auto& pair : j.at("on"))
        g.on.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
      return g;
    }
    case EnvId::Log:
      return LogGoal{j.at("package").get<std::string>(), j.at("target_location").get<int>()};
  }
  throw EnvError("bad env");
}

std::string render_goal(EnvId env, const Goal& goal) {
  switch (env) {
    case EnvId::Saw:
      return "build a string that contains '" + std::get<SawGoal>(goal).target +
             "' as a contiguous substring";
    case EnvId::Bw: {
      const auto& g = std::get<BwGoal>(goal);
      std::string out = "arrange the blocks so that";
      for (size_t i = 0; i < g.on.size(); ++i) {
        if (i) out += " and";
        if (g.on[i].second == "table") {
          out += " the " + g.on[i].first + " block is on the table";
        } else {
          out += " the " + g.on[i].first + " block is on top of the " + g.on[i].second + " block";
        }
      }
      return out;
    }
    case EnvId::Log: {
      const auto& g = std::get<LogGoal>(goal);
      return "transport package " + g.package + " to location " +
             std::to_string(g.target_location);
    }
  }
  throw EnvError("bad env");
}

std::variant<Action, std::string> parse_action_text(const std::string& text, EnvId env) {
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string t = trim(text);
  size_t open = t.find('(');
  if (open == std::string::npos || t.back() != ')') return std::string("parse_error");
  std::string tool = trim(t.substr(0, open));
  auto names = tool_names(env);
  if (std::find(names.begin(), names.end(), tool) == names.end())
    return std::string("unknown_tool");
  std::string inner = t.substr(open + 1, t.size() - open - 2);
  Action a;
  a.tool = tool;
  std::string param;
  auto push = [&](std::string p) {
    p = trim(p);
    if (p.size() >= 2 && ((p.front() == '\'' && p.back() == '\'') ||
                          (p.front() == '"' && p.back() == '"'))) {
      p = p.substr(1, p.size() - 2);
    }
    a.params.push_back(p);
  };
  if (trim(inner).empty()) return std::string("parse_error");
  for (char c : inner) {
    if (c == ',') {
      push(param);
      param.clear();
    } else {
      param += c;
    }
  }
  push(param);
  for (const auto& p : a.params) {
    if (p.empty()) return std::string("parse_error");
  }
  return a;
}

std::vector<std::string> tool_names(EnvId env) {
  switch (env) {
    case EnvId::Saw: return {"Add", "Swap"};
    case EnvId::Bw: return {"Pick", "Stack"};
    case EnvId::Log: return {"Truck", "Plane"};
  }
  throw EnvError("bad env");
}

const std::string& tool_docs(EnvId env) {
  static const std::string saw_docs =
      "You are building a string of lowercase letters, starting from the empty string. "
      "States are shown as lists of letters, e.g. ['b','a','n'].\n"
      "Tools:\n"
      "- Add('x'): appends the letter x and its alphabet successor to the end of the "
      "string (Add('a') on [] gives ['a','b']). Invalid for 'z', which has no successor.\n"
      "- Swap('x'): swaps the leftmost occurrence of x that has a different letter to "
      "its right with that neighbor (Swap('a') on ['a','b'] gives ['b','a']). Invalid if "
      "no such occurrence exists.\n"
      "Actions are written Add('x') or Swap('x').";
  static const std::string bw_docs =
      "You are stacking uniquely colored blocks with a single hand that holds at most "
      "one block. States are shown as {\"hand\":...,\"stacks\":[[bottom,...,top],...]}.\n"
      "Tools:\n"
      "- Pick('color'): takes the block into the hand. Invalid if the block has another "
      "block on top of it or the hand already holds a block.\n"
      "- Stack('color') / Stack('table'): puts the held block on top of the named block, "
      "or on the table as a new stack. Invalid if the hand is empty or the target block "
      "is covered.\n"
      "Actions are written Pick('yellow'), Stack('white'), Stack('table').";
  static const std::string log_docs =
      "You are routing a package between numbered locations. Locations are grouped "
      "into cities; each city has exactly one airport location. States are shown as "
      "JSON with cities, trucks, planes, and packages.\n"
      "Tools:\n"
      "- Truck(from,to): drives a truck between two locations of the same city. The "
      "truck and every package at `from` move to `to`. Invalid if no truck is at "
      "`from` or the locations are in different cities.\n"
      "- Plane(from,to): flies a plane between the airports of two different cities. "
      "The plane and every package at `from` move to `to`. Invalid if no plane is at "
      "`from` or either location is not an airport.\n"
      "Actions are written Truck(1,2), Plane(2,4).";
  switch (env) {
    case EnvId::Saw: return saw_docs;
    case EnvId::Bw: return bw_docs;
    case EnvId::Log: return log_docs;
  }
  throw EnvError("bad env");
}

EnvDescriptor describe_env(EnvId env) {
  EnvDescriptor d;
  d.env_id = to_string(env);
  d.docs = tool_docs(env);
  d.docs_hash = fnv1a64(d.docs);
  return d;
}

Instance sample_instance(EnvId env, uint64_t seed, const InstanceOptions& opt) {
  switch (env) {
    case EnvId::Saw: {
      // A small fraction of letter sequences cannot be spelled by the
      // reference planner; instances are drawn from the plannable set so every
      // sampled episode has a known solution. The retry chain is a pure
      // function of the seed, so sampling stays deterministic.
      SawGoal goal = saw::sample_goal(seed, opt.saw_min_len, opt.saw_max_len);
      for (uint64_t attempt = 1; attempt <= 64 && !plan_saw(goal); ++attempt)
        goal = saw::sample_goal(mix_seed(seed, attempt), opt.saw_min_len, opt.saw_max_len);
      return {SawState{}, goal};
    }
    case EnvId::Bw: {
      auto [init, goal] = bw::sample_instance(seed, opt.bw_blocks);
      return {init, goal};
    }
    case EnvId::Log: {
      auto [init, goal] = lg::sample_instance(seed, opt.log_cities, opt.log_locs_per_city);
      return {init, goal};
    }
  }
  throw EnvError("bad env");
}

}  // namespace toolsim
