#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace toolsim {

using json = nlohmann::json;

enum class EnvId { Saw, Bw, Log };

const char* to_string(EnvId id);
EnvId env_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Actions

struct Action {
  std::string tool;
  std::vector<std::string> params;

  bool operator==(const Action&) const = default;

  // Canonical text form: Add('a'), Stack('table'), Truck(1,2).
  std::string to_text() const;
};

// ---------------------------------------------------------------------------
// States

struct SawState {
  std::string letters;  // lowercase a-z, ordered

  bool operator==(const SawState&) const = default;
};

struct BwState {
  std::vector<std::vector<std::string>> stacks;  // bottom -> top
  std::optional<std::string> hand;

  bool operator==(const BwState&) const = default;
};

struct LogCity {
  int id = 0;
  std::vector<int> locations;
  int airport = 0;

  bool operator==(const LogCity&) const = default;
};

struct LogState {
  std::vector<LogCity> cities;
  std::map<std::string, int> trucks;
  std::map<std::string, int> planes;
  std::map<std::string, int> packages;

  bool operator==(const LogState&) const = default;

  const LogCity* city_of(int location) const;
};

using State = std::variant<SawState, BwState, LogState>;

// ---------------------------------------------------------------------------
// Step outcomes

struct StepOutcome {
  std::optional<State> state_after;  // set iff the action executed
  std::string reason;                // machine-stable code, set iff invalid

  bool ok() const { return state_after.has_value(); }

  static StepOutcome success(State s) { return {std::move(s), {}}; }
  static StepOutcome invalid(std::string why) { return {std::nullopt, std::move(why)}; }
};

// ---------------------------------------------------------------------------
// Goals

struct SawGoal {
  std::string target;  // length 2..10

  bool operator==(const SawGoal&) const = default;
};

struct BwGoal {
  // (above, below) pairs; below may be "table".
  std::vector<std::pair<std::string, std::string>> on;

  bool operator==(const BwGoal&) const = default;
};

struct LogGoal {
  std::string package;
  int target_location = 0;

  bool operator==(const LogGoal&) const = default;
};

using Goal = std::variant<SawGoal, BwGoal, LogGoal>;

// ---------------------------------------------------------------------------
// Per-environment operations (dispatch by EnvId; each env also exposes its
// concrete functions in saw.hpp / blocksworld.hpp / logistics.hpp).

StepOutcome step(EnvId env, const State& state, const Action& action);
std::vector<std::pair<Action, StepOutcome>> enumerate_actions(EnvId env, const State& state);
bool is_goal(EnvId env, const State& state, const Goal& goal);

State canonicalize(EnvId env, const State& state);
uint64_t hash_state(EnvId env, const State& state);

// Prompt-facing text rendering; parse_state is its exact inverse.
std::string render_state(EnvId env, const State& state);
State parse_state(EnvId env, const std::string& text);

json state_to_json(EnvId env, const State& state);
State state_from_json(EnvId env, const json& j);

json goal_to_json(const Goal& goal);
Goal goal_from_json(EnvId env, const json& j);
std::string render_goal(EnvId env, const Goal& goal);

// Parses the environment's action grammar, e.g. Pick('yellow') or Truck(1,2),
// tolerant of whitespace and quoting. Returns the action or a diagnostic code
// (unknown_tool, parse_error).
std::variant<Action, std::string> parse_action_text(const std::string& text, EnvId env);

// Fixed tool documentation handed to agents; hash-stable per environment.
const std::string& tool_docs(EnvId env);
std::vector<std::string> tool_names(EnvId env);

struct EnvDescriptor {
  std::string env_id;
  std::string docs;
  uint64_t docs_hash = 0;
};
EnvDescriptor describe_env(EnvId env);

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  State init;
  Goal goal;
};

struct InstanceOptions {
  int bw_blocks = 4;        // 3..6
  int log_cities = 2;       // >= 1
  int log_locs_per_city = 3;  // >= 2
  int saw_min_len = 2;      // >= 2
  int saw_max_len = 10;     // <= 10
};

Instance sample_instance(EnvId env, uint64_t seed, const InstanceOptions& opt = {});

struct EnvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace toolsim
