#pragma once

#include <cstdint>
#include <optional>

#include "toolsim/env.hpp"

namespace toolsim {

struct Plan {
  std::vector<Action> actions;
  bool optimal = false;  // true only when produced by exhaustive search
};

// Exhaustive breadth-first search over canonical states. Optimal when it
// succeeds; bounded by node and depth caps.
std::optional<Plan> bfs_plan(EnvId env, const State& init, const Goal& goal,
                             size_t max_nodes = 200000, int max_depth = 64);

// Constructive planner per environment; every returned plan is replay-verified.
std::optional<Plan> plan_saw(const SawGoal& goal);
std::optional<Plan> plan_bw(const BwState& init, const BwGoal& goal);
std::optional<Plan> plan_log(const LogState& init, const LogGoal& goal);

std::optional<Plan> plan(EnvId env, const State& init, const Goal& goal);

// Replays a plan from init; true iff no step is invalid and the end state
// satisfies the goal.
bool plan_is_valid(EnvId env, const State& init, const Goal& goal,
                   const std::vector<Action>& actions);

// ---------------------------------------------------------------------------
// Solution corpora

struct SolutionStep {
  std::string thought;
  Action action;
  State state_after;
};

struct SolutionTrace {
  std::string id;
  std::string env_id;
  Goal goal;
  State init_state;
  std::vector<SolutionStep> steps;
  bool solved = false;
  bool optimal = false;
};

const std::vector<std::string>& thought_templates(EnvId env);

// Deterministic ReAct-style thought for one planned action.
std::string render_thought(EnvId env, const State& state, const Action& action,
                           const Goal& goal, const std::vector<std::string>& templates,
                           uint64_t seed);

struct PlannerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// n planned, annotated, replay-verified traces; shards run concurrently and
// merge in seed order.
std::vector<SolutionTrace> emit_solution_corpus(EnvId env, uint64_t seed, size_t n,
                                                const InstanceOptions& opt = {});

json trace_to_json(const SolutionTrace& t);
SolutionTrace trace_from_json(const json& j);

// Agent-ready chat rendering: system prompt with tool docs, assistant turns
// with thought and action, tool turns with the state feedback.
json trace_to_chat_json(const SolutionTrace& t);

}  // namespace toolsim
