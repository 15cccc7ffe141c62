#pragma once

#include <cstdint>

#include "toolsim/env.hpp"

namespace toolsim::lg {

// Truck(from,to): same-city move; Plane(from,to): airport-to-airport move
// across cities. The vehicle and every package at `from` move to `to`.
StepOutcome step(const LogState& state, const Action& action);

// Candidates: every ordered location pair for each tool.
std::vector<std::pair<Action, StepOutcome>> enumerate_actions(const LogState& state);

bool is_goal(const LogState& state, const LogGoal& goal);

// One truck per city, one plane, one package; the goal location differs from
// the package's start.
std::pair<LogState, LogGoal> sample_instance(uint64_t seed, int n_cities, int locs_per_city);

std::vector<int> all_locations(const LogState& state);

LogState canonicalize(const LogState& state);
std::string render(const LogState& state);  // compact JSON
LogState parse(const std::string& text);

}  // namespace toolsim::lg
