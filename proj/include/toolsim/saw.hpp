#pragma once

#include <cstdint>

#include "toolsim/env.hpp"

namespace toolsim::saw {

// Add(c): append c and its alphabet successor. Swap(c): swap the leftmost
// occurrence of c that has a differing right neighbor with that neighbor
// (swapping equal letters would be a no-op and is rejected).
StepOutcome step(const SawState& state, const Action& action);

// All 52 candidate actions (26 Add + 26 Swap) with their true outcomes.
std::vector<std::pair<Action, StepOutcome>> enumerate_actions(const SawState& state);

bool is_goal(const SawState& state, const SawGoal& goal);

// Uniform length in [min_len, max_len], letters i.i.d. uniform over a-z.
SawGoal sample_goal(uint64_t seed, int min_len = 2, int max_len = 10);

std::string render(const SawState& state);  // ['b','a','n']
SawState parse(const std::string& text);

}  // namespace toolsim::saw
