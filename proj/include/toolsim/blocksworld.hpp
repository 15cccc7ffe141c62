#pragma once

#include <cstdint>

#include "toolsim/env.hpp"

namespace toolsim::bw {

// Fixed color vocabulary; instances use the first n colors.
const std::vector<std::string>& palette();

StepOutcome step(const BwState& state, const Action& action);

// Candidates: Pick(c) and Stack(c) for every instance color, plus Stack('table').
std::vector<std::pair<Action, StepOutcome>> enumerate_actions(const BwState& state);

// Every (above, below) relation holds and the hand is empty.
bool is_goal(const BwState& state, const BwGoal& goal);

// Random initial stacking uniform over block configurations, plus a random
// satisfiable goal that is not met initially. 3 <= n_blocks <= 6.
std::pair<BwState, BwGoal> sample_instance(uint64_t seed, int n_blocks);

// All hand-empty configurations of the given colors, canonical and sorted.
std::vector<BwState> all_configurations(const std::vector<std::string>& colors);

// Instance colors in palette order (stacks plus hand).
std::vector<std::string> colors_of(const BwState& state);

BwState canonicalize(const BwState& state);
std::string render(const BwState& state);  // compact JSON
BwState parse(const std::string& text);

}  // namespace toolsim::bw
