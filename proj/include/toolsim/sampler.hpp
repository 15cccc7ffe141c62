#pragma once

#include <cstdint>

#include "toolsim/env.hpp"
#include "toolsim/record.hpp"

namespace toolsim {

struct SamplerConfig {
  uint64_t seed = 0;
  size_t n = 0;
  int max_walk_depth = 8;
  // Target fraction of invalid records; held by rejection control.
  double invalid_ratio = 0.3;
  // Guided sampling: probability of replacing the planner action with the
  // same ratio-controlled random draw the random sampler uses.
  double epsilon = 0.1;
  bool dedup = false;
  InstanceOptions instance;
};

// Random walks over executable actions; at every visited state one candidate
// action (executable or not) is recorded with its true outcome.
std::vector<ExecutionRecord> sample_random_records(EnvId env, const SamplerConfig& cfg);

// States drawn from planner solution paths with epsilon-probability random
// action injection.
std::vector<ExecutionRecord> sample_guided_records(EnvId env, const SamplerConfig& cfg);

}  // namespace toolsim
