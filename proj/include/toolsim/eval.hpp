#pragma once

#include <cstdint>

#include "toolsim/agent.hpp"
#include "toolsim/env.hpp"

namespace toolsim {

struct EpisodeConfig {
  uint64_t seed = 0;
  int budget = 0;  // 0: max(30, 2 * oracle plan length + 4)
  InstanceOptions instance;
};

struct EpisodeStep {
  std::string thought;
  Action action;
  bool executed = false;
  std::string result;  // rendered state, or "invalid: <reason>"
};

struct EpisodeResult {
  std::string episode_id;
  std::string env_id;
  uint64_t seed = 0;
  bool success = false;
  std::string failure_reason;  // budget_exhausted | protocol_error | timeout
  int steps_used = 0;
  int invalid_steps = 0;
  std::vector<EpisodeStep> transcript;
};

EpisodeResult run_episode(EnvId env, Agent& agent, const EpisodeConfig& cfg);

struct SuiteConfig {
  uint64_t seed = 0;
  size_t episodes = 0;
  int budget = 0;
  InstanceOptions instance;
};

struct EvalReport {
  std::string env_id;
  std::string agent;
  size_t episodes = 0;
  size_t successes = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double invalid_rate = 0.0;  // invalid turns over all turns taken
  std::vector<EpisodeResult> results;
};

// Episodes run sequentially; episode i uses an eval-namespaced seed derived
// from (cfg.seed, i) so dataset and eval instances never collide.
EvalReport run_suite(EnvId env, Agent& agent, const SuiteConfig& cfg);

uint64_t eval_episode_seed(uint64_t suite_seed, size_t index);

json report_to_json(const EvalReport& r, bool include_transcripts = false);

}  // namespace toolsim
