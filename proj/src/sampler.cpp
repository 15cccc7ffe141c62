#include "toolsim/sampler.hpp"

#include <future>
#include <set>

#include "toolsim/planner.hpp"
#include "toolsim/rng.hpp"

namespace toolsim {

namespace {

constexpr size_t kShardSize = 1024;

// Ratio-controlled candidate draw: invalid with probability `invalid_ratio`,
// falling back to whichever bucket is non-empty.
std::pair<Action, StepOutcome> draw_candidate(EnvId env, const State& state, Rng& rng,
                                              double invalid_ratio) {
  auto candidates = enumerate_actions(env, state);
  std::vector<std::pair<Action, StepOutcome>> valid, invalid;
  for (auto& c : candidates) {
    (c.second.ok() ? valid : invalid).push_back(c);
  }
  bool want_invalid = rng.chance(invalid_ratio);
  const auto& bucket = want_invalid ? (invalid.empty() ? valid : invalid)
                                    : (valid.empty() ? invalid : valid);
  return bucket[rng.below(bucket.size())];
}

std::optional<Action> random_executable(EnvId env, const State& state, Rng& rng) {
  std::vector<Action> valid;
  for (const auto& [a, out] : enumerate_actions(env, state)) {
    if (out.ok()) valid.push_back(a);
  }
  if (valid.empty()) return std::nullopt;
  return valid[rng.below(valid.size())];
}

ExecutionRecord make_record(EnvId env, uint64_t seed, const std::string& id,
                            const State& state, const Action& action,
                            StepOutcome outcome) {
  ExecutionRecord r;
  r.env_id = to_string(env);
  r.record_id = id;
  r.seed = seed;
  r.state_before = canonicalize(env, state);
  r.action = action;
  r.outcome = std::move(outcome);
  return r;
}

template <class ShardFn>
std::vector<ExecutionRecord> run_sharded(size_t n, ShardFn&& fn) {
  size_t shards = (n + kShardSize - 1) / kShardSize;
  std::vector<std::vector<ExecutionRecord>> results(shards);
  std::vector<std::future<void>> jobs;
  for (size_t s = 0; s < shards; ++s) {
    size_t lo = s * kShardSize;
    size_t hi = std::min(n, lo + kShardSize);
    jobs.push_back(std::async(std::launch::async,
                              [&, s, lo, hi] { results[s] = fn(s, lo, hi); }));
  }
  for (auto& j : jobs) j.get();
  std::vector<ExecutionRecord> out;
  out.reserve(n);
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<ExecutionRecord> dedup_records(std::vector<ExecutionRecord> records) {
  std::set<std::pair<uint64_t, std::string>> seen;
  std::vector<ExecutionRecord> out;
  for (auto& r : records) {
    auto key = std::make_pair(hash_state(r.env(), r.state_before), r.action.to_text());
    if (seen.insert(key).second) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ExecutionRecord> sample_random_records(EnvId env, const SamplerConfig& cfg) {
  if (cfg.n == 0) return {};
  auto shard_fn = [&](size_t shard, size_t lo, size_t hi) {
    Rng rng(mix_seed(cfg.seed, shard));
    std::vector<ExecutionRecord> out;
    size_t index = lo;
    while (index < hi) {
      uint64_t walk_seed = rng.next_u64();
      Rng walk(walk_seed);
      State state = sample_instance(env, walk.next_u64(), cfg.instance).init;
      for (int depth = 0; depth <= cfg.max_walk_depth && index < hi; ++depth) {
        auto [action, outcome] = draw_candidate(env, state, walk, cfg.invalid_ratio);
        std::string id = std::string(to_string(env)) + "-r" + std::to_string(index);
        out.push_back(make_record(env, walk_seed, id, state, action, std::move(outcome)));
        ++index;
        auto next = random_executable(env, state, walk);
        if (!next) break;
        state = *step(env, state, *next).state_after;
      }
    }
    return out;
  };
  auto records = run_sharded(cfg.n, shard_fn);
  return cfg.dedup ? dedup_records(std::move(records)) : records;
}

std::vector<ExecutionRecord> sample_guided_records(EnvId env, const SamplerConfig& cfg) {
  if (cfg.n == 0) return {};
  auto shard_fn = [&](size_t shard, size_t lo, size_t hi) {
    Rng rng(mix_seed(cfg.seed ^ 0x5eedULL, shard));
    std::vector<ExecutionRecord> out;
    size_t index = lo;
    int failures = 0;
    while (index < hi) {
      uint64_t inst_seed = rng.next_u64();
      Instance inst = sample_instance(env, inst_seed, cfg.instance);
      auto p = plan(env, inst.init, inst.goal);
      if (!p || p->actions.empty()) {
        if (++failures > 50)
          throw EnvError("sample_guided_records: repeated planner failures");
        continue;
      }
      failures = 0;
      State state = inst.init;
      for (const auto& planned : p->actions) {
        if (index >= hi) break;
        Action recorded = planned;
        StepOutcome outcome;
        if (rng.chance(cfg.epsilon)) {
          auto [a, o] = draw_candidate(env, state, rng, cfg.invalid_ratio);
          recorded = a;
          outcome = o;
        } else {
          outcome = step(env, state, recorded);
        }
        std::string id = std::string(to_string(env)) + "-g" + std::to_string(index);
        out.push_back(make_record(env, inst_seed, id, state, recorded, std::move(outcome)));
        ++index;
        state = *step(env, state, planned).state_after;
      }
    }
    return out;
  };
  auto records = run_sharded(cfg.n, shard_fn);
  return cfg.dedup ? dedup_records(std::move(records)) : records;
}

}  // namespace toolsim
