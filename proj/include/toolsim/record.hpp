#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toolsim/env.hpp"

namespace toolsim {

// One observed tool execution, including rejected attempts.
struct ExecutionRecord {
  std::string env_id;
  std::string record_id;
  uint64_t seed = 0;
  State state_before;
  Action action;
  StepOutcome outcome;

  EnvId env() const { return env_from_string(env_id); }
};

json record_to_json(const ExecutionRecord& r);
ExecutionRecord record_from_json(const json& j);

struct ReplayMismatch {
  size_t index = 0;
  std::string record_id;
  std::string detail;
};

struct ReplayReport {
  size_t total = 0;
  std::vector<ReplayMismatch> mismatches;

  bool all_match() const { return mismatches.empty(); }
};

// Recomputes every record's outcome from (state_before, action) and compares.
ReplayReport replay_trace(const std::vector<ExecutionRecord>& records);

struct CoverageStats {
  size_t records = 0;
  size_t distinct_states = 0;
  size_t success_count = 0;
  size_t invalid_count = 0;
  std::map<std::string, size_t> per_tool;
};

CoverageStats coverage_report(const std::vector<ExecutionRecord>& records);

class RecordStore {
 public:
  RecordStore() = default;
  explicit RecordStore(const std::vector<ExecutionRecord>& records) {
    for (const auto& r : records) by_id_.emplace(r.record_id, r);
  }
  const ExecutionRecord* find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second;
  }
  size_t size() const { return by_id_.size(); }

 private:
  std::map<std::string, ExecutionRecord> by_id_;
};

}  // namespace toolsim
