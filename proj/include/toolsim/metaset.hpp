#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "toolsim/env.hpp"
#include "toolsim/record.hpp"
#include "toolsim/templates.hpp"

namespace toolsim {

// One QA pair, machine-checkable against the environment oracle.
struct MetaSample {
  std::string sample_id;
  std::string env_id;
  MetaTaskKind kind = MetaTaskKind::Effect;
  std::string template_id;
  std::string question;
  std::string answer;
  std::vector<std::string> record_ids;
  uint64_t seed = 0;
};

// Multi-turn arrangement; turns share env, meta-task kind, and template so
// the flat serialization stays unambiguous.
struct Conversation {
  std::string id;
  std::string env_id;
  MetaTaskKind kind = MetaTaskKind::Effect;
  std::string template_id;
  std::vector<MetaSample> turns;
  uint64_t seed = 0;
};

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

MetaSample build_meta_sample(const ExecutionRecord& record, MetaTaskKind kind,
                             const Template& tmpl, uint64_t seed);

// Alternative action for counterfact questions: executable at the record's
// initial state and different from the recorded action.
Action sample_alt_action(const ExecutionRecord& record, uint64_t seed);

// Perturbs the outcome state into one verified unreachable in one step.
MetaSample build_output_boundary_negative(const ExecutionRecord& record,
                                          const Template& tmpl, uint64_t seed);

struct VerifyFailure {
  std::string conversation_id;
  size_t turn = 0;
  std::string kind;
  std::string message;
};

struct VerifyReport {
  size_t total = 0;
  size_t passed = 0;
  std::vector<VerifyFailure> failures;

  bool all_pass() const { return failures.empty(); }
};

// Re-derives every question's facts by inverting its template, then checks
// the answer against the environment oracle. Counterfact turns additionally
// need their provenance record.
VerifyReport verify_metaset(const std::vector<Conversation>& conversations,
                            const RecordStore& records,
                            const std::vector<Template>& templates);

std::vector<Conversation> arrange_multiturn(const std::vector<MetaSample>& samples,
                                            uint64_t seed, int turns_min, int turns_max);

using ContextHook = std::function<std::string(const ExecutionRecord&)>;

// "Calling {tool} with {params} on {state} returned {outcome}." An external
// rewriter hook replaces the deterministic template when provided.
std::string contextualize_state(const ExecutionRecord& record, const ContextHook& hook = nullptr);

// System prompt with tool documentation plus k seeded demonstrations per
// meta-task kind.
std::string build_icl_prompt(const std::vector<MetaSample>& metaset, uint64_t seed,
                             int k_per_task, EnvId env);

// ---------------------------------------------------------------------------
// Corpus pipeline

struct MetasetConfig {
  uint64_t seed = 0;
  size_t n = 0;                  // total samples, uniform across the six kinds
  double boundary_balance = 0.5;  // positive fraction for boundary kinds
  int turns_min = 1;
  int turns_max = 1;
};

// Routes records into the six kinds, builds and arranges samples. Throws
// BuildError when the record stream cannot fill the quotas.
std::vector<Conversation> build_metaset(const std::vector<ExecutionRecord>& records,
                                        const std::vector<Template>& templates,
                                        const MetasetConfig& cfg);

json conversation_to_json(const Conversation& c);
Conversation conversation_from_json(const json& j);

std::vector<MetaSample> flatten(const std::vector<Conversation>& conversations);

}  // namespace toolsim
