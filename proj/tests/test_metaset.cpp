#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "toolsim/metaset.hpp"
#include "toolsim/rng.hpp"
#include "toolsim/sampler.hpp"

using namespace toolsim;

namespace {

ExecutionRecord success_record() {
  ExecutionRecord r;
  r.env_id = "saw";
  r.record_id = "saw-r0";
  r.seed = 1;
  r.state_before = SawState{"ab"};
  r.action = {"Swap", {"a"}};
  r.outcome = StepOutcome::success(SawState{"ba"});
  return r;
}

ExecutionRecord invalid_record() {
  ExecutionRecord r;
  r.env_id = "saw";
  r.record_id = "saw-r1";
  r.seed = 2;
  r.state_before = SawState{"ab"};
  r.action = {"Add", {"z"}};
  r.outcome = StepOutcome::invalid("no_successor");
  return r;
}

Template tmpl(MetaTaskKind kind) {
  return templates_for(default_templates(), kind).front();
}

std::vector<ExecutionRecord> corpus(EnvId env, size_t n, uint64_t seed) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.n = n;
  return sample_random_records(env, cfg);
}

std::vector<Conversation> wrap(const MetaSample& s) {
  Conversation c;
  c.id = "conv-0";
  c.env_id = s.env_id;
  c.kind = s.kind;
  c.template_id = s.template_id;
  c.turns = {s};
  return {c};
}

}  // namespace

TEST_CASE("effect sample masks the outcome") {
  auto s = build_meta_sample(success_record(), MetaTaskKind::Effect, tmpl(MetaTaskKind::Effect), 7);
  CHECK(s.question.find("['a','b']") != std::string::npos);
  CHECK(s.question.find("Swap('a')") != std::string::npos);
  CHECK(s.answer == "['b','a']");
  CHECK(s.record_ids == std::vector<std::string>{"saw-r0"});
}

TEST_CASE("decision sample answers with the action") {
  auto s = build_meta_sample(success_record(), MetaTaskKind::DecisionMaking,
                             tmpl(MetaTaskKind::DecisionMaking), 7);
  CHECK(s.answer == "Swap('a')");
  CHECK(s.question.find("['b','a']") != std::string::npos);
}

TEST_CASE("reversion sample answers with the prior state") {
  auto s = build_meta_sample(success_record(), MetaTaskKind::Reversion,
                             tmpl(MetaTaskKind::Reversion), 7);
  CHECK(s.answer == "['a','b']");
}

TEST_CASE("input boundary labels follow executability") {
  auto pos = build_meta_sample(success_record(), MetaTaskKind::InputBoundary,
                               tmpl(MetaTaskKind::InputBoundary), 7);
  CHECK(pos.answer == "yes");
  auto neg = build_meta_sample(invalid_record(), MetaTaskKind::InputBoundary,
                               tmpl(MetaTaskKind::InputBoundary), 7);
  CHECK(neg.answer == "no");
}

TEST_CASE("non-boundary kinds require successful records") {
  for (MetaTaskKind k : {MetaTaskKind::Effect, MetaTaskKind::DecisionMaking,
                         MetaTaskKind::Reversion, MetaTaskKind::Counterfact}) {
    CHECK_THROWS_AS(build_meta_sample(invalid_record(), k, tmpl(k), 7), BuildError);
  }
  CHECK_THROWS_AS(
      build_meta_sample(success_record(), MetaTaskKind::Effect, tmpl(MetaTaskKind::Reversion), 7),
      BuildError);
}

TEST_CASE("counterfact uses an executable alternative different from the recorded action") {
  auto r = success_record();
  for (uint64_t seed = 0; seed < 30; ++seed) {
    Action alt = sample_alt_action(r, seed);
    CHECK(alt != r.action);
    CHECK(step(r.env(), r.state_before, alt).ok());
  }
  auto s = build_meta_sample(r, MetaTaskKind::Counterfact, tmpl(MetaTaskKind::Counterfact), 3);
  CHECK(s.question.find("Swap('a')") != std::string::npos);
  CHECK(s.question.find("['b','a']") != std::string::npos);
  // The answer replays the alternative on the masked state.
  Action alt = sample_alt_action(r, 3);
  CHECK(s.answer == render_state(r.env(), *step(r.env(), r.state_before, alt).state_after));
}

TEST_CASE("output boundary negatives are provably unreachable") {
  for (EnvId env : {EnvId::Saw, EnvId::Bw, EnvId::Log}) {
    auto records = corpus(env, 60, 77);
    int built = 0;
    for (const auto& r : records) {
      if (!r.outcome.ok()) continue;
      auto s = build_output_boundary_negative(r, tmpl(MetaTaskKind::OutputBoundary), r.seed);
      CHECK(s.answer == "no");
      auto slots = invert_slots(tmpl(MetaTaskKind::OutputBoundary).question_pattern, s.question);
      REQUIRE(slots.has_value());
      State candidate = parse_state(env, slots->at("outcome"));
      bool reachable = false;
      for (const auto& [a, out] : enumerate_actions(env, r.state_before)) {
        if (out.ok() &&
            hash_state(env, *out.state_after) == hash_state(env, candidate))
          reachable = true;
      }
      CHECK_FALSE(reachable);
      ++built;
    }
    CHECK(built > 10);
  }
}

TEST_CASE("verify accepts sound samples and rejects corrupted ones") {
  RecordStore store({success_record(), invalid_record()});
  for (MetaTaskKind k : all_meta_tasks()) {
    auto s = build_meta_sample(success_record(), k, tmpl(k), 5);
    auto report = verify_metaset(wrap(s), store, default_templates());
    CHECK(report.total == 1);
    CHECK_MESSAGE(report.all_pass(), to_string(k));

    MetaSample corrupted = s;
    corrupted.answer = (k == MetaTaskKind::InputBoundary || k == MetaTaskKind::OutputBoundary)
                           ? "no"
                           : "['z','q']";
    CHECK_FALSE(verify_metaset(wrap(corrupted), store, default_templates()).all_pass());

    MetaSample mangled = s;
    mangled.question = "nonsense that matches no template";
    CHECK_FALSE(verify_metaset(wrap(mangled), store, default_templates()).all_pass());
  }

  // Missing provenance record.
  auto s = build_meta_sample(success_record(), MetaTaskKind::Effect, tmpl(MetaTaskKind::Effect), 5);
  s.record_ids = {"ghost"};
  CHECK_FALSE(verify_metaset(wrap(s), RecordStore{}, default_templates()).all_pass());
}

TEST_CASE("decision verification accepts any valid action formatting") {
  RecordStore store({success_record()});
  auto s = build_meta_sample(success_record(), MetaTaskKind::DecisionMaking,
                             tmpl(MetaTaskKind::DecisionMaking), 5);
  MetaSample variant = s;
  variant.answer = "Swap( \"a\" )";  // parse-tolerant formatting
  CHECK(verify_metaset(wrap(variant), store, default_templates()).all_pass());
}

TEST_CASE("build_metaset fills quotas, balances boundaries, and verifies") {
  for (EnvId env : {EnvId::Saw, EnvId::Bw, EnvId::Log}) {
    auto records = corpus(env, 2400, 13);
    MetasetConfig cfg;
    cfg.seed = 31;
    cfg.n = 600;
    auto conversations = build_metaset(records, default_templates(), cfg);
    auto samples = flatten(conversations);
    CHECK(samples.size() == cfg.n);

    std::map<std::string, size_t> per_kind;
    std::map<std::string, size_t> labels;
    for (const auto& s : samples) {
      ++per_kind[to_string(s.kind)];
      if (s.kind == MetaTaskKind::InputBoundary || s.kind == MetaTaskKind::OutputBoundary)
        ++labels[s.answer];
    }
    CHECK(per_kind.size() == 6);
    for (const auto& [kind, count] : per_kind) CHECK(count == cfg.n / 6);
    double yes = static_cast<double>(labels["yes"]) / (labels["yes"] + labels["no"]);
    CHECK(yes > 0.45);
    CHECK(yes < 0.55);

    RecordStore store(records);
    auto report = verify_metaset(conversations, store, default_templates());
    CHECK(report.total == cfg.n);
    std::string first_failure =
        report.failures.empty() ? std::string() : report.failures.front().message;
    CHECK_MESSAGE(report.all_pass(), first_failure);
  }
}

TEST_CASE("build_metaset is deterministic") {
  auto records = corpus(EnvId::Bw, 800, 17);
  MetasetConfig cfg;
  cfg.seed = 5;
  cfg.n = 120;
  auto a = build_metaset(records, default_templates(), cfg);
  auto b = build_metaset(records, default_templates(), cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(conversation_to_json(a[i]) == conversation_to_json(b[i]));
}

TEST_CASE("multi-turn conversations are homogeneous and cover all samples") {
  auto records = corpus(EnvId::Saw, 1200, 19);
  MetasetConfig cfg;
  cfg.seed = 23;
  cfg.n = 300;
  cfg.turns_min = 2;
  cfg.turns_max = 4;
  auto conversations = build_metaset(records, default_templates(), cfg);
  size_t turns = 0;
  for (const auto& c : conversations) {
    CHECK(c.turns.size() >= 1);
    CHECK(c.turns.size() <= 4);
    for (const auto& t : c.turns) {
      CHECK(t.kind == c.kind);
      CHECK(t.template_id == c.template_id);
      CHECK(t.env_id == c.env_id);
    }
    turns += c.turns.size();
  }
  CHECK(turns == cfg.n);
  RecordStore store(records);
  CHECK(verify_metaset(conversations, store, default_templates()).all_pass());
}

TEST_CASE("conversation json round trip keeps the line schema") {
  auto records = corpus(EnvId::Log, 600, 29);
  MetasetConfig cfg;
  cfg.seed = 3;
  cfg.n = 60;
  auto conversations = build_metaset(records, default_templates(), cfg);
  REQUIRE_FALSE(conversations.empty());
  json j = conversation_to_json(conversations.front());
  CHECK(j.contains("id"));
  CHECK(j.contains("env_id"));
  CHECK(j.contains("meta_task"));
  CHECK(j.contains("template_id"));
  CHECK(j.contains("turns"));
  CHECK(j.at("turns")[0].contains("question"));
  CHECK(j.at("turns")[0].contains("answer"));
  CHECK(j.at("provenance").contains("record_ids"));
  CHECK(j.at("provenance").contains("seed"));
  Conversation back = conversation_from_json(j);
  CHECK(conversation_to_json(back) == j);
}

TEST_CASE("contextualize_state renders the documented sentence shape") {
  ExecutionRecord r;
  r.env_id = "saw";
  r.record_id = "x";
  r.state_before = SawState{};
  r.action = {"Add", {"a"}};
  r.outcome = StepOutcome::success(SawState{"ab"});
  CHECK(contextualize_state(r) == "Calling Add with 'a' on [] returned ['a','b'].");

  ExecutionRecord bad = r;
  bad.action = {"Add", {"z"}};
  bad.outcome = StepOutcome::invalid("no_successor");
  CHECK(contextualize_state(bad) == "Calling Add with 'z' on [] was rejected: no_successor.");

  auto hook = [](const ExecutionRecord&) { return std::string("rewritten"); };
  CHECK(contextualize_state(r, hook) == "rewritten");
}

TEST_CASE("icl prompt embeds tool docs and exactly k demos per kind") {
  auto records = corpus(EnvId::Saw, 2400, 37);
  MetasetConfig cfg;
  cfg.seed = 41;
  cfg.n = 120;
  auto samples = flatten(build_metaset(records, default_templates(), cfg));
  std::string prompt = build_icl_prompt(samples, 9, 2, EnvId::Saw);
  CHECK(prompt.find(tool_docs(EnvId::Saw)) == 0);
  size_t count = 0;
  for (size_t pos = 0; (pos = prompt.find("\nQ: ", pos)) != std::string::npos; ++pos) ++count;
  CHECK(count == 12);
  CHECK(prompt == build_icl_prompt(samples, 9, 2, EnvId::Saw));
  CHECK(prompt != build_icl_prompt(samples, 10, 2, EnvId::Saw));
  CHECK_THROWS_AS(build_icl_prompt({}, 9, 2, EnvId::Saw), BuildError);
}
