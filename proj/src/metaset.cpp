#include "toolsim/metaset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "toolsim/blocksworld.hpp"
#include "toolsim/logistics.hpp"
#include "toolsim/rng.hpp"
#include "toolsim/saw.hpp"

namespace toolsim {

namespace {

std::string render_params(const Action& a) {
  std::string out;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (i) out += ",";
    bool num = !a.params[i].empty() &&
               a.params[i].find_first_not_of("0123456789") == std::string::npos;
    out += num ? a.params[i] : "'" + a.params[i] + "'";
  }
  return out;
}

bool states_equal(EnvId env, const State& a, const State& b) {
  return hash_state(env, a) == hash_state(env, b);
}

bool one_step_reachable(EnvId env, const State& from, const State& to) {
  for (const auto& [a, out] : enumerate_actions(env, from)) {
    if (out.ok() && states_equal(env, *out.state_after, to)) return true;
  }
  return false;
}

MetaSample make_sample(const ExecutionRecord& record, MetaTaskKind kind, const Template& tmpl,
                       uint64_t seed, const SlotMap& slots, const std::string& answer_value_slot) {
  MetaSample s;
  s.env_id = record.env_id;
  s.kind = kind;
  s.template_id = tmpl.id;
  s.question = fill_slots(tmpl.question_pattern, slots);
  s.answer = fill_slots(tmpl.answer_pattern, slots);
  s.record_ids = {record.record_id};
  s.seed = seed;
  s.sample_id = record.env_id + "-" + to_string(kind) + "-" + record.record_id;
  (void)answer_value_slot;
  return s;
}

// Candidate outcome-state perturbations, well-formed but possibly reachable;
// the builder keeps the first one enumeration proves unreachable.
std::vector<State> mutation_candidates(const ExecutionRecord& record, Rng& rng) {
  EnvId env = record.env();
  const State& s = record.state_before;
  std::vector<State> out;
  // Identity is always a candidate: no tool is a no-op.
  out.push_back(s);
  switch (env) {
    case EnvId::Saw: {
      auto base = std::get<SawState>(s);
      for (int i = 0; i < 8; ++i) {
        SawState m = base;
        if (m.letters.empty() || rng.chance(0.3)) {
          m.letters.push_back(static_cast<char>('a' + rng.below(26)));
        } else {
          size_t pos = rng.below(m.letters.size());
          m.letters[pos] = static_cast<char>('a' + rng.below(26));
        }
        out.push_back(m);
      }
      break;
    }
    case EnvId::Bw: {
      auto base = std::get<BwState>(s);
      for (int i = 0; i < 8; ++i) {
        BwState m = base;
        if (m.stacks.empty()) break;
        size_t si = rng.below(m.stacks.size());
        std::string block = m.stacks[si].front();
        m.stacks[si].erase(m.stacks[si].begin());  // pull from the bottom
        if (m.stacks[si].empty()) m.stacks.erase(m.stacks.begin() + si);
        if (!m.hand && rng.chance(0.3)) {
          m.hand = block;
        } else if (!m.stacks.empty()) {
          m.stacks[rng.below(m.stacks.size())].push_back(block);
        } else {
          m.stacks.push_back({block});
        }
        out.push_back(bw::canonicalize(m));
      }
      break;
    }
    case EnvId::Log: {
      auto base = std::get<LogState>(s);
      auto locs = lg::all_locations(base);
      for (int i = 0; i < 8; ++i) {
        LogState m = base;
        int which = static_cast<int>(rng.below(3));
        if (which == 0 && !m.packages.empty()) {
          m.packages.begin()->second = locs[rng.below(locs.size())];
        } else if (which == 1 && !m.trucks.empty()) {
          m.trucks.begin()->second = locs[rng.below(locs.size())];
        } else if (!m.planes.empty()) {
          // Planes stay on airports so the state remains well-formed.
          std::vector<int> airports;
          for (const auto& c : m.cities) airports.push_back(c.airport);
          m.planes.begin()->second = airports[rng.below(airports.size())];
          if (!m.packages.empty() && rng.chance(0.5))
            m.packages.begin()->second = locs[rng.below(locs.size())];
        }
        out.push_back(lg::canonicalize(m));
      }
      break;
    }
  }
  return out;
}

}  // namespace

Action sample_alt_action(const ExecutionRecord& record, uint64_t seed) {
  EnvId env = record.env();
  std::vector<Action> options;
  for (const auto& [a, out] : enumerate_actions(env, record.state_before)) {
    if (out.ok() && !(a == record.action)) options.push_back(a);
  }
  if (options.empty())
    throw BuildError("counterfact: no alternative executable action at state");
  Rng rng(seed);
  return options[rng.below(options.size())];
}

MetaSample build_meta_sample(const ExecutionRecord& record, MetaTaskKind kind,
                             const Template& tmpl, uint64_t seed) {
  if (tmpl.kind != kind) throw BuildError("template kind mismatch");
  EnvId env = record.env();
  const bool ok = record.outcome.ok();
  if (kind != MetaTaskKind::InputBoundary && !ok)
    throw BuildError(std::string("meta-task ") + to_string(kind) +
                     " requires a successful record");

  SlotMap slots;
  slots["state"] = render_state(env, record.state_before);
  slots["action"] = record.action.to_text();
  if (ok) slots["outcome"] = render_state(env, *record.outcome.state_after);

  switch (kind) {
    case MetaTaskKind::Effect:
    case MetaTaskKind::DecisionMaking:
    case MetaTaskKind::Reversion:
      return make_sample(record, kind, tmpl, seed, slots, {});
    case MetaTaskKind::InputBoundary:
      slots["label"] = ok ? "yes" : "no";
      return make_sample(record, kind, tmpl, seed, slots, {});
    case MetaTaskKind::OutputBoundary:
      slots["label"] = "yes";
      return make_sample(record, kind, tmpl, seed, slots, {});
    case MetaTaskKind::Counterfact: {
      Action alt = sample_alt_action(record, seed);
      StepOutcome alt_out = step(env, record.state_before, alt);
      slots["alt_action"] = alt.to_text();
      slots["alt_outcome"] = render_state(env, *alt_out.state_after);
      return make_sample(record, kind, tmpl, seed, slots, {});
    }
  }
  throw BuildError("bad meta-task kind");
}

MetaSample build_output_boundary_negative(const ExecutionRecord& record,
                                          const Template& tmpl, uint64_t seed) {
  if (tmpl.kind != MetaTaskKind::OutputBoundary) throw BuildError("template kind mismatch");
  EnvId env = record.env();
  Rng rng(seed);
  for (int budget = 0; budget < 4; ++budget) {
    for (const State& candidate : mutation_candidates(record, rng)) {
      if (one_step_reachable(env, record.state_before, candidate)) continue;
      SlotMap slots;
      slots["state"] = render_state(env, record.state_before);
      slots["outcome"] = render_state(env, candidate);
      slots["label"] = "no";
      return make_sample(record, MetaTaskKind::OutputBoundary, tmpl, seed, slots, {});
    }
  }
  throw BuildError("output boundary negative: mutation budget exhausted");
}

// ---------------------------------------------------------------------------
// Verification

namespace {

std::optional<std::string> check_turn(EnvId env, const MetaSample& turn,
                                      const RecordStore& records, const Template& tmpl) {
  auto slots = invert_slots(tmpl.question_pattern, turn.question);
  if (!slots) return "question does not match template " + tmpl.id;

  auto get = [&](const char* name) -> const std::string& {
    static const std::string empty;
    auto it = slots->find(name);
    return it == slots->end() ? empty : it->second;
  };
  auto parse_act = [&](const std::string& text, Action& out) {
    auto r = parse_action_text(text, env);
    if (std::holds_alternative<std::string>(r)) return false;
    out = std::get<Action>(r);
    return true;
  };

  try {
    switch (turn.kind) {
      case MetaTaskKind::Effect: {
        State s = parse_state(env, get("state"));
        Action a;
        if (!parse_act(get("action"), a)) return "unparseable action in question";
        StepOutcome out = step(env, s, a);
        if (!out.ok()) return "recorded action is not executable";
        State answer = parse_state(env, turn.answer);
        if (!states_equal(env, *out.state_after, answer)) return "effect answer mismatch";
        return std::nullopt;
      }
      case MetaTaskKind::DecisionMaking: {
        State s = parse_state(env, get("state"));
        State target = parse_state(env, get("outcome"));
        Action answer;
        if (!parse_act(turn.answer, answer)) return "unparseable action answer";
        StepOutcome out = step(env, s, answer);
        if (!out.ok()) return "answered action not executable";
        if (!states_equal(env, *out.state_after, target))
          return "answered action does not produce the outcome";
        return std::nullopt;
      }
      case MetaTaskKind::Reversion: {
        Action a;
        if (!parse_act(get("action"), a)) return "unparseable action in question";
        State target = parse_state(env, get("outcome"));
        State answer = parse_state(env, turn.answer);
        StepOutcome out = step(env, answer, a);
        if (!out.ok()) return "action not executable at answered preimage";
        if (!states_equal(env, *out.state_after, target)) return "preimage does not map to outcome";
        return std::nullopt;
      }
      case MetaTaskKind::InputBoundary: {
        State s = parse_state(env, get("state"));
        Action a;
        if (!parse_act(get("action"), a)) return "unparseable action in question";
        bool executable = step(env, s, a).ok();
        if (turn.answer != (executable ? "yes" : "no")) return "input boundary label mismatch";
        return std::nullopt;
      }
      case MetaTaskKind::OutputBoundary: {
        State s = parse_state(env, get("state"));
        State candidate = parse_state(env, get("outcome"));
        bool reachable = one_step_reachable(env, s, candidate);
        if (turn.answer != (reachable ? "yes" : "no")) return "output boundary label mismatch";
        return std::nullopt;
      }
      case MetaTaskKind::Counterfact: {
        if (turn.record_ids.empty()) return "missing provenance";
        const ExecutionRecord* rec = records.find(turn.record_ids.front());
        if (!rec) return "provenance record not found: " + turn.record_ids.front();
        Action a;
        if (!parse_act(get("action"), a)) return "unparseable action in question";
        if (!(a == rec->action)) return "question action differs from provenance record";
        if (!rec->outcome.ok()) return "provenance record is not a success";
        State shown = parse_state(env, get("outcome"));
        if (!states_equal(env, shown, *rec->outcome.state_after))
          return "question outcome differs from provenance record";
        Action alt;
        if (!parse_act(get("alt_action"), alt)) return "unparseable alternative action";
        StepOutcome out = step(env, rec->state_before, alt);
        if (!out.ok()) return "alternative action not executable at masked state";
        State answer = parse_state(env, turn.answer);
        if (!states_equal(env, *out.state_after, answer)) return "counterfact answer mismatch";
        return std::nullopt;
      }
    }
  } catch (const EnvError& e) {
    return std::string("malformed turn: ") + e.what();
  }
  return "bad meta-task kind";
}

}  // namespace

VerifyReport verify_metaset(const std::vector<Conversation>& conversations,
                            const RecordStore& records,
                            const std::vector<Template>& templates) {
  VerifyReport report;
  for (const auto& conv : conversations) {
    EnvId env = env_from_string(conv.env_id);
    const Template* tmpl = find_template(templates, conv.template_id);
    for (size_t i = 0; i < conv.turns.size(); ++i) {
      ++report.total;
      const MetaSample& turn = conv.turns[i];
      std::optional<std::string> err;
      if (!tmpl) {
        err = "unknown template_id: " + conv.template_id;
      } else if (turn.record_ids.empty() ||
                 std::any_of(turn.record_ids.begin(), turn.record_ids.end(),
                             [&](const std::string& id) { return records.find(id) == nullptr; })) {
        err = "missing provenance record";
      } else {
        err = check_turn(env, turn, records, *tmpl);
      }
      if (err) {
        report.failures.push_back({conv.id, i, to_string(turn.kind), *err});
      } else {
        ++report.passed;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<Conversation> arrange_multiturn(const std::vector<MetaSample>& samples,
                                            uint64_t seed, int turns_min, int turns_max) {
  if (turns_min < 1 || turns_max < turns_min)
    throw BuildError("arrange_multiturn: bad turn bounds");
  if (samples.empty()) return {};
  const std::string& env = samples.front().env_id;
  for (const auto& s : samples) {
    if (s.env_id != env) throw BuildError("arrange_multiturn: mixed env_ids");
  }

  // Bucket by (kind, template) so every conversation is homogeneous.
  std::map<std::pair<std::string, std::string>, std::vector<MetaSample>> buckets;
  for (const auto& s : samples) {
    buckets[{to_string(s.kind), s.template_id}].push_back(s);
  }

  Rng rng(seed);
  std::vector<Conversation> out;
  size_t conv_index = 0;
  for (auto& [key, bucket] : buckets) {
    rng.shuffle(bucket);
    size_t pos = 0;
    while (pos < bucket.size()) {
      size_t len = turns_min + rng.below(static_cast<uint64_t>(turns_max - turns_min + 1));
      len = std::min(len, bucket.size() - pos);
      Conversation c;
      c.id = env + "-conv-" + std::to_string(conv_index++);
      c.env_id = env;
      c.kind = bucket[pos].kind;
      c.template_id = bucket[pos].template_id;
      c.seed = seed;
      c.turns.assign(bucket.begin() + pos, bucket.begin() + pos + len);
      pos += len;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string contextualize_state(const ExecutionRecord& record, const ContextHook& hook) {
  if (hook) return hook(record);
  EnvId env = record.env();
  std::string out = "Calling " + record.action.tool + " with " + render_params(record.action) +
                    " on " + render_state(env, record.state_before);
  if (record.outcome.ok()) {
    out += " returned " + render_state(env, *record.outcome.state_after) + ".";
  } else {
    out += " was rejected: " + record.outcome.reason + ".";
  }
  return out;
}

std::string build_icl_prompt(const std::vector<MetaSample>& metaset, uint64_t seed,
                             int k_per_task, EnvId env) {
  std::string prompt = tool_docs(env);
  if (k_per_task == 0) return prompt;

  std::map<MetaTaskKind, std::vector<const MetaSample*>> by_kind;
  for (const auto& s : metaset) by_kind[s.kind].push_back(&s);

  Rng rng(seed);
  prompt += "\n\nExample question-answer pairs about this toolset:\n";
  int demo = 1;
  for (MetaTaskKind kind : all_meta_tasks()) {
    auto& pool = by_kind[kind];
    if (static_cast<int>(pool.size()) < k_per_task)
      throw BuildError(std::string("build_icl_prompt: fewer than k samples of kind ") +
                       to_string(kind));
    rng.shuffle(pool);
    for (int i = 0; i < k_per_task; ++i) {
      prompt += "\nExample " + std::to_string(demo++) + ":\nQ: " + pool[i]->question +
                "\nA: " + pool[i]->answer + "\n";
    }
  }
  return prompt;
}

// ---------------------------------------------------------------------------
// Corpus pipeline

std::vector<Conversation> build_metaset(const std::vector<ExecutionRecord>& records,
                                        const std::vector<Template>& templates,
                                        const MetasetConfig& cfg) {
  if (cfg.n == 0) return {};
  // Sub-quotas: boundary kinds split into positive and negative halves.
  struct Slot {
    MetaTaskKind kind;
    bool positive;  // for boundary kinds
    size_t quota = 0;
    size_t filled = 0;
  };
  size_t per_kind = cfg.n / kMetaTaskCount;
  size_t extra = cfg.n % kMetaTaskCount;
  std::vector<Slot> slots;
  for (MetaTaskKind kind : all_meta_tasks()) {
    size_t q = per_kind + (extra > 0 ? (--extra, 1) : 0);
    if (kind == MetaTaskKind::InputBoundary || kind == MetaTaskKind::OutputBoundary) {
      size_t pos = static_cast<size_t>(q * cfg.boundary_balance + 0.5);
      slots.push_back({kind, true, pos, 0});
      slots.push_back({kind, false, q - pos, 0});
    } else {
      slots.push_back({kind, true, q, 0});
    }
  }

  Rng rng(cfg.seed);
  std::vector<MetaSample> samples;
  samples.reserve(cfg.n);
  size_t sample_index = 0;

  auto pick_template = [&](MetaTaskKind kind) -> const Template& {
    auto of_kind = templates_for(templates, kind);
    if (of_kind.empty()) throw BuildError("no templates for kind");
    size_t i = rng.below(of_kind.size());
    const Template* t = find_template(templates, of_kind[i].id);
    return *t;
  };

  for (const auto& record : records) {
    if (samples.size() >= cfg.n) break;
    bool ok = record.outcome.ok();
    // Serve the neediest compatible slot.
    std::vector<size_t> order(slots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return slots[a].quota - slots[a].filled > slots[b].quota - slots[b].filled;
    });
    for (size_t idx : order) {
      Slot& slot = slots[idx];
      if (slot.filled >= slot.quota) continue;
      bool compatible =
          (slot.kind == MetaTaskKind::InputBoundary) ? (slot.positive == ok) : ok;
      if (!compatible) continue;
      uint64_t sample_seed = mix_seed(cfg.seed, sample_index);
      try {
        const Template& tmpl = pick_template(slot.kind);
        MetaSample s;
        if (slot.kind == MetaTaskKind::OutputBoundary && !slot.positive) {
          s = build_output_boundary_negative(record, tmpl, sample_seed);
        } else {
          s = build_meta_sample(record, slot.kind, tmpl, sample_seed);
        }
        s.sample_id = s.env_id + "-m" + std::to_string(sample_index);
        samples.push_back(std::move(s));
        ++sample_index;
        ++slot.filled;
      } catch (const BuildError&) {
        continue;  // record cannot serve this kind; try the next slot
      }
      break;
    }
  }

  for (const auto& slot : slots) {
    if (slot.filled < slot.quota)
      throw BuildError(std::string("record stream exhausted before filling ") +
                       to_string(slot.kind) + (slot.positive ? " positives" : " negatives"));
  }
  return arrange_multiturn(samples, mix_seed(cfg.seed, 0x717572ULL), cfg.turns_min,
                           cfg.turns_max);
}

json conversation_to_json(const Conversation& c) {
  json turns = json::array();
  json record_ids = json::array();
  for (const auto& t : c.turns) {
    turns.push_back({{"question", t.question}, {"answer", t.answer}});
    for (const auto& id : t.record_ids) record_ids.push_back(id);
  }
  return json{{"id", c.id},
              {"env_id", c.env_id},
              {"meta_task", to_string(c.kind)},
              {"template_id", c.template_id},
              {"turns", turns},
              {"provenance", {{"record_ids", record_ids}, {"seed", c.seed}}}};
}

Conversation conversation_from_json(const json& j) {
  Conversation c;
  c.id = j.at("id").get<std::string>();
  c.env_id = j.at("env_id").get<std::string>();
  c.kind = meta_task_from_string(j.at("meta_task").get<std::string>());
  c.template_id = j.at("template_id").get<std::string>();
  c.seed = j.at("provenance").at("seed").get<uint64_t>();
  auto ids = j.at("provenance").at("record_ids").get<std::vector<std::string>>();
  const auto& turns = j.at("turns");
  for (size_t i = 0; i < turns.size(); ++i) {
    MetaSample s;
    s.sample_id = c.id + "-t" + std::to_string(i);
    s.env_id = c.env_id;
    s.kind = c.kind;
    s.template_id = c.template_id;
    s.question = turns[i].at("question").get<std::string>();
    s.answer = turns[i].at("answer").get<std::string>();
    if (i < ids.size()) s.record_ids = {ids[i]};
    s.seed = c.seed;
    c.turns.push_back(std::move(s));
  }
  return c;
}

std::vector<MetaSample> flatten(const std::vector<Conversation>& conversations) {
  std::vector<MetaSample> out;
  for (const auto& c : conversations) out.insert(out.end(), c.turns.begin(), c.turns.end());
  return out;
}

}  // namespace toolsim
