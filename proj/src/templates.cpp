#include "toolsim/templates.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace toolsim {

const char* to_string(MetaTaskKind kind) {
  switch (kind) {
    case MetaTaskKind::Effect: return "effect";
    case MetaTaskKind::DecisionMaking: return "decision_making";
    case MetaTaskKind::Reversion: return "reversion";
    case MetaTaskKind::InputBoundary: return "input_boundary";
    case MetaTaskKind::OutputBoundary: return "output_boundary";
    case MetaTaskKind::Counterfact: return "counterfact";
  }
  return "?";
}

MetaTaskKind meta_task_from_string(const std::string& s) {
  for (MetaTaskKind k : all_meta_tasks()) {
    if (s == to_string(k)) return k;
  }
  throw std::runtime_error("unknown meta_task: " + s);
}

const std::vector<MetaTaskKind>& all_meta_tasks() {
  static const std::vector<MetaTaskKind> kinds = {
      MetaTaskKind::Effect,        MetaTaskKind::DecisionMaking,
      MetaTaskKind::Reversion,     MetaTaskKind::InputBoundary,
      MetaTaskKind::OutputBoundary, MetaTaskKind::Counterfact,
  };
  return kinds;
}

const std::vector<Template>& default_templates() {
  using K = MetaTaskKind;
  static const std::vector<Template> templates = {
      // effect: question shows (state, action), answer is the outcome state
      {"effect-1", K::Effect,
       "The current state is {state} and the tool call {action} is executed. What is the resulting state?",
       "{outcome}"},
      {"effect-2", K::Effect,
       "Starting from state {state} , apply {action} . Which state does this produce?",
       "{outcome}"},
      {"effect-3", K::Effect,
       "State before: {state} . Tool call: {action} . Predict the state after the call.",
       "{outcome}"},
      {"effect-4", K::Effect,
       "If the state is {state} and you run {action} , what will the new state be?",
       "{outcome}"},
      {"effect-5", K::Effect,
       "Given state {state} , executing {action} leads to which state?",
       "{outcome}"},
      // decision_making: question shows (state, outcome), answer is an action
      {"decision-1", K::DecisionMaking,
       "The state changed from {state} to {outcome} after a single tool call. Which call was it?",
       "{action}"},
      {"decision-2", K::DecisionMaking,
       "Starting at {state} , one action produced {outcome} . Name a tool call that does this.",
       "{action}"},
      {"decision-3", K::DecisionMaking,
       "State before: {state} . State after: {outcome} . Give a valid tool call for this transition.",
       "{action}"},
      {"decision-4", K::DecisionMaking,
       "Which single tool call turns {state} into {outcome} ?",
       "{action}"},
      {"decision-5", K::DecisionMaking,
       "You observe {state} first and {outcome} right after one call. What was the call?",
       "{action}"},
      // reversion: question shows (action, outcome), answer is the initial state
      {"reversion-1", K::Reversion,
       "Executing {action} resulted in state {outcome} . What was the state before the call?",
       "{state}"},
      {"reversion-2", K::Reversion,
       "After the tool call {action} , the state is {outcome} . Deduce the preceding state.",
       "{state}"},
      {"reversion-3", K::Reversion,
       "The call {action} just produced {outcome} . Which state was it applied to?",
       "{state}"},
      {"reversion-4", K::Reversion,
       "A single use of {action} led to {outcome} . Reconstruct the initial state.",
       "{state}"},
      {"reversion-5", K::Reversion,
       "Undo one step: {action} gave {outcome} . What did the state look like before?",
       "{state}"},
      // input_boundary: question shows (state, action), answer is yes/no
      {"input-1", K::InputBoundary,
       "The current state is {state} . Can the tool call {action} be executed successfully? Answer yes or no.",
       "{label}"},
      {"input-2", K::InputBoundary,
       "In state {state} , is {action} a valid action? Answer yes or no.",
       "{label}"},
      {"input-3", K::InputBoundary,
       "State: {state} . Proposed call: {action} . Would it execute without error? Answer yes or no.",
       "{label}"},
      {"input-4", K::InputBoundary,
       "Given {state} , does {action} satisfy the preconditions of its tool? Answer yes or no.",
       "{label}"},
      {"input-5", K::InputBoundary,
       "Check executability: state {state} , call {action} . Answer yes or no.",
       "{label}"},
      // output_boundary: question shows (state, candidate next state), answer is yes/no
      {"output-1", K::OutputBoundary,
       "The current state is {state} . Can the state {outcome} be reached with a single tool call? Answer yes or no.",
       "{label}"},
      {"output-2", K::OutputBoundary,
       "From {state} , is {outcome} reachable in exactly one call of any tool? Answer yes or no.",
       "{label}"},
      {"output-3", K::OutputBoundary,
       "State now: {state} . Candidate state: {outcome} . Is there an action producing it in one step? Answer yes or no.",
       "{label}"},
      {"output-4", K::OutputBoundary,
       "Starting at {state} , could one tool call yield {outcome} ? Answer yes or no.",
       "{label}"},
      {"output-5", K::OutputBoundary,
       "Decide one-step reachability: from {state} to {outcome} . Answer yes or no.",
       "{label}"},
      // counterfact: question shows (action, outcome, alternative action); the
      // initial state is masked. Answer is the alternative outcome state.
      {"counterfact-1", K::Counterfact,
       "A hidden state was transformed into {outcome} by the call {action} . If {alt_action} had been executed on that hidden state instead, what state would have resulted?",
       "{alt_outcome}"},
      {"counterfact-2", K::Counterfact,
       "The call {action} produced {outcome} from an unknown state. What would {alt_action} have produced from the same state?",
       "{alt_outcome}"},
      {"counterfact-3", K::Counterfact,
       "Fact: {action} led to {outcome} . Counterfactually, which state would {alt_action} have led to from the same starting point?",
       "{alt_outcome}"},
      {"counterfact-4", K::Counterfact,
       "Some state became {outcome} after {action} . Suppose {alt_action} had been called instead; predict the resulting state.",
       "{alt_outcome}"},
      {"counterfact-5", K::Counterfact,
       "Given that {action} yielded {outcome} , what is the outcome of calling {alt_action} on the original state?",
       "{alt_outcome}"},
  };
  return templates;
}

std::vector<Template> load_templates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file: " + path);
  std::vector<Template> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (j.contains("header")) continue;
    out.push_back({j.at("id").get<std::string>(),
                   meta_task_from_string(j.at("meta_task").get<std::string>()),
                   j.at("question_pattern").get<std::string>(),
                   j.at("answer_pattern").get<std::string>()});
  }
  return out;
}

std::vector<Template> templates_for(const std::vector<Template>& all, MetaTaskKind kind) {
  std::vector<Template> out;
  for (const auto& t : all) {
    if (t.kind == kind) out.push_back(t);
  }
  return out;
}

const Template* find_template(const std::vector<Template>& all, const std::string& id) {
  for (const auto& t : all) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

namespace {

// Pattern split: literal, slot, literal, slot, ..., literal (literals may be
// empty only at the very start or end).
struct PatternParts {
  std::vector<std::string> literals;  // size = slots.size() + 1
  std::vector<std::string> slots;
};

PatternParts split_pattern(const std::string& pattern) {
  PatternParts parts;
  std::string lit;
  size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] == '{') {
      size_t close = pattern.find('}', i);
      if (close == std::string::npos) {
        lit += pattern.substr(i);
        break;
      }
      parts.literals.push_back(lit);
      lit.clear();
      parts.slots.push_back(pattern.substr(i + 1, close - i - 1));
      i = close + 1;
      continue;
    }
    lit += pattern[i++];
  }
  parts.literals.push_back(lit);
  return parts;
}

}  // namespace

std::string fill_slots(const std::string& pattern, const SlotMap& slots) {
  auto parts = split_pattern(pattern);
  std::string out = parts.literals[0];
  for (size_t i = 0; i < parts.slots.size(); ++i) {
    auto it = slots.find(parts.slots[i]);
    out += it != slots.end() ? it->second : "{" + parts.slots[i] + "}";
    out += parts.literals[i + 1];
  }
  return out;
}

std::optional<SlotMap> invert_slots(const std::string& pattern, const std::string& text) {
  auto parts = split_pattern(pattern);
  if (text.compare(0, parts.literals[0].size(), parts.literals[0]) != 0) return std::nullopt;
  size_t pos = parts.literals[0].size();
  SlotMap out;
  for (size_t i = 0; i < parts.slots.size(); ++i) {
    const std::string& next_lit = parts.literals[i + 1];
    bool last = i + 1 == parts.slots.size();
    if (next_lit.empty()) {
      if (!last) return std::nullopt;  // adjacent slots are ambiguous
      out[parts.slots[i]] = text.substr(pos);
      pos = text.size();
      continue;
    }
    size_t found;
    if (last) {
      // Anchor the final literal at the end of the text.
      if (text.size() < pos + next_lit.size()) return std::nullopt;
      found = text.size() - next_lit.size();
      if (text.compare(found, next_lit.size(), next_lit) != 0) return std::nullopt;
    } else {
      found = text.find(next_lit, pos);
      if (found == std::string::npos) return std::nullopt;
    }
    out[parts.slots[i]] = text.substr(pos, found - pos);
    pos = found + next_lit.size();
  }
  if (pos != text.size()) return std::nullopt;
  return out;
}

}  // namespace toolsim
