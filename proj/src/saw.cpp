#include "toolsim/saw.hpp"

#include "toolsim/rng.hpp"

namespace toolsim::saw {

namespace {

bool single_letter(const Action& a, char& c) {
  if (a.params.size() != 1 || a.params[0].size() != 1) return false;
  c = a.params[0][0];
  return c >= 'a' && c <= 'z';
}

// Index of the leftmost occurrence of c whose right neighbor differs, or -1.
int swap_index(const std::string& s, char c) {
  for (size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] == c && s[i + 1] != c) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

StepOutcome step(const SawState& state, const Action& action) {
  char c = 0;
  if (action.tool == "Add") {
    if (!single_letter(action, c)) return StepOutcome::invalid("bad_params");
    if (c == 'z') return StepOutcome::invalid("no_successor");
    SawState next = state;
    next.letters.push_back(c);
    next.letters.push_back(static_cast<char>(c + 1));
    return StepOutcome::success(next);
  }
  if (action.tool == "Swap") {
    if (!single_letter(action, c)) return StepOutcome::invalid("bad_params");
    int i = swap_index(state.letters, c);
    if (i < 0) return StepOutcome::invalid("letter_not_swappable");
    SawState next = state;
    std::swap(next.letters[i], next.letters[i + 1]);
    return StepOutcome::success(next);
  }
  return StepOutcome::invalid("unknown_tool");
}

std::vector<std::pair<Action, StepOutcome>> enumerate_actions(const SawState& state) {
  std::vector<std::pair<Action, StepOutcome>> out;
  out.reserve(52);
  for (const char* tool : {"Add", "Swap"}) {
    for (char c = 'a'; c <= 'z'; ++c) {
      Action a{tool, {std::string(1, c)}};
      out.emplace_back(a, step(state, a));
    }
  }
  return out;
}

bool is_goal(const SawState& state, const SawGoal& goal) {
  if (goal.target.empty()) return false;
  return state.letters.find(goal.target) != std::string::npos;
}

SawGoal sample_goal(uint64_t seed, int min_len, int max_len) {
  Rng rng(seed);
  int len = min_len + static_cast<int>(rng.below(static_cast<uint64_t>(max_len - min_len + 1)));
  std::string t;
  for (int i = 0; i < len; ++i) t.push_back(static_cast<char>('a' + rng.below(26)));
  return SawGoal{t};
}

std::string render(const SawState& state) {
  std::string out = "[";
  for (size_t i = 0; i < state.letters.size(); ++i) {
    if (i) out += ",";
    out += "'";
    out += state.letters[i];
    out += "'";
  }
  out += "]";
  return out;
}

SawState parse(const std::string& text) {
  SawState s;
  size_t i = 0;
  auto fail = [&] { throw EnvError("bad saw state rendering: " + text); };
  if (text.empty() || text.front() != '[' || text.back() != ']') fail();
  i = 1;
  while (i < text.size() && text[i] != ']') {
    if (text[i] == ',') { ++i; continue; }
    if (text[i] != '\'' || i + 2 >= text.size() || text[i + 2] != '\'') fail();
    char c = text[i + 1];
    if (c < 'a' || c > 'z') fail();
    s.letters.push_back(c);
    i += 3;
  }
  return s;
}

}  // namespace toolsim::saw
