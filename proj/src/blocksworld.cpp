#include "toolsim/blocksworld.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "toolsim/rng.hpp"

namespace toolsim::bw {

const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {"red",    "blue",  "green",
                                                  "yellow", "white", "orange"};
  return colors;
}

namespace {

int palette_index(const std::string& c) {
  const auto& p = palette();
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == c) return static_cast<int>(i);
  }
  return static_cast<int>(p.size());
}

bool color_order(const std::string& a, const std::string& b) {
  int ia = palette_index(a), ib = palette_index(b);
  if (ia != ib) return ia < ib;
  return a < b;
}

// Stack index holding c as topmost, or -1.
int topmost_stack(const BwState& s, const std::string& c) {
  for (size_t i = 0; i < s.stacks.size(); ++i) {
    if (s.stacks[i].back() == c) return static_cast<int>(i);
  }
  return -1;
}

bool on_table(const BwState& s, const std::string& c) {
  for (const auto& st : s.stacks) {
    for (const auto& b : st) {
      if (b == c) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> colors_of(const BwState& state) {
  std::vector<std::string> out;
  for (const auto& st : state.stacks) out.insert(out.end(), st.begin(), st.end());
  if (state.hand) out.push_back(*state.hand);
  std::sort(out.begin(), out.end(), color_order);
  return out;
}

StepOutcome step(const BwState& state, const Action& action) {
  if (action.params.size() != 1 || action.params[0].empty())
    return StepOutcome::invalid("bad_params");
  const std::string& target = action.params[0];

  if (action.tool == "Pick") {
    if (!on_table(state, target) && (!state.hand || *state.hand != target))
      return StepOutcome::invalid("unknown_block");
    if (state.hand) return StepOutcome::invalid("hand_full");
    int si = topmost_stack(state, target);
    if (si < 0) return StepOutcome::invalid("block_covered");
    BwState next = state;
    next.stacks[si].pop_back();
    if (next.stacks[si].empty()) next.stacks.erase(next.stacks.begin() + si);
    next.hand = target;
    return StepOutcome::success(canonicalize(next));
  }

  if (action.tool == "Stack") {
    if (!state.hand) return StepOutcome::invalid("hand_empty");
    BwState next = state;
    if (target == "table") {
      next.stacks.push_back({*next.hand});
    } else {
      // The held block is not a legal support; it is not on the table.
      if (!on_table(state, target)) return StepOutcome::invalid("unknown_block");
      int si = topmost_stack(state, target);
      if (si < 0) return StepOutcome::invalid("target_covered");
      next.stacks[si].push_back(*next.hand);
    }
    next.hand.reset();
    return StepOutcome::success(canonicalize(next));
  }

  return StepOutcome::invalid("unknown_tool");
}

std::vector<std::pair<Action, StepOutcome>> enumerate_actions(const BwState& state) {
  std::vector<std::pair<Action, StepOutcome>> out;
  auto colors = colors_of(state);
  for (const auto& c : colors) {
    Action a{"Pick", {c}};
    out.emplace_back(a, step(state, a));
  }
  for (const auto& c : colors) {
    Action a{"Stack", {c}};
    out.emplace_back(a, step(state, a));
  }
  Action table{"Stack", {"table"}};
  out.emplace_back(table, step(state, table));
  return out;
}

bool is_goal(const BwState& state, const BwGoal& goal) {
  if (state.hand) return false;
  for (const auto& [above, below] : goal.on) {
    bool ok = false;
    for (const auto& st : state.stacks) {
      if (below == "table") {
        if (!st.empty() && st.front() == above) ok = true;
      } else {
        for (size_t i = 0; i + 1 < st.size(); ++i) {
          if (st[i] == below && st[i + 1] == above) ok = true;
        }
      }
    }
    if (!ok) return false;
  }
  return true;
}

BwState canonicalize(const BwState& state) {
  BwState out = state;
  std::sort(out.stacks.begin(), out.stacks.end(),
            [](const auto& a, const auto& b) {
              size_t n = std::min(a.size(), b.size());
              for (size_t i = 0; i < n; ++i) {
                if (a[i] != b[i]) return color_order(a[i], b[i]);
              }
              return a.size() < b.size();
            });
  return out;
}

std::string render(const BwState& state) {
  BwState c = canonicalize(state);
  json j;
  j["hand"] = c.hand ? json(*c.hand) : json(nullptr);
  j["stacks"] = c.stacks;
  return j.dump();
}

BwState parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw EnvError("bad bw state rendering: " + text);
  }
  if (!j.is_object() || !j.contains("stacks") || !j.contains("hand"))
    throw EnvError("bad bw state rendering: " + text);
  BwState s;
  s.stacks = j.at("stacks").get<std::vector<std::vector<std::string>>>();
  if (!j.at("hand").is_null()) s.hand = j.at("hand").get<std::string>();
  return canonicalize(s);
}

std::vector<BwState> all_configurations(const std::vector<std::string>& colors) {
  // Closure over step() from the all-on-table configuration; every block
  // arrangement is reachable, so this enumerates the full space.
  BwState start;
  for (const auto& c : colors) start.stacks.push_back({c});
  start = canonicalize(start);

  std::set<std::string> seen;
  std::vector<BwState> frontier = {start};
  std::vector<BwState> configs;
  seen.insert(render(start));
  while (!frontier.empty()) {
    std::vector<BwState> next;
    for (const auto& s : frontier) {
      if (!s.hand) configs.push_back(s);
      for (const auto& [a, out] : enumerate_actions(s)) {
        if (!out.ok()) continue;
        const auto& ns = std::get<BwState>(*out.state_after);
        if (seen.insert(render(ns)).second) next.push_back(ns);
      }
    }
    frontier = std::move(next);
  }
  std::sort(configs.begin(), configs.end(),
            [](const BwState& a, const BwState& b) { return render(a) < render(b); });
  return configs;
}

std::pair<BwState, BwGoal> sample_instance(uint64_t seed, int n_blocks) {
  if (n_blocks < 3 || n_blocks > 6)
    throw EnvError("bw_sample_instance: n_blocks must be in [3,6]");

  static std::mutex cache_mutex;
  static std::map<int, std::vector<BwState>> cache;
  std::vector<BwState> configs;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n_blocks);
    if (it == cache.end()) {
      std::vector<std::string> colors(palette().begin(), palette().begin() + n_blocks);
      it = cache.emplace(n_blocks, all_configurations(colors)).first;
    }
    configs = it->second;
  }

  Rng rng(seed);
  BwState init = configs[rng.below(configs.size())];

  auto relations_of = [](const BwState& s) {
    std::vector<std::pair<std::string, std::string>> rels;
    for (const auto& st : s.stacks) {
      rels.emplace_back(st.front(), "table");
      for (size_t i = 1; i < st.size(); ++i) rels.emplace_back(st[i], st[i - 1]);
    }
    return rels;
  };

  for (int attempt = 0; attempt < 64; ++attempt) {
    const BwState& target = configs[rng.below(configs.size())];
    auto rels = relations_of(target);
    rng.shuffle(rels);
    size_t k = 1 + rng.below(static_cast<uint64_t>(n_blocks - 1));
    k = std::min(k, rels.size());
    BwGoal goal{{rels.begin(), rels.begin() + k}};
    if (!is_goal(init, goal)) return {init, goal};
  }
  // A full relation set of any configuration other than init is unsatisfied.
  for (const auto& target : configs) {
    if (target == init) continue;
    BwGoal goal{relations_of(target)};
    if (!is_goal(init, goal)) return {init, goal};
  }
  throw EnvError("bw_sample_instance: could not build an unsatisfied goal");
}

}  // namespace toolsim::bw
