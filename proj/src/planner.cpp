#include "toolsim/planner.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>
#include <set>

#include "toolsim/blocksworld.hpp"
#include "toolsim/logistics.hpp"
#include "toolsim/rng.hpp"
#include "toolsim/saw.hpp"
#include "toolsim/templates.hpp"

namespace toolsim {

bool plan_is_valid(EnvId env, const State& init, const Goal& goal,
                   const std::vector<Action>& actions) {
  State s = init;
  for (const auto& a : actions) {
    StepOutcome out = step(env, s, a);
    if (!out.ok()) return false;
    s = *out.state_after;
  }
  return is_goal(env, s, goal);
}

std::optional<Plan> bfs_plan(EnvId env, const State& init, const Goal& goal,
                             size_t max_nodes, int max_depth) {
  if (is_goal(env, init, goal)) return Plan{{}, true};

  struct Node {
    State state;
    int parent = -1;
    Action action;
  };
  std::vector<Node> nodes;
  nodes.push_back({canonicalize(env, init), -1, {}});
  std::set<uint64_t> visited = {hash_state(env, init)};
  std::deque<std::pair<size_t, int>> frontier = {{0, 0}};  // node index, depth

  while (!frontier.empty()) {
    auto [idx, depth] = frontier.front();
    frontier.pop_front();
    if (depth >= max_depth) continue;
    State state = nodes[idx].state;
    for (const auto& [a, out] : enumerate_actions(env, state)) {
      if (!out.ok()) continue;
      uint64_t h = hash_state(env, *out.state_after);
      if (!visited.insert(h).second) continue;
      nodes.push_back({canonicalize(env, *out.state_after), static_cast<int>(idx), a});
      if (is_goal(env, *out.state_after, goal)) {
        std::vector<Action> actions;
        for (int cur = static_cast<int>(nodes.size()) - 1; cur > 0; cur = nodes[cur].parent)
          actions.push_back(nodes[cur].action);
        std::reverse(actions.begin(), actions.end());
        return Plan{actions, true};
      }
      if (nodes.size() >= max_nodes) return std::nullopt;
      frontier.emplace_back(nodes.size() - 1, depth + 1);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SAW planner

namespace {

constexpr int kInfCost = std::numeric_limits<int>::max() / 4;

// Minimum number of adjacent transpositions needed to make `target` appear
// contiguously in `s`, assuming unconstrained swaps: pick an embedding of the
// target as a subsequence; every skipped letter inside the window must cross
// either all matched letters to its left or all to its right.
int saw_gap_cost(const std::string& s, const std::string& target) {
  int k = static_cast<int>(target.size());
  std::vector<int> dp(k + 1, kInfCost);
  dp[0] = 0;
  for (char c : s) {
    std::vector<int> nd(k + 1, kInfCost);
    for (int i = 0; i <= k; ++i) {
      if (dp[i] == kInfCost) continue;
      int skip = (i > 0 && i < k) ? std::min(i, k - i) : 0;
      nd[i] = std::min(nd[i], dp[i] + skip);
      if (i < k && c == target[i]) nd[i + 1] = std::min(nd[i + 1], dp[i]);
    }
    dp = std::move(nd);
  }
  return dp[k];
}

// Executable swaps from a state; the index-level resolution (leftmost
// differing-neighbor occurrence) is delegated to saw::step itself.
std::vector<Action> swap_children(const SawState& s) {
  std::vector<Action> out;
  std::set<char> tried;
  for (char c : s.letters) {
    if (!tried.insert(c).second) continue;
    Action a{"Swap", {std::string(1, c)}};
    if (saw::step(s, a).ok()) out.push_back(a);
  }
  return out;
}

// Weighted A* over swap sequences from the post-Add string. saw_gap_cost
// relaxes the leftmost-occurrence rule to free adjacent transpositions, so at
// weight 1 it never overestimates and the swap phase found is shortest;
// higher weights trade optimality for fewer expansions on plateau-heavy
// duplicate-letter targets.
std::optional<std::vector<Action>> astar_swaps(const SawState& start, const std::string& target,
                                               size_t max_nodes, int weight) {
  struct Node {
    SawState state;
    int parent;
    Action action;
    int g;
  };
  std::vector<Node> nodes = {{start, -1, {}, 0}};
  std::unordered_map<std::string, int> best_g = {{start.letters, 0}};
  // (f, insertion order) keeps expansion deterministic.
  std::set<std::pair<std::pair<int, size_t>, size_t>> open;
  int h0 = saw_gap_cost(start.letters, target);
  if (h0 >= kInfCost) return std::nullopt;
  if (h0 == 0) return std::vector<Action>{};
  open.insert({{weight * h0, 0}, 0});

  while (!open.empty() && nodes.size() < max_nodes) {
    size_t idx = open.begin()->second;
    open.erase(open.begin());
    SawState s = nodes[idx].state;
    int g = nodes[idx].g;
    if (best_g[s.letters] < g) continue;  // stale entry
    for (const Action& a : swap_children(s)) {
      SawState ns = std::get<SawState>(*saw::step(s, a).state_after);
      int ng = g + 1;
      auto it = best_g.find(ns.letters);
      if (it != best_g.end() && it->second <= ng) continue;
      best_g[ns.letters] = ng;
      nodes.push_back({ns, static_cast<int>(idx), a, ng});
      int h = saw_gap_cost(ns.letters, target);
      if (h == 0) {
        std::vector<Action> path;
        for (int cur = static_cast<int>(nodes.size()) - 1; cur > 0; cur = nodes[cur].parent)
          path.push_back(nodes[cur].action);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (h >= kInfCost) continue;
      open.insert({{ng + weight * h, nodes.size() - 1}, nodes.size() - 1});
    }
  }
  return std::nullopt;
}

// One letter of the post-Add string, tagged with whether it is a target
// letter (in target order) or junk to be bubbled out of the window.
struct SawCell {
  char ch;
  bool target;
};

// Index of the leftmost occurrence of c whose right neighbor differs; this is
// the position saw::step resolves Swap(c) to.
int resolve_swap(const std::vector<SawCell>& cells, char c) {
  for (size_t i = 0; i + 1 < cells.size(); ++i) {
    if (cells[i].ch == c && cells[i + 1].ch != c) return static_cast<int>(i);
  }
  return -1;
}

// Each junk letter strictly inside the target window must either cross every
// target letter to its left (exiting leftward, by the block passing over it)
// or every one to its right. The sum of the cheaper side per junk is an exact
// swap count when leftmost resolution never interferes, and a lower bound
// otherwise.
int window_cost(const std::vector<SawCell>& cells, int n_targets) {
  int cost = 0, gap = 0;
  for (const auto& c : cells) {
    if (c.target)
      ++gap;
    else if (gap > 0 && gap < n_targets)
      cost += std::min(gap, n_targets - gap);
  }
  return cost;
}

std::string cells_key(const std::vector<SawCell>& cells) {
  std::string key;
  for (const auto& c : cells) key.push_back(c.target ? static_cast<char>(c.ch - 32) : c.ch);
  return key;
}

// Bubble the junk at position q fully out of the target window in one
// direction, appending the letter swaps to `swaps`. A neighbor with the same
// letter is passed by exchanging roles instead of swapping: the letters are
// identical, so no action is needed and leftmost resolution cannot block it.
bool macro_exile(std::vector<SawCell>& cells, size_t q, bool go_right,
                 std::vector<Action>& swaps) {
  auto target_beyond = [&](size_t p) {
    if (go_right) {
      for (size_t i = p + 1; i < cells.size(); ++i)
        if (cells[i].target) return true;
    } else {
      for (size_t i = 0; i < p; ++i)
        if (cells[i].target) return true;
    }
    return false;
  };
  while (target_beyond(q)) {
    size_t nb = go_right ? q + 1 : q - 1;
    if (cells[nb].ch == cells[q].ch) {
      std::swap(cells[q], cells[nb]);  // role exchange, no swap emitted
      q = nb;
      continue;
    }
    size_t lo = std::min(q, nb);
    char c = cells[lo].ch;
    if (resolve_swap(cells, c) != static_cast<int>(lo)) return false;
    std::swap(cells[lo], cells[lo + 1]);
    swaps.push_back({"Swap", {std::string(1, c)}});
    q = nb;
  }
  return true;
}

// A* over macro moves, each exiling one inside-window junk letter leftward or
// rightward. window_cost orders the frontier; the budget prunes on actual
// swaps spent so plans never exceed max_cost.
std::optional<std::vector<Action>> bubble_astar(const std::vector<SawCell>& start,
                                                const std::string& target, int max_cost,
                                                size_t max_nodes) {
  int n_targets = 0;
  for (const auto& c : start) n_targets += c.target;

  struct Node {
    std::vector<SawCell> cells;
    int parent;
    std::vector<Action> swaps;
    int g;
  };
  auto solved = [&](const std::vector<SawCell>& cells) {
    std::string s;
    for (const auto& c : cells) s.push_back(c.ch);
    return s.find(target) != std::string::npos;
  };
  auto extract = [&](const std::vector<Node>& nodes, int idx) {
    std::vector<Action> path;
    for (int cur = idx; cur > 0; cur = nodes[cur].parent)
      path.insert(path.begin(), nodes[cur].swaps.begin(), nodes[cur].swaps.end());
    return path;
  };

  if (solved(start)) return std::vector<Action>{};
  std::vector<Node> nodes = {{start, -1, {}, 0}};
  std::unordered_map<std::string, int> best_g = {{cells_key(start), 0}};
  // (f, insertion order) keeps expansion deterministic.
  std::set<std::pair<std::pair<int, size_t>, size_t>> open = {
      {{window_cost(start, n_targets), 0}, 0}};

  while (!open.empty() && nodes.size() < max_nodes) {
    size_t idx = open.begin()->second;
    open.erase(open.begin());
    // Copy out: push_back below may reallocate the node pool.
    std::vector<SawCell> cells = nodes[idx].cells;
    int g = nodes[idx].g;
    if (best_g[cells_key(cells)] < g) continue;

    for (size_t q = 0; q < cells.size(); ++q) {
      if (cells[q].target) continue;
      // Junk strictly inside the window must move; junk outside may still
      // need to relocate across the window when its letter shadows a swap
      // the exit of another cell depends on (leftmost resolution).
      bool left = false, right = false;
      for (size_t i = 0; i < q; ++i) left |= cells[i].target;
      for (size_t i = q + 1; i < cells.size(); ++i) right |= cells[i].target;
      for (bool go_right : {false, true}) {
        if (go_right ? !right : !left) continue;
        std::vector<SawCell> next = cells;
        std::vector<Action> swaps;
        if (!macro_exile(next, q, go_right, swaps)) continue;
        int ng = g + static_cast<int>(swaps.size());
        if (ng > max_cost) continue;
        std::string key = cells_key(next);
        auto it = best_g.find(key);
        if (it != best_g.end() && it->second <= ng) continue;
        best_g[key] = ng;
        nodes.push_back({next, static_cast<int>(idx), std::move(swaps), ng});
        if (solved(next)) return extract(nodes, static_cast<int>(nodes.size()) - 1);
        open.insert({{ng + window_cost(next, n_targets), nodes.size() - 1}, nodes.size() - 1});
      }
    }
  }
  return std::nullopt;
}

// Necessary conditions for a junk placement to be bubbled out at all. A junk
// letter can exit rightward only if no target copy of the same letter sits to
// its left (leftmost resolution would always pick that copy first), and can
// exit leftward only if every target it crosses is either its own letter
// (passed by role exchange) or not a repeat of an earlier target letter
// (resolution would pick the earlier copy, which cannot be chained up to the
// crossing point without breaking the window order). Assignments violating
// this for any junk cell are skipped without running the search.
bool saw_assignment_feasible(const std::string& target, const std::vector<bool>& use_pred) {
  int n = static_cast<int>(target.size());
  // Resolving letter c at window position pos is preempted by an earlier
  // target occurrence unless the earlier copies chain contiguously (a run of
  // equal letters) all the way up to pos.
  auto chain_clear = [&](char c, int pos) {
    int f = -1;
    for (int m = 0; m < pos; ++m) {
      if (target[m] == c) {
        f = m;
        break;
      }
    }
    if (f < 0) return true;
    for (int m = f; m < pos; ++m)
      if (target[m] != c) return false;
    return true;
  };

  auto junk_ok = [&](char c, int gap) {
    if (gap <= 0 || gap >= n) return true;  // already outside the window
    bool right_ok = chain_clear(c, gap);
    bool left_ok = true;
    for (int k = 0; k < gap; ++k)
      if (target[k] != c && !chain_clear(target[k], k)) left_ok = false;
    return right_ok || left_ok;
  };

  size_t i = 0, choice = 0;
  while (i < target.size()) {
    char t = target[i];
    if (i + 1 < target.size() && t != 'z' && target[i + 1] == t + 1) {
      i += 2;  // paired run, no junk
    } else if (t == 'z') {
      if (!junk_ok('y', static_cast<int>(i))) return false;
      ++i;
    } else if (t == 'a') {
      if (!junk_ok('b', static_cast<int>(i) + 1)) return false;
      ++i;
    } else {
      bool pred = choice < use_pred.size() && use_pred[choice];
      char c = pred ? static_cast<char>(t - 1) : static_cast<char>(t + 1);
      int gap = pred ? static_cast<int>(i) : static_cast<int>(i) + 1;
      if (!junk_ok(c, gap)) return false;
      ++choice;
      ++i;
    }
  }
  return true;
}

// Add phase for one junk-placement assignment. Consecutive-successor target
// pairs share one Add; a target 'z' is harvested as the successor of Add('y').
// `use_pred` holds one flag per standalone letter that has both options: true
// emits Add(pred) so the junk lands before the target letter, false Add(t)
// with the junk after it.
std::vector<std::pair<Action, std::vector<SawCell>>> saw_add_phase(
    const std::string& target, const std::vector<bool>& use_pred) {
  std::vector<std::pair<Action, std::vector<SawCell>>> adds;
  auto add = [&](char c, bool first_is_target, bool second_is_target) {
    adds.push_back({Action{"Add", {std::string(1, c)}},
                    {{c, first_is_target}, {static_cast<char>(c + 1), second_is_target}}});
  };
  size_t i = 0, choice = 0;
  while (i < target.size()) {
    char t = target[i];
    if (i + 1 < target.size() && t != 'z' && target[i + 1] == t + 1) {
      add(t, true, true);  // one Add yields both letters already adjacent
      i += 2;
    } else if (t == 'z') {
      add('y', false, true);
      ++i;
    } else if (t == 'a') {
      add(t, true, false);
      ++i;
    } else {
      if (choice < use_pred.size() && use_pred[choice])
        add(static_cast<char>(t - 1), false, true);
      else
        add(t, true, false);
      ++choice;
      ++i;
    }
  }
  return adds;
}

// Number of standalone letters in `target` with a free junk-side choice.
size_t saw_choice_points(const std::string& target) {
  size_t n = 0, i = 0;
  while (i < target.size()) {
    char t = target[i];
    if (i + 1 < target.size() && t != 'z' && target[i + 1] == t + 1) {
      i += 2;
    } else {
      if (t != 'z' && t != 'a') ++n;
      ++i;
    }
  }
  return n;
}

std::optional<std::vector<Action>> plan_saw_attempt(const std::string& target) {
  auto try_candidate =
      [&](const std::vector<bool>& use_pred) -> std::optional<std::vector<Action>> {
    std::vector<Action> actions;
    SawState state;
    std::vector<SawCell> cells;
    auto done = [&] { return saw::is_goal(state, SawGoal{target}); };
    auto apply = [&](const Action& a) {
      StepOutcome out = saw::step(state, a);
      if (!out.ok()) return false;
      state = std::get<SawState>(*out.state_after);
      actions.push_back(a);
      return true;
    };

    for (const auto& [a, new_cells] : saw_add_phase(target, use_pred)) {
      if (done()) return actions;
      if (!apply(a)) return std::nullopt;
      cells.insert(cells.end(), new_cells.begin(), new_cells.end());
    }
    if (done()) return actions;

    int max_swaps = 3 * static_cast<int>(target.size()) + 40 - static_cast<int>(actions.size());
    auto swaps = bubble_astar(cells, target, max_swaps, 8000);
    if (!swaps) return std::nullopt;
    for (const auto& a : *swaps) {
      if (!apply(a)) return std::nullopt;
      if (done()) break;
    }
    if (!done()) return std::nullopt;
    return actions;
  };

  // Whether junk should sit before or after each standalone letter depends on
  // duplicate structure in ways that interact with leftmost resolution, so
  // enumerate assignments outward from the all-successor default, nearest
  // masks first. Assignments that fail the exit-feasibility conditions are
  // dropped before the search runs.
  size_t k = saw_choice_points(target);
  std::vector<uint32_t> masks;
  std::vector<bool> use_pred(k);
  for (uint32_t m = 0; m < (1u << std::min<size_t>(k, 10)); ++m) {
    for (size_t i = 0; i < k; ++i) use_pred[i] = (m >> i) & 1;
    if (saw_assignment_feasible(target, use_pred)) masks.push_back(m);
  }
  std::stable_sort(masks.begin(), masks.end(), [](uint32_t a, uint32_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  if (masks.size() > 320) masks.resize(320);
  for (uint32_t mask : masks) {
    for (size_t i = 0; i < k; ++i) use_pred[i] = (mask >> i) & 1;
    if (auto p = try_candidate(use_pred)) return p;
  }

  // With no feasible junk assignment at all, a long target is unreachable by
  // any pair construction and the search fallbacks cannot cover the depth.
  if (masks.empty() && target.size() > 6) return std::nullopt;

  // Search fallback for targets the constructive bubble cannot address.
  SawState state;
  std::vector<Action> actions;
  for (char t : target) {
    if (saw::is_goal(state, SawGoal{target})) return actions;
    char add = (t == 'z') ? 'y' : t;
    Action a{"Add", {std::string(1, add)}};
    StepOutcome out = saw::step(state, a);
    if (!out.ok()) return std::nullopt;
    state = std::get<SawState>(*out.state_after);
    actions.push_back(a);
  }
  std::optional<std::vector<Action>> swaps;
  for (auto [weight, cap] : {std::pair<int, size_t>{2, 40000}, {4, 120000}}) {
    swaps = astar_swaps(state, target, cap, weight);
    if (swaps) break;
  }
  if (!swaps) return std::nullopt;
  for (const auto& a : *swaps) {
    StepOutcome out = saw::step(state, a);
    if (!out.ok()) return std::nullopt;
    state = std::get<SawState>(*out.state_after);
    actions.push_back(a);
    if (saw::is_goal(state, SawGoal{target})) break;
  }
  if (!saw::is_goal(state, SawGoal{target})) return std::nullopt;
  return actions;
}

}  // namespace

namespace {

std::optional<Plan> plan_saw_uncached(const SawGoal& goal) {
  if (goal.target.size() < 2 || goal.target.size() > 10) return std::nullopt;
  auto actions = plan_saw_attempt(goal.target);
  if (actions && plan_is_valid(EnvId::Saw, SawState{}, goal, *actions))
    return Plan{*actions, false};
  // Exhaustive search only reaches short targets within its depth cap.
  if (goal.target.size() <= 6) {
    if (auto p = bfs_plan(EnvId::Saw, SawState{}, goal, 300000, 12)) return p;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Plan> plan_saw(const SawGoal& goal) {
  static std::mutex mu;
  static std::unordered_map<std::string, std::optional<Plan>> memo;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(goal.target);
    if (it != memo.end()) return it->second;
  }
  auto result = plan_saw_uncached(goal);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (memo.size() < 65536) memo.emplace(goal.target, result);
  }
  return result;
}

// ---------------------------------------------------------------------------
// BlocksWorld planner

namespace {

std::optional<std::vector<Action>> bw_heuristic(const BwState& init, const BwGoal& goal) {
  std::vector<Action> actions;
  BwState s = bw::canonicalize(init);
  auto apply = [&](const Action& a) {
    StepOutcome out = bw::step(s, a);
    if (!out.ok()) return false;
    s = std::get<BwState>(*out.state_after);
    actions.push_back(a);
    return true;
  };

  if (s.hand && !apply({"Stack", {"table"}})) return std::nullopt;

  // Unstack everything onto the table.
  for (;;) {
    std::string top;
    for (const auto& st : s.stacks) {
      if (st.size() > 1) {
        top = st.back();
        break;
      }
    }
    if (top.empty()) break;
    if (!apply({"Pick", {top}}) || !apply({"Stack", {"table"}})) return std::nullopt;
  }

  // Build the goal relations bottom-up; table relations already hold.
  std::vector<std::pair<std::string, std::string>> pending;
  for (const auto& rel : goal.on) {
    if (rel.second != "table") pending.push_back(rel);
  }
  while (!pending.empty()) {
    size_t chosen = pending.size();
    for (size_t i = 0; i < pending.size(); ++i) {
      bool support_pending = false;
      for (const auto& other : pending) {
        if (other.first == pending[i].second) support_pending = true;
      }
      if (!support_pending) {
        chosen = i;
        break;
      }
    }
    if (chosen == pending.size()) return std::nullopt;  // cyclic goal
    auto [above, below] = pending[chosen];
    pending.erase(pending.begin() + chosen);
    if (!apply({"Pick", {above}}) || !apply({"Stack", {below}})) return std::nullopt;
  }
  return actions;
}

}  // namespace

std::optional<Plan> plan_bw(const BwState& init, const BwGoal& goal) {
  if (bw::is_goal(init, goal)) return Plan{{}, true};
  size_t blocks = bw::colors_of(init).size();
  if (blocks <= 4) {
    if (auto p = bfs_plan(EnvId::Bw, init, goal)) return p;
    return std::nullopt;
  }
  if (auto actions = bw_heuristic(init, goal)) {
    if (plan_is_valid(EnvId::Bw, init, goal, *actions)) return Plan{*actions, false};
  }
  if (auto p = bfs_plan(EnvId::Bw, init, goal)) return p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Logistics planner

namespace {

std::optional<std::vector<Action>> log_route(const LogState& init, const LogGoal& goal) {
  std::vector<Action> actions;
  LogState s = lg::canonicalize(init);
  auto apply = [&](const std::string& tool, int from, int to) {
    StepOutcome out = lg::step(s, {tool, {std::to_string(from), std::to_string(to)}});
    if (!out.ok()) return false;
    s = std::get<LogState>(*out.state_after);
    actions.push_back({tool, {std::to_string(from), std::to_string(to)}});
    return true;
  };
  auto truck_in_city = [&](int city_id) -> std::optional<int> {
    for (const auto& [id, at] : s.trucks) {
      const LogCity* c = s.city_of(at);
      if (c && c->id == city_id) return at;
    }
    return std::nullopt;
  };
  // Drives a city truck to `from` if needed, then carries the package to `to`.
  auto truck_leg = [&](int from, int to) {
    if (from == to) return true;
    const LogCity* c = s.city_of(from);
    if (!c) return false;
    auto truck_at = truck_in_city(c->id);
    if (!truck_at) return false;
    if (*truck_at != from && !apply("Truck", *truck_at, from)) return false;
    return apply("Truck", from, to);
  };

  auto pkg = s.packages.find(goal.package);
  if (pkg == s.packages.end()) return std::nullopt;
  int at = pkg->second;
  if (at == goal.target_location) return actions;

  const LogCity* origin = s.city_of(at);
  const LogCity* dest = s.city_of(goal.target_location);
  if (!origin || !dest) return std::nullopt;

  if (origin->id == dest->id) {
    if (!truck_leg(at, goal.target_location)) return std::nullopt;
    return actions;
  }

  int origin_airport = origin->airport;
  int dest_airport = dest->airport;
  if (at != origin_airport && !truck_leg(at, origin_airport)) return std::nullopt;
  // Bring the plane to the origin airport, then fly the package across.
  if (s.planes.empty()) return std::nullopt;
  int plane_at = s.planes.begin()->second;
  if (plane_at != origin_airport && !apply("Plane", plane_at, origin_airport))
    return std::nullopt;
  if (!apply("Plane", origin_airport, dest_airport)) return std::nullopt;
  if (dest_airport != goal.target_location && !truck_leg(dest_airport, goal.target_location))
    return std::nullopt;
  return actions;
}

}  // namespace

std::optional<Plan> plan_log(const LogState& init, const LogGoal& goal) {
  if (lg::is_goal(init, goal)) return Plan{{}, true};
  if (auto actions = log_route(init, goal)) {
    if (plan_is_valid(EnvId::Log, init, goal, *actions)) return Plan{*actions, false};
  }
  if (auto p = bfs_plan(EnvId::Log, init, goal, 200000, 30)) return p;
  return std::nullopt;
}

std::optional<Plan> plan(EnvId env, const State& init, const Goal& goal) {
  switch (env) {
    case EnvId::Saw: {
      // SAW always starts from the empty string.
      auto p = plan_saw(std::get<SawGoal>(goal));
      if (p && !std::get<SawState>(init).letters.empty()) {
        // Planning from a non-empty state falls back to search.
        if (!plan_is_valid(env, init, goal, p->actions))
          return bfs_plan(env, init, goal, 300000, 12);
      }
      return p;
    }
    case EnvId::Bw: return plan_bw(std::get<BwState>(init), std::get<BwGoal>(goal));
    case EnvId::Log: return plan_log(std::get<LogState>(init), std::get<LogGoal>(goal));
  }
  throw EnvError("bad env");
}

// ---------------------------------------------------------------------------
// Solution corpora

const std::vector<std::string>& thought_templates(EnvId env) {
  static const std::vector<std::string> saw_t = {
      "The goal is to {goal}. The string is currently {state}, so I will use {action} to move closer to spelling the target.",
      "I need to {goal}. Looking at {state}, the call {action} is the right next step.",
      "Current string: {state}. To {goal}, the letters still need work; {action} advances that.",
      "To make the target appear, the next edit on {state} should be {action}.",
      "The target is not yet a substring of {state}. Executing {action} brings it closer.",
  };
  static const std::vector<std::string> bw_t = {
      "The goal is to {goal}. With the blocks at {state}, the move {action} makes progress.",
      "I need to {goal}. Given {state}, the hand should perform {action} next.",
      "Looking at {state}, the stacks are not in the target arrangement yet; {action} is the next rearrangement step.",
      "To {goal}, the block configuration {state} calls for {action} now.",
      "The current arrangement is {state}. Executing {action} works toward the requested stacking.",
  };
  static const std::vector<std::string> log_t = {
      "The goal is to {goal}. Given the positions in {state}, the move {action} advances the delivery.",
      "I need to {goal}. From {state}, the vehicles should run {action} next.",
      "Considering {state}, the package is not at its destination; {action} is the next transport leg.",
      "To {goal}, the fleet in {state} should execute {action}.",
      "Looking at {state}, routing continues with {action} toward the target location.",
  };
  switch (env) {
    case EnvId::Saw: return saw_t;
    case EnvId::Bw: return bw_t;
    case EnvId::Log: return log_t;
  }
  throw EnvError("bad env");
}

std::string render_thought(EnvId env, const State& state, const Action& action,
                           const Goal& goal, const std::vector<std::string>& templates,
                           uint64_t seed) {
  if (templates.empty()) throw PlannerError("render_thought: empty template set");
  Rng rng(seed);
  const std::string& pattern = templates[rng.below(templates.size())];
  return fill_slots(pattern, {{"goal", render_goal(env, goal)},
                              {"state", render_state(env, state)},
                              {"action", action.to_text()}});
}

std::vector<SolutionTrace> emit_solution_corpus(EnvId env, uint64_t seed, size_t n,
                                                const InstanceOptions& opt) {
  if (n == 0) return {};
  auto make_trace = [&](size_t i) {
    uint64_t inst_seed = mix_seed(seed, i);
    Instance inst = sample_instance(env, inst_seed, opt);
    auto p = plan(env, inst.init, inst.goal);
    if (!p)
      throw PlannerError("planner failed for " + std::string(to_string(env)) +
                         " instance seed " + std::to_string(inst_seed));
    SolutionTrace t;
    t.id = std::string(to_string(env)) + "-sol-" + std::to_string(i);
    t.env_id = to_string(env);
    t.goal = inst.goal;
    t.init_state = inst.init;
    State s = inst.init;
    for (size_t k = 0; k < p->actions.size(); ++k) {
      const Action& a = p->actions[k];
      SolutionStep step_out;
      step_out.thought = render_thought(env, s, a, inst.goal, thought_templates(env),
                                        mix_seed(inst_seed, k));
      step_out.action = a;
      StepOutcome out = step(env, s, a);
      if (!out.ok()) throw PlannerError("emitted plan failed replay: " + t.id);
      s = *out.state_after;
      step_out.state_after = s;
      t.steps.push_back(std::move(step_out));
    }
    if (!is_goal(env, s, inst.goal)) throw PlannerError("plan does not reach goal: " + t.id);
    t.solved = true;
    t.optimal = p->optimal;
    return t;
  };

  // Shard fan-out; results merge in index order so output is deterministic.
  const size_t shard = 256;
  std::vector<SolutionTrace> out(n);
  std::vector<std::future<void>> jobs;
  for (size_t lo = 0; lo < n; lo += shard) {
    size_t hi = std::min(n, lo + shard);
    jobs.push_back(std::async(std::launch::async, [&, lo, hi] {
      for (size_t i = lo; i < hi; ++i) out[i] = make_trace(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

json trace_to_json(const SolutionTrace& t) {
  EnvId env = env_from_string(t.env_id);
  json steps = json::array();
  for (const auto& s : t.steps) {
    json action;
    action["tool"] = s.action.tool;
    json params = json::array();
    for (const auto& p : s.action.params) {
      bool num = !p.empty() && p.find_first_not_of("0123456789") == std::string::npos;
      if (num) {
        params.push_back(std::stoll(p));
      } else {
        params.push_back(p);
      }
    }
    action["params"] = params;
    steps.push_back({{"thought", s.thought},
                     {"action", action},
                     {"state_after", state_to_json(env, s.state_after)}});
  }
  return json{{"id", t.id},
              {"env_id", t.env_id},
              {"goal", goal_to_json(t.goal)},
              {"init_state", state_to_json(env, t.init_state)},
              {"steps", steps},
              {"solved", t.solved},
              {"optimal", t.optimal}};
}

SolutionTrace trace_from_json(const json& j) {
  SolutionTrace t;
  t.id = j.at("id").get<std::string>();
  t.env_id = j.at("env_id").get<std::string>();
  EnvId env = env_from_string(t.env_id);
  t.goal = goal_from_json(env, j.at("goal"));
  t.init_state = state_from_json(env, j.at("init_state"));
  t.solved = j.value("solved", true);
  t.optimal = j.value("optimal", false);
  for (const auto& sj : j.at("steps")) {
    SolutionStep s;
    s.thought = sj.at("thought").get<std::string>();
    s.action.tool = sj.at("action").at("tool").get<std::string>();
    for (const auto& p : sj.at("action").at("params")) {
      if (p.is_number_integer()) {
        s.action.params.push_back(std::to_string(p.get<long long>()));
      } else {
        s.action.params.push_back(p.get<std::string>());
      }
    }
    s.state_after = state_from_json(env, sj.at("state_after"));
    t.steps.push_back(std::move(s));
  }
  return t;
}

json trace_to_chat_json(const SolutionTrace& t) {
  EnvId env = env_from_string(t.env_id);
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", tool_docs(env)}});
  messages.push_back({{"role", "user"},
                      {"content", "Goal: " + render_goal(env, t.goal) +
                                      ". Initial state: " + render_state(env, t.init_state)}});
  for (const auto& s : t.steps) {
    messages.push_back({{"role", "assistant"},
                        {"content", s.thought + "\nAction: " + s.action.to_text()}});
    messages.push_back({{"role", "tool"},
                        {"content", "State: " + render_state(env, s.state_after)}});
  }
  return json{{"id", t.id}, {"env_id", t.env_id}, {"messages", messages}};
}

}  // namespace toolsim
