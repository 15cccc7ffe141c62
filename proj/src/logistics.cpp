#include "toolsim/logistics.hpp"

#include <algorithm>

#include "toolsim/rng.hpp"

namespace toolsim::lg {

namespace {

bool parse_loc(const std::string& p, int& out) {
  if (p.empty() || p.size() > 9) return false;
  for (char c : p) {
    if (c < '0' || c > '9') return false;
  }
  out = std::stoi(p);
  return true;
}

bool is_airport(const LogState& s, int loc) {
  const LogCity* c = s.city_of(loc);
  return c && c->airport == loc;
}

// Lowest-id vehicle of the map located at `loc`, or empty.
std::string vehicle_at(const std::map<std::string, int>& vehicles, int loc) {
  for (const auto& [id, at] : vehicles) {
    if (at == loc) return id;
  }
  return {};
}

StepOutcome move(const LogState& state, std::map<std::string, int> LogState::* fleet,
                 const std::string& vehicle, int from, int to) {
  LogState next = state;
  (next.*fleet)[vehicle] = to;
  for (auto& [pkg, at] : next.packages) {
    if (at == from) at = to;
  }
  return StepOutcome::success(canonicalize(next));
}

}  // namespace

StepOutcome step(const LogState& state, const Action& action) {
  if (action.tool != "Truck" && action.tool != "Plane")
    return StepOutcome::invalid("unknown_tool");
  int from = 0, to = 0;
  if (action.params.size() != 2 || !parse_loc(action.params[0], from) ||
      !parse_loc(action.params[1], to))
    return StepOutcome::invalid("bad_params");

  const LogCity* from_city = state.city_of(from);
  const LogCity* to_city = state.city_of(to);
  if (!from_city || !to_city) return StepOutcome::invalid("unknown_location");
  if (from == to) return StepOutcome::invalid("same_location");

  if (action.tool == "Truck") {
    std::string truck = vehicle_at(state.trucks, from);
    if (truck.empty()) return StepOutcome::invalid("no_vehicle_at_start");
    if (from_city->id != to_city->id) return StepOutcome::invalid("cross_city_truck");
    return move(state, &LogState::trucks, truck, from, to);
  }

  if (!is_airport(state, from) || !is_airport(state, to))
    return StepOutcome::invalid("not_airport");
  std::string plane = vehicle_at(state.planes, from);
  if (plane.empty()) return StepOutcome::invalid("no_vehicle_at_start");
  if (from_city->id == to_city->id) return StepOutcome::invalid("same_city_plane");
  return move(state, &LogState::planes, plane, from, to);
}

std::vector<int> all_locations(const LogState& state) {
  std::vector<int> locs;
  for (const auto& c : state.cities) locs.insert(locs.end(), c.locations.begin(), c.locations.end());
  std::sort(locs.begin(), locs.end());
  return locs;
}

std::vector<std::pair<Action, StepOutcome>> enumerate_actions(const LogState& state) {
  std::vector<std::pair<Action, StepOutcome>> out;
  auto locs = all_locations(state);
  for (const char* tool : {"Truck", "Plane"}) {
    for (int from : locs) {
      for (int to : locs) {
        Action a{tool, {std::to_string(from), std::to_string(to)}};
        out.emplace_back(a, step(state, a));
      }
    }
  }
  return out;
}

bool is_goal(const LogState& state, const LogGoal& goal) {
  auto it = state.packages.find(goal.package);
  return it != state.packages.end() && it->second == goal.target_location;
}

LogState canonicalize(const LogState& state) {
  LogState out = state;
  std::sort(out.cities.begin(), out.cities.end(),
            [](const LogCity& a, const LogCity& b) { return a.id < b.id; });
  for (auto& c : out.cities) std::sort(c.locations.begin(), c.locations.end());
  return out;
}

std::string render(const LogState& state) {
  LogState c = canonicalize(state);
  json j;
  j["cities"] = json::array();
  for (const auto& city : c.cities) {
    j["cities"].push_back({{"airport", city.airport}, {"id", city.id}, {"locations", city.locations}});
  }
  j["trucks"] = c.trucks;
  j["planes"] = c.planes;
  j["packages"] = c.packages;
  return j.dump();
}

LogState parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw EnvError("bad log state rendering: " + text);
  }
  if (!j.is_object() || !j.contains("cities")) throw EnvError("bad log state rendering: " + text);
  LogState s;
  for (const auto& cj : j.at("cities")) {
    LogCity c;
    c.id = cj.at("id").get<int>();
    c.airport = cj.at("airport").get<int>();
    c.locations = cj.at("locations").get<std::vector<int>>();
    s.cities.push_back(c);
  }
  s.trucks = j.at("trucks").get<std::map<std::string, int>>();
  s.planes = j.at("planes").get<std::map<std::string, int>>();
  s.packages = j.at("packages").get<std::map<std::string, int>>();
  return canonicalize(s);
}

std::pair<LogState, LogGoal> sample_instance(uint64_t seed, int n_cities, int locs_per_city) {
  if (n_cities < 1 || locs_per_city < 2)
    throw EnvError("log_sample_instance: need n_cities >= 1 and locs_per_city >= 2");
  Rng rng(seed);
  LogState s;
  int next_loc = 1;
  for (int i = 0; i < n_cities; ++i) {
    LogCity c;
    c.id = i + 1;
    for (int k = 0; k < locs_per_city; ++k) c.locations.push_back(next_loc++);
    c.airport = c.locations[rng.below(c.locations.size())];
    s.cities.push_back(c);
  }
  for (int i = 0; i < n_cities; ++i) {
    const auto& locs = s.cities[i].locations;
    s.trucks["t" + std::to_string(i + 1)] = locs[rng.below(locs.size())];
  }
  s.planes["p1"] = s.cities[rng.below(s.cities.size())].airport;

  auto locs = all_locations(s);
  int pkg_loc = locs[rng.below(locs.size())];
  s.packages["pkg1"] = pkg_loc;
  int target = pkg_loc;
  while (target == pkg_loc) target = locs[rng.below(locs.size())];
  return {canonicalize(s), LogGoal{"pkg1", target}};
}

}  // namespace toolsim::lg
