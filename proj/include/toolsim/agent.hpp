#pragma once

#include <cstdint>
#include <memory>

#include "toolsim/env.hpp"
#include "toolsim/planner.hpp"

namespace toolsim {

// One prior step as replayed to the agent.
struct HistoryEntry {
  std::string thought;
  std::string action;  // canonical text form
  std::string result;  // rendered state, or "invalid: <reason>"
};

// Everything an agent sees on one turn.
struct Observation {
  std::string episode_id;
  int step = 0;
  std::string env_id;
  std::string tool_docs;
  std::string goal;
  std::string state;  // rendered
  std::vector<HistoryEntry> history;
  std::optional<std::string> last_error;
};

struct AgentReply {
  std::string thought;
  std::string tool;
  std::vector<std::string> input;

  Action action() const { return Action{tool, input}; }
};

json observation_to_json(const Observation& o);
Observation observation_from_json(const json& j);
json reply_to_json(const AgentReply& r);
AgentReply reply_from_json(const json& j);

struct AgentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentReply act(const Observation& obs) = 0;
  virtual std::string name() const = 0;
};

// Plans at the start of an episode and replays the plan; every emitted
// action is executable and goal-directed.
class OracleAgent : public Agent {
 public:
  AgentReply act(const Observation& obs) override;
  std::string name() const override { return "oracle"; }

 private:
  std::string episode_;
  std::vector<Action> queue_;  // remaining actions, front first
};

// Uniform over the environment's full action grammar, valid or not.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(uint64_t seed) : seed_(seed) {}
  AgentReply act(const Observation& obs) override;
  std::string name() const override { return "random"; }

 private:
  uint64_t seed_;
};

// Emits only actions guaranteed to be rejected.
class AlwaysInvalidAgent : public Agent {
 public:
  AgentReply act(const Observation& obs) override;
  std::string name() const override { return "always-invalid"; }
};

class Subprocess;

// Drives an external process speaking JSON lines on stdio: one request line
// out, one reply line back.
class CommandAgent : public Agent {
 public:
  explicit CommandAgent(const std::string& command, int timeout_ms = 30000);
  ~CommandAgent() override;
  AgentReply act(const Observation& obs) override;
  std::string name() const override { return "command"; }

 private:
  std::unique_ptr<Subprocess> proc_;
  int timeout_ms_;
};

// POSTs the request JSON to an HTTP endpoint and reads the reply JSON.
class HttpAgent : public Agent {
 public:
  HttpAgent(const std::string& host, int port, const std::string& path = "/act",
            int timeout_ms = 30000);
  AgentReply act(const Observation& obs) override;
  std::string name() const override { return "http"; }

 private:
  std::string host_;
  int port_;
  std::string path_;
  int timeout_ms_;
};

// Factory for the scripted agents: "oracle", "random", "always-invalid".
std::unique_ptr<Agent> make_scripted_agent(const std::string& name, uint64_t seed);

}  // namespace toolsim
