#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace toolsim {

struct SubprocessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Child process with piped stdin/stdout, run via /bin/sh -c. Line-oriented;
// reads are buffered and timeout-bounded.
class Subprocess {
 public:
  explicit Subprocess(const std::string& command);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  void write_line(const std::string& line);

  // One line without the trailing newline; nullopt on timeout or EOF.
  std::optional<std::string> read_line(int timeout_ms);

  bool alive() const;
  void terminate();

 private:
  int pid_ = -1;
  int in_fd_ = -1;   // write end of the child's stdin
  int out_fd_ = -1;  // read end of the child's stdout
  std::string buffer_;
};

}  // namespace toolsim
