#include "toolsim/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace toolsim {

Subprocess::Subprocess(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw SubprocessError("pipe failed: " + std::string(strerror(errno)));
  pid_ = fork();
  if (pid_ < 0) throw SubprocessError("fork failed: " + std::string(strerror(errno)));
  if (pid_ == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
  int flags = fcntl(out_fd_, F_GETFL, 0);
  fcntl(out_fd_, F_SETFL, flags | O_NONBLOCK);
  signal(SIGPIPE, SIG_IGN);
}

Subprocess::~Subprocess() { terminate(); }

void Subprocess::write_line(const std::string& line) {
  std::string payload = line + "\n";
  size_t off = 0;
  while (off < payload.size()) {
    ssize_t n = ::write(in_fd_, payload.data() + off, payload.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SubprocessError("write to agent failed: " + std::string(strerror(errno)));
    }
    off += static_cast<size_t>(n);
  }
}

std::optional<std::string> Subprocess::read_line(int timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                         deadline - std::chrono::steady_clock::now())
                         .count();
    if (remaining <= 0) return std::nullopt;
    struct pollfd pfd{out_fd_, POLLIN, 0};
    int rv = poll(&pfd, 1, static_cast<int>(remaining));
    if (rv < 0) {
      if (errno == EINTR) continue;
      return std::nullopt;
    }
    if (rv == 0) return std::nullopt;
    char chunk[4096];
    ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
    if (n == 0) return std::nullopt;  // EOF
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

bool Subprocess::alive() const {
  if (pid_ <= 0) return false;
  return waitpid(pid_, nullptr, WNOHANG) == 0;
}

void Subprocess::terminate() {
  if (pid_ <= 0) return;
  if (in_fd_ >= 0) close(in_fd_);
  if (out_fd_ >= 0) close(out_fd_);
  in_fd_ = out_fd_ = -1;
  kill(pid_, SIGTERM);
  int status = 0;
  for (int i = 0; i < 50; ++i) {
    if (waitpid(pid_, &status, WNOHANG) != 0) {
      pid_ = -1;
      return;
    }
    usleep(10000);
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, &status, 0);
  pid_ = -1;
}

}  // namespace toolsim
