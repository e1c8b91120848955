#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>
#include <vector>

#include "timeq/timecon.hpp"

extern char** environ;

namespace timeq {

std::string statusName(BridgeResult::Status s) {
  switch (s) {
    case BridgeResult::Sat: return "sat";
    case BridgeResult::Unsat: return "unsat";
    case BridgeResult::Unknown: return "unknown";
    case BridgeResult::SpawnError: return "spawn-error";
    case BridgeResult::MalformedReply: return "malformed-reply";
    case BridgeResult::Timeout: return "timeout";
  }
  return "?";
}

namespace {

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

}  // namespace

BridgeResult smtBridgeCheck(const std::string& script, const std::string& command,
                            double timeoutSeconds) {
  std::vector<std::string> argv;
  std::istringstream is(command);
  for (std::string w; is >> w;) argv.push_back(w);
  if (argv.empty()) return {BridgeResult::SpawnError, "empty command"};

  int in[2], out[2];
  if (::pipe2(in, O_CLOEXEC) != 0) return {BridgeResult::SpawnError, std::strerror(errno)};
  Fd inR{in[0]}, inW{in[1]};
  if (::pipe2(out, O_CLOEXEC) != 0) return {BridgeResult::SpawnError, std::strerror(errno)};
  Fd outR{out[0]}, outW{out[1]};

  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, inR.fd, 0);
  posix_spawn_file_actions_adddup2(&fa, outW.fd, 1);
  posix_spawn_file_actions_addopen(&fa, 2, "/dev/null", O_WRONLY, 0);

  std::vector<char*> cargv;
  for (auto& a : argv) cargv.push_back(a.data());
  cargv.push_back(nullptr);

  pid_t pid;
  int rc = posix_spawnp(&pid, cargv[0], &fa, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0) return {BridgeResult::SpawnError, argv[0] + ": " + std::strerror(rc)};
  inR.reset();
  outW.reset();

  // Ignore SIGPIPE while feeding the solver.
  struct sigaction ign {}, old {};
  ign.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ign, &old);
  std::size_t off = 0;
  while (off < script.size()) {
    ssize_t n = ::write(inW.fd, script.data() + off, script.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    off += static_cast<std::size_t>(n);
  }
  inW.reset();
  ::sigaction(SIGPIPE, &old, nullptr);

  std::string reply;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(static_cast<long>(timeoutSeconds * 1000));
  bool timedOut = false;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      timedOut = true;
      break;
    }
    pollfd p{outR.fd, POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) {
      timedOut = true;
      break;
    }
    char buf[4096];
    ssize_t n = ::read(outR.fd, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    reply.append(buf, static_cast<std::size_t>(n));
  }
  if (timedOut) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timedOut) return {BridgeResult::Timeout, std::to_string(timeoutSeconds) + "s"};

  std::istringstream rs(reply);
  std::string tok;
  rs >> tok;
  if (tok == "sat") return {BridgeResult::Sat, {}};
  if (tok == "unsat") return {BridgeResult::Unsat, {}};
  if (tok == "unknown") return {BridgeResult::Unknown, {}};
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    return {BridgeResult::SpawnError, "exit 127"};
  return {BridgeResult::MalformedReply, reply.substr(0, 200)};
}

}  // namespace timeq
