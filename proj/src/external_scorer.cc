#include "segfst/external_scorer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "segfst/error.h"

namespace segfst {

namespace {

[[noreturn]] void Unavailable(const std::string& what) {
  throw Error(ErrorCode::kScorerUnavailable, what);
}

}  // namespace

std::string EncodeScoreRequest(int64_t id, const ScorerContext& ctx,
                               std::span<const Label> candidates) {
  if (ctx.symbols == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "request encoding needs symbols");
  }
  nlohmann::ordered_json req;
  req["id"] = id;
  req["window"] = ctx.symbols->Decode(ctx.window);
  req["prefix"] = ctx.symbols->Decode(ctx.prefix);
  req["candidates"] = ctx.symbols->Decode(candidates);
  return req.dump();
}

std::vector<double> DecodeScoreResponse(const std::string& line,
                                        int64_t expected_id,
                                        size_t expected_count) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    Unavailable("malformed response: " + line);
  }
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("logprobs") ||
      !doc["id"].is_number_integer() || !doc["logprobs"].is_array()) {
    Unavailable("response lacks id/logprobs: " + line);
  }
  if (doc["id"].get<int64_t>() != expected_id) {
    Unavailable("response id " + doc["id"].dump() + ", expected " +
                std::to_string(expected_id));
  }
  const auto& values = doc["logprobs"];
  if (values.size() != expected_count) {
    Unavailable("expected " + std::to_string(expected_count) +
                " scores, got " + std::to_string(values.size()));
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      Unavailable("non-finite score in response: " + line);
    }
    out.push_back(v.get<double>());
  }
  return out;
}

ExternalScorer::ExternalScorer(std::string command,
                               std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  int in_pair[2];
  int out_pipe[2];
  // A socket for the child's stdin lets us write with MSG_NOSIGNAL instead
  // of touching the process-wide SIGPIPE disposition.
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) {
    Unavailable(std::string("socketpair: ") + std::strerror(errno));
  }
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pair[0]);
    close(in_pair[1]);
    Unavailable(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = fork();
  if (pid_ < 0) {
    close(in_pair[0]);
    close(in_pair[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    Unavailable(std::string("fork: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    // Own process group, so shutdown also reaches grandchildren of the shell.
    setpgid(0, 0);
    dup2(in_pair[1], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid_, pid_);
  close(in_pair[1]);
  close(out_pipe[1]);
  to_child_ = in_pair[0];
  from_child_ = out_pipe[0];
}

ExternalScorer::~ExternalScorer() { Shutdown(); }

void ExternalScorer::Shutdown() {
  if (to_child_ >= 0) {
    shutdown(to_child_, SHUT_WR);
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    // Give the child a moment to exit on EOF before killing it.
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      usleep(2000);
    }
    kill(-pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ExternalScorer::ReadLine() {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) Unavailable("timed out waiting for scorer");
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      Unavailable(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) Unavailable("timed out waiting for scorer");
    char chunk[4096];
    ssize_t got = read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      if (errno == EINTR) continue;
      Unavailable(std::string("read: ") + std::strerror(errno));
    }
    if (got == 0) Unavailable("scorer process closed its output");
    buffer_.append(chunk, static_cast<size_t>(got));
  }
}

std::vector<double> ExternalScorer::ScoreNext(
    const ScorerContext& ctx, std::span<const Label> candidates) {
  if (to_child_ < 0) Unavailable("scorer process is not running");
  const int64_t id = next_id_++;
  std::string request = EncodeScoreRequest(id, ctx, candidates);
  request += '\n';
  size_t sent = 0;
  while (sent < request.size()) {
    ssize_t n = send(to_child_, request.data() + sent, request.size() - sent,
                     MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      Unavailable(std::string("write to scorer: ") + std::strerror(errno));
    }
    sent += static_cast<size_t>(n);
  }
  return DecodeScoreResponse(ReadLine(), id, candidates.size());
}

size_t ServeScorer(Scorer& scorer, std::istream& in, std::ostream& out) {
  size_t served = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto req = nlohmann::json::parse(line);
    SymbolTable symbols;
    auto encode = [&](const nlohmann::json& words) {
      std::vector<Label> labels;
      for (const auto& w : words) labels.push_back(symbols.Add(w.get<std::string>()));
      return labels;
    };
    std::vector<Label> window = encode(req.at("window"));
    std::vector<Label> prefix = encode(req.at("prefix"));
    std::vector<Label> candidates = encode(req.at("candidates"));
    ScorerContext ctx{window, prefix, &symbols};
    nlohmann::ordered_json resp;
    resp["id"] = req.at("id");
    resp["logprobs"] = scorer.ScoreNext(ctx, candidates);
    out << resp.dump() << '\n' << std::flush;
    ++served;
  }
  return served;
}

}  // namespace segfst
