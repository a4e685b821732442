// Copyright 2026 The Envsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "envsynth/process_adapter.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/ipc.h>
#include <sys/shm.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "envsynth/coverage.h"
#include "envsynth/util.h"
#include "glog/logging.h"

extern char **environ;

namespace envsynth {

namespace {

// Our additions override inherited variables of the same name.
std::vector<std::string> BuildEnvironment(
    const std::vector<std::pair<std::string, std::string>> &overrides) {
  std::vector<std::string> env;
  for (char **e = environ; *e != nullptr; ++e) {
    std::string_view entry(*e);
    bool overridden = false;
    for (const auto &[key, value] : overrides) {
      if (entry.starts_with(key) && entry.size() > key.size() &&
          entry[key.size()] == '=') {
        overridden = true;
      }
    }
    if (!overridden) env.emplace_back(entry);
  }
  for (const auto &[key, value] : overrides) env.push_back(key + "=" + value);
  return env;
}

std::vector<char *> CStrings(std::vector<std::string> &strings) {
  std::vector<char *> out;
  for (std::string &s : strings) out.push_back(s.data());
  out.push_back(nullptr);
  return out;
}

}  // namespace

absl::StatusOr<std::unique_ptr<ProcessAdapter>> ProcessAdapter::Create(
    ProcessAdapterOptions options) {
  if (options.argv.empty()) {
    return absl::InvalidArgumentError("empty target command line");
  }
  const int shm_id = ::shmget(IPC_PRIVATE, kCoverageMapSize, IPC_CREAT | 0600);
  if (shm_id < 0) {
    return absl::InternalError(
        absl::StrCat("shmget failed: ", std::strerror(errno)));
  }
  void *mem = ::shmat(shm_id, nullptr, 0);
  if (mem == reinterpret_cast<void *>(-1)) {
    ::shmctl(shm_id, IPC_RMID, nullptr);
    return absl::InternalError(
        absl::StrCat("shmat failed: ", std::strerror(errno)));
  }
  return std::unique_ptr<ProcessAdapter>(new ProcessAdapter(
      std::move(options), shm_id, static_cast<uint8_t *>(mem)));
}

ProcessAdapter::ProcessAdapter(ProcessAdapterOptions options, int shm_id,
                               uint8_t *shm)
    : options_(std::move(options)), shm_id_(shm_id), shm_(shm) {}

ProcessAdapter::~ProcessAdapter() {
  ::shmdt(shm_);
  ::shmctl(shm_id_, IPC_RMID, nullptr);
}

std::string ProcessAdapter::Describe() const {
  return absl::StrJoin(options_.argv, " ");
}

ExecutionOutcome ProcessAdapter::Run(const SessionManifest &manifest,
                                     ByteSpan input, Duration timeout) {
  ExecutionOutcome outcome;
  const SessionPaths paths{manifest.session_dir};
  std::memset(shm_, 0, kCoverageMapSize);

  if (absl::Status s = WriteFileBytes(paths.input(), input); !s.ok()) {
    outcome.status = ExecutionStatus::kSetupError;
    outcome.diagnostic = std::string(s.message());
    return outcome;
  }

  bool input_as_file = false;
  std::vector<std::string> args = options_.argv;
  for (std::string &arg : args) {
    if (arg == "@@") {
      arg = paths.input().string();
      input_as_file = true;
    }
  }
  std::vector<std::pair<std::string, std::string>> overrides = {
      {kManifestEnvVar, paths.manifest().string()},
      {kSessionDirEnvVar, manifest.session_dir.string()},
      {kCoverageShmEnvVar, std::to_string(shm_id_)},
  };
  if (options_.interposer) {
    overrides.emplace_back("LD_PRELOAD", options_.interposer->string());
  }
  std::vector<std::string> env_strings = BuildEnvironment(overrides);
  std::vector<char *> argv = CStrings(args);
  std::vector<char *> envp = CStrings(env_strings);
  const std::string stdin_path =
      input_as_file ? std::string("/dev/null") : paths.input().string();

  int error_pipe[2];
  if (::pipe2(error_pipe, O_CLOEXEC) != 0) {
    outcome.status = ExecutionStatus::kSetupError;
    outcome.diagnostic = absl::StrCat("pipe2: ", std::strerror(errno));
    return outcome;
  }

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(error_pipe[0]);
    ::close(error_pipe[1]);
    outcome.status = ExecutionStatus::kSetupError;
    outcome.diagnostic = absl::StrCat("fork: ", std::strerror(errno));
    return outcome;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    int in = ::open(stdin_path.c_str(), O_RDONLY);
    if (in >= 0) ::dup2(in, STDIN_FILENO);
    if (!options_.forward_output) {
      int null_fd = ::open("/dev/null", O_WRONLY);
      if (null_fd >= 0) {
        ::dup2(null_fd, STDOUT_FILENO);
        ::dup2(null_fd, STDERR_FILENO);
      }
    }
    ::execvpe(argv[0], argv.data(), envp.data());
    const int err = errno;
    (void)!::write(error_pipe[1], &err, sizeof(err));
    ::_exit(127);
  }
  ::close(error_pipe[1]);
  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(error_pipe[0], &exec_errno, sizeof(exec_errno));
  } while (got < 0 && errno == EINTR);
  ::close(error_pipe[0]);
  if (got == sizeof(exec_errno)) {
    ::waitpid(pid, nullptr, 0);
    outcome.status = ExecutionStatus::kSetupError;
    outcome.diagnostic =
        absl::StrCat("cannot execute ", args[0], ": ", std::strerror(exec_errno));
    return outcome;
  }

  int wstatus = 0;
  bool timed_out = false;
  auto pause = std::chrono::microseconds(50);
  while (true) {
    const pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    if (Clock::now() - start >= timeout) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &wstatus, 0);
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(pause);
    if (pause < std::chrono::milliseconds(2)) pause *= 2;
  }
  outcome.elapsed = Clock::now() - start;

  if (timed_out) {
    outcome.status = ExecutionStatus::kHang;
  } else if (WIFSIGNALED(wstatus) && IsCrashSignal(WTERMSIG(wstatus))) {
    outcome.status = ExecutionStatus::kCrash;
    outcome.signal = WTERMSIG(wstatus);
  } else {
    outcome.status = ExecutionStatus::kOk;
  }
  std::memcpy(outcome.coverage.data(), shm_, kCoverageMapSize);
  return outcome;
}

}  // namespace envsynth
