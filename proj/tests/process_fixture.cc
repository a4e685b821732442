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

// Stand-in for an instrumented target running under the preloaded runtime.
// It speaks the runtime side of the protocol itself: reads the manifest
// named by ENVSYNTH_MANIFEST, attaches the coverage region named by
// __AFL_SHM_ID, substitutes or captures opened files, and logs accesses.
//
// The program input holds one command per line:
//   read <path>          open through the runtime, hit a content-dependent cell
//   write <path> <text>  write intent, redirected to scratch in fuzzing mode
//   crash <signal>       raise(signal)
//   hang                 sleep forever
//   exit <code>
// Everything read is appended to $ENVSYNTH_SESSION_DIR/observed.

#include <fnmatch.h>
#include <signal.h>
#include <stdlib.h>
#include <sys/shm.h>
#include <unistd.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Manifest {
  bool capture = false;
  std::map<std::string, std::pair<std::string, std::string>> subs;  // path -> tag, substitute
  std::vector<std::string> block;
};

uint8_t *g_cov = nullptr;
Manifest g_manifest;
bool g_have_manifest = false;
std::string g_session;
std::set<std::string> g_captured;
std::map<std::string, std::string> g_written;

void Hit(uint32_t cell) {
  if (g_cov != nullptr) ++g_cov[cell & 0xFFFF];
}

std::string Slurp(const std::string &path, bool *ok) {
  std::ifstream in(path, std::ios::binary);
  *ok = static_cast<bool>(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void LoadManifest() {
  const char *path = getenv("ENVSYNTH_MANIFEST");
  const char *session = getenv("ENVSYNTH_SESSION_DIR");
  if (path == nullptr || session == nullptr) return;
  g_session = session;
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return;
  g_manifest.capture = line == "mode capture";
  std::getline(in, line);
  const size_t n = std::stoul(line.substr(6));
  for (size_t i = 0; i < n && std::getline(in, line); ++i) {
    const size_t t1 = line.find('\t');
    const size_t t2 = line.find('\t', t1 + 1);
    g_manifest.subs[line.substr(t1 + 1, t2 - t1 - 1)] = {line.substr(0, t1),
                                                         line.substr(t2 + 1)};
  }
  while (std::getline(in, line)) g_manifest.block.push_back(line.substr(6));
  g_have_manifest = true;
}

std::string Canonical(const std::string &path) {
  char *real = realpath(path.c_str(), nullptr);
  if (real == nullptr) return path;
  std::string out(real);
  free(real);
  return out;
}

uint64_t Fnv(const std::string &s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool Blocked(const std::string &canonical) {
  for (const std::string &g : g_manifest.block) {
    if (fnmatch(g.c_str(), canonical.c_str(), 0) == 0) return true;
  }
  return false;
}

std::string Open(const std::string &raw, bool *ok) {
  const std::string path = Canonical(raw);
  if (!g_have_manifest || Blocked(path)) return Slurp(path, ok);
  if (auto w = g_written.find(path); w != g_written.end()) {
    return Slurp(w->second, ok);
  }
  if (!g_manifest.capture) {
    auto it = g_manifest.subs.find(path);
    return Slurp(it == g_manifest.subs.end() ? path : it->second.second, ok);
  }
  std::string bytes = Slurp(path, ok);
  if (*ok && g_captured.insert(path).second) {
    char tag[17];
    snprintf(tag, sizeof(tag), "%016llx",
             static_cast<unsigned long long>(Fnv(path)));
    const std::string copy = g_session + "/captured/" + tag;
    std::ofstream(copy, std::ios::binary) << bytes;
    std::ofstream log(g_session + "/access.log", std::ios::app);
    log << tag << '\t' << path << '\t' << copy << '\n';
  }
  return bytes;
}

}  // namespace

int main(int argc, char **argv) {
  if (const char *id = getenv("__AFL_SHM_ID")) {
    void *mem = shmat(atoi(id), nullptr, 0);
    if (mem != reinterpret_cast<void *>(-1)) g_cov = static_cast<uint8_t *>(mem);
  }
  LoadManifest();
  Hit(1);

  std::string program;
  if (argc > 1) {
    bool ok;
    program = Slurp(argv[1], &ok);
  } else {
    std::ostringstream s;
    s << std::cin.rdbuf();
    program = s.str();
  }
  std::istringstream lines(program);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    std::string cmd;
    words >> cmd;
    if (cmd == "read") {
      std::string path;
      words >> path;
      bool ok = false;
      std::string bytes = Open(path, &ok);
      Hit(ok ? 0x100 + static_cast<uint32_t>(Fnv(bytes) % 0x100) : 2);
      if (!g_session.empty()) {
        std::ofstream(g_session + "/observed", std::ios::app) << bytes << '\n';
      }
    } else if (cmd == "write") {
      std::string path, text;
      words >> path >> text;
      std::string dest = Canonical(path);
      if (g_have_manifest && !g_manifest.capture) {
        const std::string scratch =
            g_session + "/scratch/" + std::to_string(Fnv(dest));
        g_written[dest] = scratch;
        dest = scratch;
      }
      std::ofstream(dest, std::ios::binary) << text;
      Hit(3);
    } else if (cmd == "crash") {
      int sig = 0;
      words >> sig;
      Hit(4);
      signal(sig, SIG_DFL);
      raise(sig);
    } else if (cmd == "hang") {
      for (;;) pause();
    } else if (cmd == "exit") {
      int code = 0;
      words >> code;
      return code;
    }
  }
  return 0;
}
