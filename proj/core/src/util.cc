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

#include "envsynth/util.h"

#include <fcntl.h>
#include <fnmatch.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <string>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace envsynth {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

absl::Status ErrnoError(std::string_view what, const fs::path &path) {
  return absl::InternalError(
      absl::StrCat(AbslView(what), " ", path.string(), ": ", std::strerror(errno)));
}

absl::Status WriteAll(int fd, const uint8_t *data, size_t size,
                      const fs::path &path) {
  while (size > 0) {
    ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      return ErrnoError("write", path);
    }
    data += n;
    size -= static_cast<size_t>(n);
  }
  return absl::OkStatus();
}

}  // namespace

uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = kFnvOffset;
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

uint64_t Fnv1a64(ByteSpan data) {
  uint64_t h = kFnvOffset;
  for (uint8_t c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

absl::StatusOr<ByteArray> ReadFileBytes(const fs::path &path) {
  int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) return ErrnoError("open", path);
  ByteArray result;
  uint8_t buf[16384];
  while (true) {
    ssize_t n = ::read(fd, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      absl::Status status = ErrnoError("read", path);
      ::close(fd);
      return status;
    }
    if (n == 0) break;
    result.insert(result.end(), buf, buf + n);
  }
  ::close(fd);
  return result;
}

absl::Status WriteFileBytes(const fs::path &path, ByteSpan data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC,
                  0644);
  if (fd < 0) return ErrnoError("open", path);
  absl::Status status = WriteAll(fd, data.data(), data.size(), path);
  if (::close(fd) != 0 && status.ok()) status = ErrnoError("close", path);
  return status;
}

absl::Status WriteFileAtomic(const fs::path &path, ByteSpan data) {
  fs::path tmp = path;
  tmp += absl::StrCat(".tmp.", ::getpid());
  if (absl::Status s = WriteFileBytes(tmp, data); !s.ok()) return s;
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return absl::InternalError(
        absl::StrCat("rename to ", path.string(), " failed"));
  }
  return absl::OkStatus();
}

absl::Status WriteFileAtomic(const fs::path &path, std::string_view text) {
  return WriteFileAtomic(
      path, ByteSpan(reinterpret_cast<const uint8_t *>(text.data()),
                     text.size()));
}

absl::Status AppendLineAtomic(const fs::path &path, std::string_view line) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC,
                  0644);
  if (fd < 0) return ErrnoError("open", path);
  ssize_t n = ::write(fd, line.data(), line.size());
  absl::Status status = absl::OkStatus();
  if (n != static_cast<ssize_t>(line.size())) status = ErrnoError("append", path);
  ::close(fd);
  return status;
}

bool GlobMatch(std::string_view pattern, std::string_view path) {
  return ::fnmatch(std::string(pattern).c_str(), std::string(path).c_str(),
                   0) == 0;
}

bool MatchesAnyGlob(const std::vector<std::string> &patterns,
                    std::string_view path) {
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const std::string &p) { return GlobMatch(p, path); });
}

absl::Status ClearDirectory(const fs::path &dir) {
  std::error_code ec;
  if (!fs::exists(dir, ec)) {
    fs::create_directories(dir, ec);
    if (ec) return absl::InternalError(absl::StrCat("mkdir ", dir.string()));
    return absl::OkStatus();
  }
  for (const auto &entry : fs::directory_iterator(dir, ec)) {
    fs::remove_all(entry.path(), ec);
    if (ec) {
      return absl::InternalError(
          absl::StrCat("remove ", entry.path().string(), ": ", ec.message()));
    }
  }
  return absl::OkStatus();
}

std::vector<fs::path> ListFilesSorted(const fs::path &dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto &entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file(ec)) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    if (name.find(".tmp.") != std::string::npos) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string ZeroPad(uint64_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) >= width) return digits;
  return std::string(width - digits.size(), '0') + digits;
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> pieces;
  for (absl::string_view piece : absl::StrSplit(AbslView(text), sep)) {
    pieces.push_back(StdView(piece));
  }
  return pieces;
}

}  // namespace envsynth
