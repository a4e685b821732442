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

#include "envsynth/corpus_store.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <system_error>
#include <utility>

#include "absl/strings/str_cat.h"
#include "envsynth/util.h"
#include "glog/logging.h"

namespace envsynth {

namespace fs = std::filesystem;

namespace {

constexpr char kPathRecord[] = ".path";

}  // namespace

std::string SanitizeSourceName(std::string_view name) {
  std::string out;
  for (char c : name.substr(0, 64)) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) ||
                      c == '.' || c == '_' || c == '-';
    out.push_back(safe ? c : '_');
  }
  return out.empty() ? "seed" : out;
}

namespace {

std::optional<size_t> ParseDecimal(std::string_view text) {
  if (text.empty() || text.size() > 19) return std::nullopt;
  if (text.size() > 1 && text[0] == '0') return std::nullopt;
  size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Like ParseDecimal but accepts zero padding (file-name fields).
std::optional<size_t> ParsePadded(std::string_view text) {
  if (text.empty() || text.size() > 19) return std::nullopt;
  size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool HasOuterWhitespace(std::string_view s) {
  return s.empty() || IsSpace(s.front()) || IsSpace(s.back());
}

absl::Status LineError(size_t line, std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", AbslView(what)));
}

absl::StatusOr<ResourceId> ReadPathRecord(const fs::path &dir) {
  absl::StatusOr<ByteArray> bytes = ReadFileBytes(dir / kPathRecord);
  if (!bytes.ok()) return bytes.status();
  std::string path = AsString(*bytes);
  while (!path.empty() && path.back() == '\n') path.pop_back();
  if (path.empty() || path[0] != '/') {
    return absl::DataLossError(
        absl::StrCat("bad resource path record in ", dir.string()));
  }
  return ResourceId::FromCanonicalPath(std::move(path));
}

// Numbered copy files of one resource directory, contiguous from 0.
std::vector<fs::path> ListCopyFiles(const fs::path &dir,
                                    std::vector<std::string> *warnings) {
  std::map<size_t, fs::path> numbered;
  for (const fs::path &file : ListFilesSorted(dir)) {
    if (auto n = ParseDecimal(file.filename().string())) {
      numbered.emplace(*n, file);
    }
  }
  std::vector<fs::path> files;
  for (const auto &[n, file] : numbered) {
    if (n != files.size()) {
      if (warnings) {
        warnings->push_back(absl::StrCat("gap in resource copies at ",
                                         file.string(), "; ignoring rest"));
      }
      break;
    }
    files.push_back(file);
  }
  return files;
}

struct ParsedLine {
  uint64_t id_tag = 0;
  std::string reference;
  size_t line = 0;
};

}  // namespace

OutputLayout::OutputLayout(fs::path root) {
  std::error_code ec;
  root_ = fs::absolute(root, ec).lexically_normal();
  if (ec) root_ = std::move(root);
  std::string s = root_.string();
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  root_ = s;
}

absl::Status OutputLayout::Initialize() const {
  for (const fs::path &dir : {input_dir(), resources_dir(), environment_dir(),
                              crash_dir(), stats_dir()}) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      return absl::InternalError(
          absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
    }
  }
  return absl::OkStatus();
}

fs::path OutputLayout::resource_dir(const ResourceId &id) const {
  return resources_dir() / id.id_tag_hex();
}

fs::path OutputLayout::resource_copy_path(const ResourceId &id,
                                          size_t seed_index) const {
  return resource_dir(id) / std::to_string(seed_index);
}

fs::path OutputLayout::input_path(const InputSeed &seed) const {
  return input_dir() / InputFileName(seed);
}

fs::path OutputLayout::environment_path(const EnvironmentSeed &env) const {
  return environment_dir() / EnvironmentFileName(env);
}

fs::path OutputLayout::crash_path(const CrashRecord &crash) const {
  return crash_dir() / CrashFileName(crash);
}

std::string OutputLayout::Reference(const fs::path &path) const {
  fs::path normal = path.lexically_normal();
  if (normal.is_absolute()) {
    fs::path rel = normal.lexically_relative(root_);
    if (!rel.empty() && *rel.begin() != "..") return rel.string();
  }
  return normal.string();
}

fs::path OutputLayout::Resolve(std::string_view reference) const {
  fs::path p(reference);
  return p.is_absolute() ? p : root_ / p;
}

std::string InputFileName(const InputSeed &seed) {
  std::string name = absl::StrCat("id:", ZeroPad(seed.seed_index, 6));
  switch (seed.provenance) {
    case InputProvenance::kInitial:
      absl::StrAppend(&name, ",orig:", SanitizeSourceName(seed.source_name));
      break;
    case InputProvenance::kSynced:
      absl::StrAppend(&name, ",sync:", SanitizeSourceName(seed.source_name));
      break;
    case InputProvenance::kPromoted:
      absl::StrAppend(&name, ",promoted");
      break;
  }
  return name;
}

std::string EnvironmentFileName(const EnvironmentSeed &env) {
  std::string name = absl::StrCat("id:", ZeroPad(env.env_index, 6));
  if (env.lineage) {
    absl::StrAppend(&name, ",src:", ZeroPad(env.lineage->parent, 6));
  }
  absl::StrAppend(&name, ",op:", AbslView(OperatorName(env.op())));
  return name;
}

std::string CrashFileName(const CrashRecord &crash) {
  std::string name =
      absl::StrCat("id:", ZeroPad(crash.crash_index, 6),
                   ",sig:", ZeroPad(static_cast<uint64_t>(crash.signal), 2),
                   ",cov:", FormatIdTag(crash.coverage_hash));
  if (crash.env.lineage) {
    absl::StrAppend(&name, ",src:", ZeroPad(crash.env.lineage->parent, 6));
  }
  absl::StrAppend(&name, ",op:", AbslView(OperatorName(crash.env.op())));
  return name;
}

std::optional<EnvironmentFileInfo> ParseEnvironmentFileName(
    std::string_view name) {
  EnvironmentFileInfo info;
  bool have_id = false;
  bool have_op = false;
  for (std::string_view field : Split(name, ',')) {
    size_t colon = field.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string_view key = field.substr(0, colon);
    std::string_view value = field.substr(colon + 1);
    if (key == "id") {
      auto v = ParsePadded(value);
      if (!v) return std::nullopt;
      info.id = *v;
      have_id = true;
    } else if (key == "src") {
      auto v = ParsePadded(value);
      if (!v) return std::nullopt;
      info.source = *v;
    } else if (key == "op") {
      auto op = ParseOperatorName(value);
      if (!op) return std::nullopt;
      info.op = *op;
      have_op = true;
    } else if (key == "sig") {
      auto v = ParsePadded(value);
      if (!v) return std::nullopt;
      info.signal = static_cast<int>(*v);
    } else if (key == "cov") {
      auto v = ParseIdTag(value);
      if (!v) return std::nullopt;
      info.coverage_hash = *v;
    } else {
      return std::nullopt;
    }
  }
  if (!have_id || !have_op) return std::nullopt;
  return info;
}

absl::StatusOr<fs::path> PersistInput(const OutputLayout &layout,
                                      const InputSeed &seed) {
  fs::path path = layout.input_path(seed);
  if (absl::Status s = WriteFileAtomic(path, *seed.content); !s.ok()) return s;
  return path;
}

absl::StatusOr<fs::path> PersistResourceCopy(const OutputLayout &layout,
                                             const ResourceCopy &copy) {
  const fs::path dir = layout.resource_dir(copy.resource);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  if (!fs::exists(dir / kPathRecord, ec)) {
    absl::Status s = WriteFileAtomic(
        dir / kPathRecord, absl::StrCat(copy.resource.canonical_path(), "\n"));
    if (!s.ok()) return s;
  }
  fs::path path = layout.resource_copy_path(copy.resource, copy.seed_index);
  if (absl::Status s = WriteFileAtomic(path, *copy.content); !s.ok()) return s;
  return path;
}

absl::StatusOr<std::string> FormatEnvironmentSeed(const OutputLayout &layout,
                                                  const CorpusSet &corpora,
                                                  const EnvironmentSeed &env) {
  if (absl::Status s = corpora.CheckEnvironment(env); !s.ok()) return s;
  std::vector<std::pair<ResourceId, size_t>> ordered(env.resources.begin(),
                                                     env.resources.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto &a, const auto &b) {
    return IdTagOrder()(a.first, b.first);
  });
  std::error_code ec;
  std::string text = absl::StrCat(ordered.size(), "\n");
  for (const auto &[id, index] : ordered) {
    fs::path path = layout.resource_copy_path(id, index);
    if (!fs::exists(path, ec)) {
      return absl::FailedPreconditionError(
          absl::StrCat("resource copy not persisted: ", path.string()));
    }
    absl::StrAppend(&text, id.id_tag_hex(), " ", layout.Reference(path), "\n");
  }
  fs::path input = layout.input_path(corpora.inputs()[env.input]);
  if (!fs::exists(input, ec)) {
    return absl::FailedPreconditionError(
        absl::StrCat("input seed not persisted: ", input.string()));
  }
  absl::StrAppend(&text, layout.Reference(input), "\n");
  return text;
}

absl::StatusOr<fs::path> WriteEnvironmentSeed(const OutputLayout &layout,
                                              const CorpusSet &corpora,
                                              const EnvironmentSeed &env,
                                              const fs::path &dest) {
  absl::StatusOr<std::string> text = FormatEnvironmentSeed(layout, corpora, env);
  if (!text.ok()) return text.status();
  if (absl::Status s = WriteFileAtomic(dest, *text); !s.ok()) return s;
  return dest;
}

absl::StatusOr<EnvironmentSeed> ParseEnvironmentText(std::string_view text,
                                                     const OutputLayout &layout,
                                                     CorpusSet &corpora) {
  // Phase 1: syntax.
  std::vector<std::string_view> lines = Split(text, '\n');
  if (lines.empty() || !lines.back().empty()) {
    return LineError(lines.size(), "missing trailing newline");
  }
  lines.pop_back();
  if (lines.empty()) return LineError(1, "missing resource count");
  std::optional<size_t> count = ParseDecimal(lines[0]);
  if (!count) return LineError(1, "malformed resource count");

  std::vector<ParsedLine> parsed;
  std::set<uint64_t> seen_tags;
  for (size_t i = 0; i < *count; ++i) {
    const size_t line_no = i + 2;
    if (line_no > lines.size()) {
      return LineError(line_no, "missing resource line");
    }
    std::string_view line = lines[line_no - 1];
    // The last available line cannot be a resource line: the input path
    // must follow.
    if (line_no == lines.size()) {
      return LineError(line_no, "expected '<id_tag> <path>', found end of resources");
    }
    if (line.size() < 18 || line[16] != ' ') {
      return LineError(line_no, "expected '<id_tag> <path>'");
    }
    std::optional<uint64_t> tag = ParseIdTag(line.substr(0, 16));
    if (!tag) return LineError(line_no, "malformed resource id");
    std::string_view ref = line.substr(17);
    if (HasOuterWhitespace(ref)) {
      return LineError(line_no, "unexpected whitespace around path");
    }
    if (!seen_tags.insert(*tag).second) {
      return LineError(line_no, "duplicate resource id");
    }
    parsed.push_back({*tag, std::string(ref), line_no});
  }
  const size_t input_line = *count + 2;
  if (input_line > lines.size()) {
    return LineError(input_line, "missing input path");
  }
  if (lines.size() > input_line) {
    return LineError(input_line + 1, "trailing content");
  }
  std::string_view input_ref = lines[input_line - 1];
  if (HasOuterWhitespace(input_ref)) {
    return LineError(input_line, "malformed input path");
  }
  for (const ParsedLine &p : parsed) {
    if (layout.Resolve(p.reference) == layout.Resolve(input_ref)) {
      return LineError(input_line, "input path also listed as a resource");
    }
  }

  // Phase 2: read everything without touching `corpora`.
  struct ResolvedLine {
    ResourceId id;
    fs::path path;
    SharedBytes content;
    // Set when no corpus exists yet; holds the copies to seed it with.
    std::vector<SharedBytes> new_corpus;
  };
  std::vector<ResolvedLine> resolved;
  for (const ParsedLine &p : parsed) {
    ResolvedLine r;
    r.path = layout.Resolve(p.reference);
    absl::StatusOr<ByteArray> bytes = ReadFileBytes(r.path);
    if (!bytes.ok()) {
      return LineError(p.line, absl::StrCat("missing resource file ",
                                            r.path.string()));
    }
    r.content = ShareBytes(std::move(*bytes));
    if (const ResourceId *known = corpora.FindByIdTag(p.id_tag)) {
      r.id = *known;
    } else {
      absl::StatusOr<ResourceId> id = ReadPathRecord(r.path.parent_path());
      if (!id.ok()) {
        return LineError(p.line, absl::StrCat("unknown resource ",
                                              FormatIdTag(p.id_tag)));
      }
      if (id->id_tag() != p.id_tag) {
        return LineError(p.line, "resource id does not match its path record");
      }
      r.id = *id;
      for (const fs::path &file : ListCopyFiles(r.path.parent_path(), nullptr)) {
        absl::StatusOr<ByteArray> copy = ReadFileBytes(file);
        if (!copy.ok()) return LineError(p.line, StdView(copy.status().message()));
        r.new_corpus.push_back(ShareBytes(std::move(*copy)));
      }
      if (r.new_corpus.empty()) r.new_corpus.push_back(r.content);
    }
    resolved.push_back(std::move(r));
  }
  const fs::path input_path = layout.Resolve(input_ref);
  absl::StatusOr<ByteArray> input_bytes = ReadFileBytes(input_path);
  if (!input_bytes.ok()) {
    return LineError(input_line,
                     absl::StrCat("missing input file ", input_path.string()));
  }

  // Phase 3: match or insert.
  EnvironmentSeed env;
  for (ResolvedLine &r : resolved) {
    if (!r.new_corpus.empty()) {
      corpora.CreateResourceCorpus(r.id, r.new_corpus[0]);
      for (size_t i = 1; i < r.new_corpus.size(); ++i) {
        corpora.AddResourceCopy(r.id, r.new_corpus[i], CopyOrigin::kFuzzed);
      }
    }
    const CorpusSet::ResourceCorpus &corpus = corpora.resource_corpus(r.id);
    std::optional<size_t> index;
    if (r.path.parent_path() == layout.resource_dir(r.id)) {
      auto n = ParseDecimal(r.path.filename().string());
      if (n && *n < corpus.size() && *corpus[*n].content == *r.content) {
        index = n;
      }
    }
    for (size_t i = 0; !index && i < corpus.size(); ++i) {
      if (*corpus[i].content == *r.content) index = i;
    }
    if (!index) {
      index = corpora.AddResourceCopy(r.id, r.content, CopyOrigin::kFuzzed)
                  .seed_index;
    }
    env.resources.emplace(r.id, *index);
  }

  const std::vector<InputSeed> &inputs = corpora.inputs();
  std::optional<size_t> input_index;
  if (input_path.parent_path() == layout.input_dir()) {
    std::string name = input_path.filename().string();
    if (name.starts_with("id:")) {
      auto n = ParsePadded(name.substr(3, name.find(',') - 3));
      if (n && *n < inputs.size() && *inputs[*n].content == *input_bytes) {
        input_index = n;
      }
    }
  }
  for (size_t i = 0; !input_index && i < inputs.size(); ++i) {
    if (*inputs[i].content == *input_bytes) input_index = i;
  }
  if (!input_index) {
    input_index = corpora.AddInput(ShareBytes(std::move(*input_bytes)),
                                   InputProvenance::kSynced,
                                   input_path.filename().string());
  }
  env.input = *input_index;
  return env;
}

absl::StatusOr<EnvironmentSeed> ParseEnvironmentSeed(const fs::path &src,
                                                     const OutputLayout &layout,
                                                     CorpusSet &corpora) {
  absl::StatusOr<ByteArray> bytes = ReadFileBytes(src);
  if (!bytes.ok()) return bytes.status();
  absl::StatusOr<EnvironmentSeed> env =
      ParseEnvironmentText(AsString(*bytes), layout, corpora);
  if (!env.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(src.string(), ": ", env.status().message()));
  }
  return env;
}

absl::StatusOr<LoadedCampaign> LoadCampaign(const fs::path &root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    return absl::NotFoundError(
        absl::StrCat("no campaign directory at ", root.string()));
  }
  OutputLayout layout(root);
  LoadedCampaign loaded;
  CorpusSet &corpora = loaded.corpora;

  for (const fs::path &file : ListFilesSorted(layout.input_dir())) {
    const std::string name = file.filename().string();
    std::vector<std::string_view> fields = Split(name, ',');
    std::optional<size_t> id;
    if (fields.size() == 2 && fields[0].starts_with("id:")) {
      id = ParsePadded(fields[0].substr(3));
    }
    if (!id || *id != corpora.inputs().size()) {
      loaded.warnings.push_back(
          absl::StrCat("skipping unexpected input file ", file.string()));
      continue;
    }
    InputProvenance provenance;
    std::string source;
    std::string_view tail = fields[1];
    if (tail.starts_with("orig:")) {
      provenance = InputProvenance::kInitial;
      source = tail.substr(5);
    } else if (tail.starts_with("sync:")) {
      provenance = InputProvenance::kSynced;
      source = tail.substr(5);
    } else if (tail == "promoted") {
      provenance = InputProvenance::kPromoted;
    } else {
      loaded.warnings.push_back(
          absl::StrCat("skipping unexpected input file ", file.string()));
      continue;
    }
    absl::StatusOr<ByteArray> bytes = ReadFileBytes(file);
    if (!bytes.ok()) {
      loaded.warnings.push_back(std::string(bytes.status().message()));
      continue;
    }
    corpora.AddInput(ShareBytes(std::move(*bytes)), provenance, source);
  }

  for (const auto &entry : fs::directory_iterator(layout.resources_dir(), ec)) {
    if (!entry.is_directory()) continue;
    absl::StatusOr<ResourceId> id = ReadPathRecord(entry.path());
    if (!id.ok() || id->id_tag_hex() != entry.path().filename().string()) {
      loaded.warnings.push_back(absl::StrCat(
          "skipping resource directory without valid path record: ",
          entry.path().string()));
      continue;
    }
    std::vector<fs::path> files = ListCopyFiles(entry.path(), &loaded.warnings);
    for (size_t i = 0; i < files.size(); ++i) {
      absl::StatusOr<ByteArray> bytes = ReadFileBytes(files[i]);
      if (!bytes.ok()) {
        loaded.warnings.push_back(std::string(bytes.status().message()));
        break;
      }
      if (i == 0) {
        corpora.CreateResourceCorpus(*id, ShareBytes(std::move(*bytes)));
      } else {
        corpora.AddResourceCopy(*id, ShareBytes(std::move(*bytes)),
                                CopyOrigin::kFuzzed);
      }
    }
  }

  std::map<size_t, size_t> env_ids;  // file id -> loaded env_index
  auto load_dir = [&](const fs::path &dir, bool crashes) {
    std::vector<std::pair<EnvironmentFileInfo, fs::path>> files;
    for (const fs::path &file : ListFilesSorted(dir)) {
      auto info = ParseEnvironmentFileName(file.filename().string());
      if (!info) {
        loaded.warnings.push_back(
            absl::StrCat("skipping unexpected file ", file.string()));
        continue;
      }
      files.emplace_back(*info, file);
    }
    std::sort(files.begin(), files.end(), [](const auto &a, const auto &b) {
      return a.first.id < b.first.id;
    });
    for (const auto &[info, file] : files) {
      absl::StatusOr<EnvironmentSeed> env =
          ParseEnvironmentSeed(file, layout, corpora);
      if (!env.ok()) {
        LOG(WARNING) << "skipping environment: " << env.status();
        loaded.warnings.push_back(std::string(env.status().message()));
        continue;
      }
      if (info.source) {
        auto it = env_ids.find(*info.source);
        if (it != env_ids.end()) {
          env->lineage = Lineage{it->second, info.op};
        } else if (!crashes) {
          loaded.warnings.push_back(absl::StrCat(
              "skipping environment with missing parent: ", file.string()));
          continue;
        }
      } else if (info.op != Operator::kCapture) {
        loaded.warnings.push_back(absl::StrCat(
            "skipping environment without parent: ", file.string()));
        continue;
      }
      if (crashes) {
        corpora.AddCrash(std::move(*env), info.signal, info.coverage_hash);
      } else {
        if (!env->lineage) ++loaded.capture_environments;
        env_ids[info.id] = corpora.AddEnvironment(std::move(*env)).env_index;
      }
    }
  };
  load_dir(layout.environment_dir(), /*crashes=*/false);
  load_dir(layout.crash_dir(), /*crashes=*/true);

  if (absl::Status s = corpora.CheckReferentialClosure(); !s.ok()) return s;
  return loaded;
}

}  // namespace envsynth
