#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlab/errors.hpp"
#include "revlab/version.hpp"

namespace revlab {

using Json = nlohmann::json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

// Write via a temp file + rename so partially written outputs never appear
// under the final name.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

// First line of every file this tool writes. config_hash covers the
// effective configuration; extras carry stage-specific provenance
// (seed, encoding, prompt version, ...). No timestamps: reruns with the
// same inputs must be byte-identical.
struct ProvenanceHeader {
  std::string schema;
  int version = 1;
  std::string tool_version = kToolVersion;
  std::string generator;
  std::string config_hash;
  Json extras = Json::object();

  Json to_json() const {
    Json j{{"record", "header"},
           {"schema", schema},
           {"version", version},
           {"tool_version", tool_version},
           {"generator", generator},
           {"config_hash", config_hash}};
    for (auto it = extras.begin(); it != extras.end(); ++it) j[it.key()] = it.value();
    return j;
  }

  static std::optional<ProvenanceHeader> from_json(const Json& j) {
    if (!j.is_object() || j.value("record", "") != "header") return std::nullopt;
    ProvenanceHeader h;
    h.schema = j.value("schema", "");
    h.version = j.value("version", 0);
    h.tool_version = j.value("tool_version", "");
    h.generator = j.value("generator", "");
    h.config_hash = j.value("config_hash", "");
    h.extras = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      if (k != "record" && k != "schema" && k != "version" && k != "tool_version" &&
          k != "generator" && k != "config_hash")
        h.extras[k] = it.value();
    }
    return h;
  }
};

struct JsonlFile {
  std::optional<ProvenanceHeader> header;
  std::vector<Json> records;
  std::vector<int> line_numbers;  // 1-based source line of each record
};

inline std::string render_jsonl(const ProvenanceHeader& header, const std::vector<Json>& records) {
  std::string out = header.to_json().dump();
  out += '\n';
  for (const Json& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

inline void write_jsonl(const std::filesystem::path& path, const ProvenanceHeader& header,
                        const std::vector<Json>& records) {
  atomic_write_file(path, render_jsonl(header, records));
}

// Reads a JSONL file. A leading header record is split out when present so
// callers can also accept headerless externally produced files.
inline JsonlFile read_jsonl(const std::filesystem::path& path) {
  std::string content = read_file(path);
  JsonlFile file;
  int line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed JSON line");
    if (line_no == 1) {
      if (auto h = ProvenanceHeader::from_json(j)) {
        file.header = *h;
        continue;
      }
    }
    file.records.push_back(std::move(j));
    file.line_numbers.push_back(line_no);
  }
  return file;
}

inline void require_field(const Json& j, const char* field, const std::string& where) {
  if (!j.contains(field)) throw DataError(where + ": missing field '" + field + "'");
}

}  // namespace revlab
