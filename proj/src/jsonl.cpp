#include "toolsim/jsonl.hpp"

#include <cstdio>
#include <fstream>

#include "toolsim/rng.hpp"

namespace toolsim {

json make_header(const std::string& artifact, uint64_t seed, const json& config) {
  json cfg = config.is_null() ? json::object() : config;
  uint64_t config_hash = fnv1a64(cfg.dump());
  return json{{"header",
               {{"artifact", artifact},
                {"artifact_version", kArtifactVersion},
                {"seed", seed},
                {"config", cfg},
                {"config_hash", config_hash}}}};
}

void write_jsonl(const std::string& path, const json& header, const std::vector<json>& rows) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw JsonlError("cannot open for writing: " + tmp);
    if (!header.is_null()) out << header.dump() << "\n";
    for (const auto& row : rows) out << row.dump() << "\n";
    if (!out) throw JsonlError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw JsonlError("rename failed: " + path);
  }
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonlError("cannot open: " + path);
  std::vector<json> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw JsonlError(path + ": bad json line: " + e.what());
    }
    if (first && j.is_object() && j.contains("header")) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(j));
  }
  return rows;
}

std::optional<json> read_jsonl_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonlError("cannot open: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.is_object() && j.contains("header")) return j;
    return std::nullopt;
  }
  return std::nullopt;
}

uint64_t file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonlError("cannot open: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(content);
}

}  // namespace toolsim
