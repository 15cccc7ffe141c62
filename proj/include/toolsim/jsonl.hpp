#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace toolsim {

using json = nlohmann::json;

inline constexpr const char* kArtifactVersion = "1";

struct JsonlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// First line of every corpus file: {"header":{"artifact_version",...,extra}}.
json make_header(const std::string& artifact, uint64_t seed, const json& config);

// Writes header + one compact JSON object per line, atomically (tmp + rename).
void write_jsonl(const std::string& path, const json& header, const std::vector<json>& rows);

// Rows only; a leading header line is validated and skipped.
std::vector<json> read_jsonl(const std::string& path);

// Header line, if present.
std::optional<json> read_jsonl_header(const std::string& path);

uint64_t file_fingerprint(const std::string& path);

}  // namespace toolsim
