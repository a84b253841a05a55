#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace relatron {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path);

// Writes via a sibling temp file followed by rename, so readers never observe
// a half-written output.
void atomic_write_file(const std::string& path, const std::string& contents);

void write_json(const std::string& path, const ordered_json& doc);

json load_json(const std::string& path);

// FNV-1a 64-bit content digest, hex-encoded; used in run manifests.
std::string file_digest(const std::string& path);

// Loaders call this on documents that carry a format_version field; unknown
// major versions are rejected.
void check_format_version(const json& doc, const std::string& what);

}  // namespace relatron
