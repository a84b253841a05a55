#include "relatron/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "relatron/error.hpp"
#include "relatron/version.hpp"

namespace relatron {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::MissingFile, "cannot open for writing: " + tmp);
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(ErrorCode::ParseError, "short write: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::MissingFile, "cannot rename into place: " + path);
  }
}

void write_json(const std::string& path, const ordered_json& doc) {
  atomic_write_file(path, doc.dump(2) + "\n");
}

json load_json(const std::string& path) {
  const std::string text = read_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::ParseError, "invalid JSON: " + path);
  }
  return doc;
}

std::string file_digest(const std::string& path) {
  const std::string data = read_file(path);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

void check_format_version(const json& doc, const std::string& what) {
  if (!doc.contains("format_version")) return;  // tolerated for hand-made files
  const int v = doc.at("format_version").get<int>();
  if (v != kFormatVersion) {
    throw Error(ErrorCode::FormatVersionMismatch,
                what + " has format_version " + std::to_string(v) +
                    ", tool expects " + std::to_string(kFormatVersion));
  }
}

}  // namespace relatron
