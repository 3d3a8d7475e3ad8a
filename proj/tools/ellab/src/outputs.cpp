#include "ellab/cli/outputs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "ellab/error.hpp"

namespace ellab::cli {

namespace fs = std::filesystem;

Outputs::Outputs(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    throw IoError(fmt::format("cannot create output directory {}: {}", dir_.string(),
                              ec ? ec.message() : "not a directory"));
}

void Outputs::write_text(const std::string& name, const std::string& content) {
  const fs::path p = path(name);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", p.parent_path().string(), ec.message()));
  }
  write_file(p, content);
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void Outputs::write_json(const std::string& name, const nlohmann::json& j) { write_text(name, j.dump(2) + "\n"); }

void Outputs::write_manifest() {
  std::vector<std::string> names = files_;
  std::sort(names.begin(), names.end());
  nlohmann::json list = nlohmann::json::array();
  for (const auto& n : names) {
    const fs::path p = path(n);
    list.push_back({{"path", n}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
  }
  write_file(path("manifest.json"), nlohmann::json{{"files", list}}.dump(2) + "\n");
}

std::string sha256_file(const fs::path& p) {
  const std::string data = read_file(p);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError(fmt::format("hashing {} failed", p.string()));
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", p.string()));
  out << content;
  out.flush();
  if (!out) throw IoError(fmt::format("writing {} failed", p.string()));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ellab::cli
