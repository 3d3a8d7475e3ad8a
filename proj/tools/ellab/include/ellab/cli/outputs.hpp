#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ellab::cli {

// Output directory that remembers every file written through it, so the
// manifest can list them.
class Outputs {
 public:
  // Creates the directory; raises IoError when that is impossible.
  explicit Outputs(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& j);
  // Writes manifest.json covering every file recorded so far.
  void write_manifest();

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& p);

void write_file(const std::filesystem::path& p, const std::string& content);
std::string read_file(const std::filesystem::path& p);

}  // namespace ellab::cli
