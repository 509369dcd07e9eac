#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace ccge::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// manifest.json of one run: inputs and outputs with content hashes, the
/// effective configuration and whether every stage finished.
class Manifest {
 public:
  explicit Manifest(std::string command);

  void add_input(const std::filesystem::path& file);
  void add_output(const std::filesystem::path& file);
  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Writes `dir`/manifest.json. Output paths are stored relative to `dir`.
  void write(const std::filesystem::path& dir, bool complete, const std::string& failed_stage = {},
             const std::string& error = {}) const;

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
  std::vector<std::string> warnings_;
};

}  // namespace ccge::cli
