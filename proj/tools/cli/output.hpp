#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"

namespace sse::cli {

/// Owns the output directory of one run: the manifest and every data file.
class RunOutput {
 public:
  /// Creates the directory and writes the manifest with status "running".
  RunOutput(std::filesystem::path dir, const RunConfig& config);

  const std::string& hash() const { return hash_; }
  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Opens `name` and writes the `# sse_lab ...` provenance line; `fill`
  /// writes the body. Throws IoError on any stream failure.
  void write_csv(const std::string& name, const std::function<void(std::ostream&)>& fill);

  /// Writes a JSON data file that carries the config hash.
  void write_json(const std::string& name, nlohmann::json body);

  /// Writes a file verbatim (used for SVG, which embeds the hash itself).
  void write_text(const std::string& name, const std::string& text);

  void warn(std::string message);

  /// Rewrites the manifest with status "complete", outputs and warnings.
  void finish(const nlohmann::json& results);

 private:
  void write_manifest(const std::string& status, const nlohmann::json& results);
  std::ofstream open(const std::string& name);
  static void close(std::ofstream& f, const std::filesystem::path& path);

  std::filesystem::path dir_;
  RunConfig config_;
  std::string hash_;
  std::string started_;
  std::vector<std::string> files_;
  std::vector<std::string> warnings_;
};

/// Reads the `config` section of a manifest (or a bare config object).
RunConfig load_config(const std::filesystem::path& path);

std::string provenance_line(const std::string& hash, Command c);

}  // namespace sse::cli
