#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adrev/app/settings.hpp"

namespace adrev::app {

/// Creates `base`, or `base-1`, `base-2`, ... when it already exists.
std::filesystem::path create_run_dir(const std::filesystem::path& base);

/// Provenance record written as manifest.json in every run directory.
class RunManifest {
 public:
  RunManifest(std::string command, const Settings& settings);

  void add_input(const std::filesystem::path& path);
  void add_output(const std::string& name);
  const std::vector<std::string>& outputs() const { return outputs_; }

  /// Stamps the finish time and writes manifest.json into `dir`.
  void write(const std::filesystem::path& dir);

 private:
  std::string command_;
  std::string config_;
  std::string seed_;
  std::string started_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, sha256
  std::vector<std::string> outputs_;
};

/// Version string recorded at configure time.
std::string build_version();

}  // namespace adrev::app
