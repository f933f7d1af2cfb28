#include "adrev/app/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "adrev/error.hpp"
#include "adrev/hash.hpp"

#ifndef ADREV_GIT_DESCRIBE
#define ADREV_GIT_DESCRIBE "unknown"
#endif

namespace adrev::app {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::filesystem::path create_run_dir(const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  fs::path candidate = base;
  for (int i = 1;; ++i) {
    std::error_code ec;
    if (fs::create_directory(candidate, ec)) return candidate;
    if (ec) throw IoError("cannot create run directory " + candidate.string() + ": " + ec.message());
    candidate = base;
    candidate += "-" + std::to_string(i);
  }
}

RunManifest::RunManifest(std::string command, const Settings& settings)
    : command_(std::move(command)), config_(settings.to_text()), started_(utc_now()) {
  if (const auto it = settings.values().find("seed"); it != settings.values().end()) seed_ = it->second;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.emplace_back(path.string(), sha256_file(path));
}

void RunManifest::add_output(const std::string& name) { outputs_.push_back(name); }

void RunManifest::write(const std::filesystem::path& dir) {
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["config"] = config_;
  j["seed"] = seed_;
  j["version"] = build_version();
  j["started"] = started_;
  j["finished"] = utc_now();
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : inputs_) j["inputs"].push_back({{"path", path}, {"sha256", hash}});
  j["outputs"] = outputs_;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << '\n';
}

std::string build_version() { return ADREV_GIT_DESCRIBE; }

}  // namespace adrev::app
