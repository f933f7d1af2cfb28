#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adrev/data/pipeline.hpp"
#include "adrev/models/model.hpp"
#include "adrev/synth/generator.hpp"
#include "adrev/train/search.hpp"
#include "adrev/train/trainer.hpp"

namespace adrev::app {

enum KeyGroup : unsigned {
  kCommon = 1u << 0,
  kGenerator = 1u << 1,
  kPipeline = 1u << 2,
  kModel = 1u << 3,
  kTraining = 1u << 4,
  kSearch = 1u << 5,
  kInputs = 1u << 6,
};

struct KeySpec {
  std::string name;
  KeyGroup group;
  std::string fallback;  // default value as text
  std::string help;
};

/// Every recognised key with its default.
const std::vector<KeySpec>& key_table();

/// Flat key=value settings restricted to a set of key groups.
class Settings {
 public:
  explicit Settings(unsigned groups);

  /// Lines of `key = value`; `#` starts a comment. Unknown keys are errors.
  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text, const std::string& origin = "<text>");
  void set(const std::string& key, const std::string& value);

  bool accepts(std::string_view key) const;
  const std::string& text(const std::string& key) const;
  std::size_t size(const std::string& key) const;
  double real(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::size_t> sizes(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Sorted `key = value` lines, loadable again with load_file.
  std::string to_text() const;

 private:
  unsigned groups_;
  std::map<std::string, std::string> values_;
};

synth::GeneratorSpec generator_spec(const Settings& s);
data::PipelineConfig pipeline_config(const Settings& s);
models::ModelConfig model_config(const Settings& s, const data::FeatureSchema& schema);
train::TrainConfig train_config(const Settings& s);
train::SearchSpace search_space(const Settings& s, models::ModelKind kind);

/// Writes the tunable fields of a trial back into model and training keys.
void apply_trial(Settings& s, const train::Trial& trial);

}  // namespace adrev::app
