#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "adrev/data/pipeline.hpp"
#include "adrev/models/model.hpp"

namespace adrev::models {

/// A trained model plus everything needed to score new data with it.
struct Checkpoint {
  std::unique_ptr<ForecastModel> model;
  data::ScalerMap scalers;
  data::Vocabulary vocab;
  data::PipelineConfig pipeline;
  std::string schema_hash;
};

std::string schema_hash(const data::FeatureSchema& schema);

/// JSON container; parameters are written with round-trip precision.
void save_checkpoint(const std::filesystem::path& path, const ForecastModel& model, const data::ScalerMap& scalers,
                     const data::Vocabulary& vocab, const data::PipelineConfig& pipeline);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws ConfigError when `schema` differs from the one the model was built for.
void verify_schema(const Checkpoint& checkpoint, const data::FeatureSchema& schema);

}  // namespace adrev::models
