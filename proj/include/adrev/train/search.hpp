#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "adrev/data/windows.hpp"
#include "adrev/models/model.hpp"
#include "adrev/train/trainer.hpp"

namespace adrev::train {

/// Candidate values per hyperparameter. An empty list keeps the base value.
struct SearchSpace {
  std::vector<std::size_t> hidden;
  std::vector<std::size_t> decoder_hidden;
  std::vector<std::size_t> heads;
  std::vector<std::size_t> layers;
  std::vector<double> dropout;
  std::vector<double> decoder_dropout;
  std::vector<std::size_t> nbeats_width;
  std::vector<std::size_t> nbeats_blocks;
  std::vector<double> learning_rate = {1e-3, 1e-4};
  std::size_t budget = 20;
  std::size_t epochs = 5;

  /// The tuned ranges for each model family.
  static SearchSpace defaults(models::ModelKind kind);
  /// Throws ConfigError on a zero budget, zero epochs or an empty learning-rate list.
  void validate() const;
};

struct Trial {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  models::ModelConfig model;
  double learning_rate = 0.0;
  double val_loss = 0.0;
  std::size_t best_epoch = 0;
};

struct SearchResult {
  std::vector<Trial> trials;  // in sampling order
  std::size_t best = 0;       // index of the lowest validation loss

  const Trial& best_trial() const { return trials[best]; }
};

/// Seeded uniform random search. Every trial trains a fresh model for
/// `space.epochs` epochs and is ranked by its best validation loss. Head
/// counts are drawn among the listed values that divide the hidden width.
SearchResult hparam_search(const models::ModelConfig& base, const SearchSpace& space,
                           const data::WindowSet& train_windows, const data::WindowSet& val_windows,
                           const TrainConfig& train_config, std::uint64_t seed);

void write_trials_csv(std::ostream& out, const SearchResult& result);

}  // namespace adrev::train
