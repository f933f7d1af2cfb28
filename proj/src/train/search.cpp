#include "adrev/train/search.hpp"

#include <limits>
#include <ostream>
#include <random>

#include "adrev/error.hpp"
#include "adrev/text.hpp"

namespace adrev::train {

namespace {

template <typename T>
T pick(const std::vector<T>& values, T fallback, Rng& rng) {
  if (values.empty()) return fallback;
  std::uniform_int_distribution<std::size_t> dist(0, values.size() - 1);
  return values[dist(rng)];
}

}  // namespace

SearchSpace SearchSpace::defaults(models::ModelKind kind) {
  SearchSpace s;
  switch (kind) {
    case models::ModelKind::kTft:
      s.hidden = {8, 16, 32, 64};
      s.dropout = {0.0, 0.1, 0.2, 0.3};
      s.heads = {1, 2, 4};
      break;
    case models::ModelKind::kSeq2Seq:
      s.hidden = {16, 32, 64};
      s.decoder_hidden = {16, 32, 64};
      s.dropout = {0.0, 0.1, 0.2, 0.3};
      s.decoder_dropout = {0.0, 0.1, 0.2, 0.3};
      s.layers = {1, 2};
      break;
    case models::ModelKind::kLstm:
    case models::ModelKind::kDeepAr:
      s.hidden = {16, 32, 64};
      s.layers = {1, 2};
      s.dropout = {0.0, 0.1, 0.2, 0.3};
      break;
    case models::ModelKind::kNBeats:
      s.nbeats_width = {64, 128, 256};
      s.nbeats_blocks = {2, 3, 4};
      break;
  }
  return s;
}

void SearchSpace::validate() const {
  if (budget == 0) throw ConfigError("search: budget must be at least 1");
  if (epochs == 0) throw ConfigError("search: epochs must be at least 1");
  if (learning_rate.empty()) throw ConfigError("search: learning_rate list is empty");
}

SearchResult hparam_search(const models::ModelConfig& base, const SearchSpace& space,
                           const data::WindowSet& train_windows, const data::WindowSet& val_windows,
                           const TrainConfig& train_config, std::uint64_t seed) {
  space.validate();
  Rng sampler(seed);
  SearchResult result;
  for (std::size_t i = 0; i < space.budget; ++i) {
    Trial trial;
    trial.index = i;
    std::seed_seq seq{seed, static_cast<std::uint64_t>(i), std::uint64_t{0x7472}};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    trial.seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];

    models::ModelConfig& m = trial.model;
    m = base;
    m.hidden = pick(space.hidden, base.hidden, sampler);
    m.decoder_hidden = pick(space.decoder_hidden, base.decoder_hidden, sampler);
    m.layers = pick(space.layers, base.layers, sampler);
    m.dropout = pick(space.dropout, base.dropout, sampler);
    m.decoder_dropout = pick(space.decoder_dropout, base.decoder_dropout, sampler);
    m.nbeats_width = pick(space.nbeats_width, base.nbeats_width, sampler);
    m.nbeats_blocks = pick(space.nbeats_blocks, base.nbeats_blocks, sampler);
    std::vector<std::size_t> heads;
    for (std::size_t h : space.heads)
      if (h > 0 && m.hidden % h == 0) heads.push_back(h);
    const std::size_t fallback_heads = m.hidden % base.heads == 0 ? base.heads : 1;
    m.heads = pick(heads, fallback_heads, sampler);
    trial.learning_rate = pick(space.learning_rate, train_config.learning_rate, sampler);
    m.seed = trial.seed;

    TrainConfig tc = train_config;
    tc.epochs = space.epochs;
    tc.learning_rate = trial.learning_rate;
    tc.seed = trial.seed;
    auto model = models::make_model(m);
    const TrainHistory history = train(*model, train_windows, val_windows, tc);
    trial.val_loss = history.best_val_loss;
    trial.best_epoch = history.best_epoch;
    result.trials.push_back(std::move(trial));
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Trial& t : result.trials) {
    if (t.val_loss < best) {
      best = t.val_loss;
      result.best = t.index;
    }
  }
  return result;
}

void write_trials_csv(std::ostream& out, const SearchResult& result) {
  out << "trial,seed,hidden,decoder_hidden,heads,layers,dropout,decoder_dropout,nbeats_width,nbeats_blocks,"
         "learning_rate,best_epoch,val_loss,selected\n";
  for (const Trial& t : result.trials) {
    const auto& m = t.model;
    out << t.index << ',' << t.seed << ',' << m.hidden << ',' << m.decoder_width() << ',' << m.heads << ','
        << m.layers << ',' << format_double(m.dropout) << ',' << format_double(m.decoder_dropout_rate()) << ','
        << m.nbeats_width << ',' << m.nbeats_blocks << ',' << format_double(t.learning_rate) << ','
        << t.best_epoch << ',' << format_double(t.val_loss) << ',' << (t.index == result.best ? 1 : 0) << '\n';
  }
}

}  // namespace adrev::train
