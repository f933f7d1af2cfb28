#include "adrev/data/pipeline.hpp"

#include <algorithm>

#include "adrev/error.hpp"
#include "adrev/log.hpp"

namespace adrev::data {

namespace {

void finish(PreparedData& out, const PipelineConfig& config) {
  if (config.category_mean) add_category_mean(out.normalized, config.exclude_self);
  assign_static_codes(out.normalized, out.vocab);
  out.schema = FeatureSchema::build(out.normalized.unknown_names, out.vocab.cardinalities());
  out.splits = chrono_split(make_windows(out.normalized, config.lookback, config.horizon), out.val_start,
                            out.test_start);
}

}  // namespace

std::pair<Date, Date> resolve_split_dates(const SeriesPanel& panel, const PipelineConfig& config) {
  if (config.val_start && config.test_start) return {*config.val_start, *config.test_start};
  if (panel.publishers.empty()) throw DataError("cannot derive split dates from an empty panel");
  Date first = panel.publishers.front().start;
  Date last = panel.publishers.front().end();
  for (const auto& p : panel.publishers) {
    first = std::min(first, p.start);
    last = std::max(last, p.end());
  }
  const auto span = (last - first).count();
  const Date val = config.val_start.value_or(first + std::chrono::days(span * 3 / 4));
  const Date test = config.test_start.value_or(first + std::chrono::days(span * 7 / 8));
  return {val, test};
}

PreparedData prepare(const SeriesPanel& panel, const PipelineConfig& config) {
  PreparedData out;
  const auto filtered = filter_publishers(panel, config.max_zero_run, config.min_avg_revenue);
  if (filtered.publishers.empty()) throw DataError("no publishers pass the revenue filter");
  std::tie(out.val_start, out.test_start) = resolve_split_dates(filtered, config);
  auto fit = fit_transform(filtered, out.val_start);
  if (fit.panel.series.empty()) throw DataError("no publishers left after scaling");
  out.normalized = std::move(fit.panel);
  out.scalers = std::move(fit.scalers);
  for (const auto& p : filtered.publishers)
    if (out.scalers.contains(p.id)) out.raw.publishers.push_back(p);
  out.vocab = Vocabulary::build(out.raw);
  finish(out, config);
  return out;
}

PreparedData prepare_with(const SeriesPanel& panel, const PipelineConfig& config, const ScalerMap& scalers,
                          const Vocabulary& vocab) {
  PreparedData out;
  const auto filtered = filter_publishers(panel, config.max_zero_run, config.min_avg_revenue);
  for (const auto& p : filtered.publishers) {
    const bool known = scalers.contains(p.id) &&
                       std::binary_search(vocab.publishers.begin(), vocab.publishers.end(), p.id) &&
                       std::binary_search(vocab.countries.begin(), vocab.countries.end(), p.country) &&
                       std::binary_search(vocab.categories.begin(), vocab.categories.end(), p.category);
    if (known) {
      out.raw.publishers.push_back(p);
    } else {
      warn("skipping publisher '" + p.id + "': not seen during training");
    }
  }
  if (out.raw.publishers.empty()) throw DataError("no publishers in common with the trained model");
  std::tie(out.val_start, out.test_start) = resolve_split_dates(out.raw, config);
  out.normalized = apply_transform(out.raw, scalers);
  out.scalers = scalers;
  out.vocab = vocab;
  finish(out, config);
  return out;
}

}  // namespace adrev::data
