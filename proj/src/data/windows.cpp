#include "adrev/data/windows.hpp"

#include <set>
#include <sstream>

#include "adrev/error.hpp"
#include "adrev/log.hpp"

namespace adrev::data {

FeatureSchema FeatureSchema::build(const std::vector<std::string>& unknown_names,
                                   const std::array<int, 3>& static_cards) {
  FeatureSchema s;
  s.unknown = unknown_names;
  s.known = {{"day_of_week", 7}, {"day_of_year", 0}};
  s.statics = {{"publisher_id", static_cards[0]}, {"country", static_cards[1]}, {"category", static_cards[2]}};
  s.validate();
  return s;
}

std::vector<FeatureSpec> FeatureSchema::past_columns() const {
  std::vector<FeatureSpec> cols{{target, 0}};
  for (const auto& u : unknown) cols.push_back({u, 0});
  cols.insert(cols.end(), known.begin(), known.end());
  return cols;
}

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  auto claim = [&](const std::string& name) {
    if (!seen.insert(name).second) throw ConfigError("feature '" + name + "' appears in more than one role");
  };
  claim(target);
  for (const auto& u : unknown) claim(u);
  for (const auto& k : known) claim(k.name);
  for (const auto& s : statics) claim(s.name);
}

std::string FeatureSchema::fingerprint() const {
  std::ostringstream os;
  os << "target:" << target << ";unknown:";
  for (const auto& u : unknown) os << u << ',';
  os << ";known:";
  for (const auto& k : known) os << k.name << '/' << k.cardinality << ',';
  os << ";static:";
  for (const auto& s : statics) os << s.name << '/' << s.cardinality << ',';
  return os.str();
}

std::size_t window_count(std::size_t length, std::size_t lookback, std::size_t horizon) {
  return length >= lookback + horizon ? length - (lookback + horizon) + 1 : 0;
}

WindowSet make_windows(const NormalizedPanel& panel, std::size_t lookback, std::size_t horizon) {
  if (lookback < 1 || horizon < 1) throw ContractError("lookback and horizon must be at least 1");
  WindowSet set{lookback, horizon, {}};
  const std::size_t known = 2;
  for (std::size_t i = 0; i < panel.series.size(); ++i) {
    const auto& s = panel.series[i];
    const std::size_t width = 1 + s.unknown.size() + known;
    std::vector<CalendarRow> calendar(s.length());
    for (std::size_t t = 0; t < s.length(); ++t) calendar[t] = calendar_row(s.date_at(t));

    const std::size_t n = window_count(s.length(), lookback, horizon);
    for (std::size_t w = 0; w < n; ++w) {
      WindowSample sample;
      sample.series = i;
      sample.publisher = s.id;
      sample.anchor = s.date_at(w + lookback);
      sample.lookback = lookback;
      sample.statics = s.statics;
      sample.encoder.reserve(lookback * width);
      for (std::size_t t = w; t < w + lookback; ++t) {
        sample.encoder.push_back(s.target[t]);
        for (const auto& col : s.unknown) sample.encoder.push_back(col[t]);
        sample.encoder.push_back(calendar[t].day_of_week);
        sample.encoder.push_back(calendar[t].day_of_year);
      }
      for (std::size_t t = w + lookback; t < w + lookback + horizon; ++t) {
        sample.decoder.push_back(calendar[t].day_of_week);
        sample.decoder.push_back(calendar[t].day_of_year);
        sample.target.push_back(s.target[t]);
      }
      set.samples.push_back(std::move(sample));
    }
  }
  return set;
}

Splits chrono_split(const WindowSet& windows, Date val_start, Date test_start) {
  if (!(val_start < test_start)) {
    throw ContractError("val_start " + format_date(val_start) + " must precede test_start " +
                        format_date(test_start));
  }
  Splits out{{windows.lookback, windows.horizon, {}},
             {windows.lookback, windows.horizon, {}},
             {windows.lookback, windows.horizon, {}}};
  const auto span = std::chrono::days(static_cast<long>(windows.horizon) - 1);
  for (const auto& w : windows.samples) {
    const Date last = w.anchor + span;
    if (last < val_start) {
      out.train.samples.push_back(w);
    } else if (w.anchor >= val_start && last < test_start) {
      out.val.samples.push_back(w);
    } else if (w.anchor >= test_start) {
      out.test.samples.push_back(w);
    }
  }
  if (out.train.empty()) warn("training split is empty");
  if (out.val.empty()) warn("validation split is empty");
  if (out.test.empty()) warn("test split is empty");
  return out;
}

Batch collate(std::span<const WindowSample* const> samples) {
  if (samples.empty()) throw ContractError("cannot collate an empty batch");
  const auto& first = *samples.front();
  const std::size_t b = samples.size();
  const std::size_t k = first.lookback;
  const std::size_t tau = first.target.size();
  const std::size_t past = first.encoder.size() / k;
  const std::size_t known = first.decoder.size() / tau;

  Batch batch;
  batch.size = b;
  batch.lookback = k;
  batch.horizon = tau;
  batch.samples.assign(samples.begin(), samples.end());
  std::vector<double> enc(k * b * past), dec(tau * b * known), stat(b * 3), tgt(b * tau);
  for (std::size_t j = 0; j < b; ++j) {
    const auto& s = *samples[j];
    if (s.lookback != k || s.target.size() != tau || s.encoder.size() != k * past) {
      throw ShapeError("batch mixes windows of different layouts");
    }
    for (std::size_t t = 0; t < k; ++t)
      std::copy_n(s.encoder.begin() + static_cast<long>(t * past), past,
                  enc.begin() + static_cast<long>((t * b + j) * past));
    for (std::size_t t = 0; t < tau; ++t) {
      std::copy_n(s.decoder.begin() + static_cast<long>(t * known), known,
                  dec.begin() + static_cast<long>((t * b + j) * known));
      tgt[j * tau + t] = s.target[t];
    }
    for (std::size_t c = 0; c < 3; ++c) stat[j * 3 + c] = s.statics[c];
  }
  batch.encoder = Tensor::from({k * b, past}, std::move(enc));
  batch.decoder = Tensor::from({tau * b, known}, std::move(dec));
  batch.statics = Tensor::from({b, 3}, std::move(stat));
  batch.target = Tensor::from({b, tau}, std::move(tgt));
  return batch;
}

Batch collate(const WindowSet& set, std::size_t begin, std::size_t count) {
  if (begin + count > set.size()) throw ContractError("batch range exceeds window set");
  std::vector<const WindowSample*> ptrs;
  for (std::size_t i = begin; i < begin + count; ++i) ptrs.push_back(&set.samples[i]);
  return collate(ptrs);
}

}  // namespace adrev::data
