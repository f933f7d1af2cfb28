#include "adrev/app/settings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "adrev/data/date.hpp"
#include "adrev/error.hpp"
#include "adrev/text.hpp"

namespace adrev::app {

namespace {

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<KeySpec> build_table() {
  const synth::GeneratorSpec g;
  const data::PipelineConfig p;
  const models::ModelConfig m;
  const train::TrainConfig t;
  const train::SearchSpace space;
  return {
      {"seed", kCommon, "42", "master seed for generation, initialisation, shuffling and sampling"},
      {"data", kInputs, "", "input CSV"},
      {"checkpoint", kInputs, "", "checkpoint written by train"},
      {"space", kSearch, "", "search-space file"},

      {"publishers", kGenerator, num(g.publishers), "number of publishers"},
      {"categories", kGenerator, num(g.categories), "number of content categories"},
      {"days", kGenerator, num(g.days), "days per publisher"},
      {"start_date", kGenerator, g.start_date, "first date"},
      {"traffic_base", kGenerator, num(g.traffic_base), "mean log impressions"},
      {"traffic_base_spread", kGenerator, num(g.traffic_base_spread), "half-width of per-publisher base draw"},
      {"weekly_amplitude", kGenerator, num(g.weekly_amplitude), "weekly log-traffic amplitude"},
      {"annual_amplitude", kGenerator, num(g.annual_amplitude), "annual log-traffic amplitude"},
      {"category_strength", kGenerator, num(g.category_strength), "loading on the shared category factor"},
      {"category_phi", kGenerator, num(g.category_phi), "AR coefficient of the category factor"},
      {"category_std", kGenerator, num(g.category_std), "innovation std of the category factor"},
      {"ar_phi", kGenerator, num(g.ar_phi), "AR(1) coefficient of traffic noise"},
      {"noise_std", kGenerator, num(g.noise_std), "innovation std of traffic noise"},
      {"ctr_base", kGenerator, num(g.ctr_base), "mean click-through rate"},
      {"ctr_std", kGenerator, num(g.ctr_std), "CTR logit innovation std"},
      {"cpc_base", kGenerator, num(g.cpc_base), "mean cost per click"},
      {"cpc_std", kGenerator, num(g.cpc_std), "CPC log innovation std"},
      {"slow_phi", kGenerator, num(g.slow_phi), "mean reversion of CTR and CPC"},
      {"zero_dropout", kGenerator, num(g.zero_dropout), "probability of a zero-traffic day"},
      {"distractor", kGenerator, g.distractor, "covariate replaced by pure noise (empty for none)"},

      {"lookback", kPipeline, num(p.lookback), "encoder length k"},
      {"horizon", kPipeline, num(p.horizon), "forecast horizon tau"},
      {"val_start", kPipeline, "", "first validation date (default 75% of the span)"},
      {"test_start", kPipeline, "", "first test date (default 87.5% of the span)"},
      {"min_avg_revenue", kPipeline, num(p.min_avg_revenue), "publishers must average strictly more"},
      {"max_zero_run", kPipeline, num(p.max_zero_run), "longest tolerated run of zero revenue"},
      {"category_mean", kPipeline, p.category_mean ? "true" : "false", "add the category mean revenue covariate"},
      {"exclude_self", kPipeline, p.exclude_self ? "true" : "false", "category mean over the other publishers"},

      {"model", kModel, std::string(models::to_string(m.kind)), "tft, lstm, seq2seq, deepar or nbeats"},
      {"hidden", kModel, num(m.hidden), "hidden width"},
      {"decoder_hidden", kModel, num(m.decoder_hidden), "seq2seq decoder width (0 = hidden)"},
      {"heads", kModel, num(m.heads), "attention heads"},
      {"dropout", kModel, num(m.dropout), "dropout rate"},
      {"decoder_dropout", kModel, num(m.decoder_dropout), "seq2seq decoder dropout (negative = dropout)"},
      {"layers", kModel, num(m.layers), "LSTM layers"},
      {"quantiles", kModel, join(m.quantiles), "TFT quantiles"},
      {"static_embedding", kModel, num(m.static_embedding), "categorical embedding width"},
      {"nbeats_blocks", kModel, num(m.nbeats_blocks), "N-Beats blocks"},
      {"nbeats_width", kModel, num(m.nbeats_width), "N-Beats layer width"},
      {"nbeats_layers", kModel, num(m.nbeats_layers), "fully connected layers per block"},
      {"samples", kModel, num(m.samples), "DeepAR sample paths"},

      {"batch", kTraining, num(t.batch), "mini-batch size"},
      {"epochs", kTraining, num(t.epochs), "training epochs"},
      {"learning_rate", kTraining, num(t.learning_rate), "Adam learning rate"},
      {"clip_norm", kTraining, num(t.clip_norm), "gradient norm clip (0 disables)"},
      {"patience", kTraining, num(t.patience), "early-stop patience (0 disables)"},

      {"budget", kSearch, num(space.budget), "number of trials"},
      {"trial_epochs", kSearch, num(space.epochs), "epochs per trial"},
      {"learning_rate_choices", kSearch, join(space.learning_rate), "candidate learning rates"},
      {"hidden_choices", kSearch, "", "candidate hidden widths (empty = model default range)"},
      {"decoder_hidden_choices", kSearch, "", "candidate seq2seq decoder widths"},
      {"heads_choices", kSearch, "", "candidate head counts"},
      {"layers_choices", kSearch, "", "candidate layer counts"},
      {"dropout_choices", kSearch, "", "candidate dropout rates"},
      {"decoder_dropout_choices", kSearch, "", "candidate seq2seq decoder dropout rates"},
      {"nbeats_width_choices", kSearch, "", "candidate N-Beats widths"},
      {"nbeats_blocks_choices", kSearch, "", "candidate N-Beats block counts"},
  };
}

const KeySpec* find_key(std::string_view key) {
  const auto& table = key_table();
  const auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.name == key; });
  return it == table.end() ? nullptr : &*it;
}

ConfigError bad_value(const std::string& key, const std::string& value, const char* expected) {
  return ConfigError("key '" + key + "': expected " + expected + ", got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw bad_value(key, v, "a number");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw bad_value(key, v, "a non-negative integer");
  return out;
}

std::optional<data::Date> optional_date(const Settings& s, const std::string& key) {
  const std::string& v = s.text(key);
  if (v.empty()) return std::nullopt;
  try {
    return data::parse_date(v);
  } catch (const DataError&) {
    throw bad_value(key, v, "a YYYY-MM-DD date");
  }
}

}  // namespace

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = build_table();
  return table;
}

Settings::Settings(unsigned groups) : groups_(groups) {
  for (const auto& k : key_table())
    if (groups_ & k.group) values_[k.name] = k.fallback;
}

bool Settings::accepts(std::string_view key) const {
  const KeySpec* k = find_key(key);
  return k && (groups_ & k->group);
}

void Settings::set(const std::string& key, const std::string& value) {
  if (!accepts(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

void Settings::load_text(std::string_view text, const std::string& origin) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!accepts(key)) throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    values_[key] = trim(std::string_view(line).substr(eq + 1));
  }
}

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  load_text(buffer.str(), path.string());
}

const std::string& Settings::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("key '" + key + "' is not available for this command");
  return it->second;
}

std::size_t Settings::size(const std::string& key) const {
  return static_cast<std::size_t>(parse_unsigned(key, text(key)));
}

double Settings::real(const std::string& key) const { return parse_real(key, text(key)); }

std::uint64_t Settings::u64(const std::string& key) const { return parse_unsigned(key, text(key)); }

bool Settings::flag(const std::string& key) const {
  const std::string& v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw bad_value(key, v, "true or false");
}

std::vector<double> Settings::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(text(key))) out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::size_t> Settings::sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text(key))) out.push_back(static_cast<std::size_t>(parse_unsigned(key, item)));
  return out;
}

std::string Settings::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

synth::GeneratorSpec generator_spec(const Settings& s) {
  synth::GeneratorSpec g;
  g.publishers = s.size("publishers");
  g.categories = s.size("categories");
  g.days = s.size("days");
  g.start_date = s.text("start_date");
  g.traffic_base = s.real("traffic_base");
  g.traffic_base_spread = s.real("traffic_base_spread");
  g.weekly_amplitude = s.real("weekly_amplitude");
  g.annual_amplitude = s.real("annual_amplitude");
  g.category_strength = s.real("category_strength");
  g.category_phi = s.real("category_phi");
  g.category_std = s.real("category_std");
  g.ar_phi = s.real("ar_phi");
  g.noise_std = s.real("noise_std");
  g.ctr_base = s.real("ctr_base");
  g.ctr_std = s.real("ctr_std");
  g.cpc_base = s.real("cpc_base");
  g.cpc_std = s.real("cpc_std");
  g.slow_phi = s.real("slow_phi");
  g.zero_dropout = s.real("zero_dropout");
  g.distractor = s.text("distractor");
  g.seed = s.u64("seed");
  return g;
}

data::PipelineConfig pipeline_config(const Settings& s) {
  data::PipelineConfig p;
  p.lookback = s.size("lookback");
  p.horizon = s.size("horizon");
  p.val_start = optional_date(s, "val_start");
  p.test_start = optional_date(s, "test_start");
  p.min_avg_revenue = s.real("min_avg_revenue");
  p.max_zero_run = s.size("max_zero_run");
  p.category_mean = s.flag("category_mean");
  p.exclude_self = s.flag("exclude_self");
  return p;
}

models::ModelConfig model_config(const Settings& s, const data::FeatureSchema& schema) {
  models::ModelConfig m;
  m.kind = models::parse_model_kind(s.text("model"));
  m.hidden = s.size("hidden");
  m.decoder_hidden = s.size("decoder_hidden");
  m.heads = s.size("heads");
  m.dropout = s.real("dropout");
  m.decoder_dropout = s.real("decoder_dropout");
  m.layers = s.size("layers");
  m.horizon = s.size("horizon");
  m.lookback = s.size("lookback");
  m.quantiles = s.reals("quantiles");
  m.static_embedding = s.size("static_embedding");
  m.nbeats_blocks = s.size("nbeats_blocks");
  m.nbeats_width = s.size("nbeats_width");
  m.nbeats_layers = s.size("nbeats_layers");
  m.samples = s.size("samples");
  m.seed = s.u64("seed");
  m.schema = schema;
  m.validate();
  return m;
}

train::TrainConfig train_config(const Settings& s) {
  train::TrainConfig t;
  t.batch = s.size("batch");
  t.epochs = s.size("epochs");
  t.learning_rate = s.real("learning_rate");
  t.clip_norm = s.real("clip_norm");
  t.patience = s.size("patience");
  t.seed = s.u64("seed");
  return t;
}

train::SearchSpace search_space(const Settings& s, models::ModelKind kind) {
  train::SearchSpace space = train::SearchSpace::defaults(kind);
  auto override_sizes = [&](const std::string& key, std::vector<std::size_t>& field) {
    if (!s.text(key).empty()) field = s.sizes(key);
  };
  auto override_reals = [&](const std::string& key, std::vector<double>& field) {
    if (!s.text(key).empty()) field = s.reals(key);
  };
  override_sizes("hidden_choices", space.hidden);
  override_sizes("decoder_hidden_choices", space.decoder_hidden);
  override_sizes("heads_choices", space.heads);
  override_sizes("layers_choices", space.layers);
  override_reals("dropout_choices", space.dropout);
  override_reals("decoder_dropout_choices", space.decoder_dropout);
  override_sizes("nbeats_width_choices", space.nbeats_width);
  override_sizes("nbeats_blocks_choices", space.nbeats_blocks);
  space.learning_rate = s.reals("learning_rate_choices");
  space.budget = s.size("budget");
  space.epochs = s.size("trial_epochs");
  space.validate();
  return space;
}

void apply_trial(Settings& s, const train::Trial& trial) {
  const auto& m = trial.model;
  s.set("hidden", num(m.hidden));
  s.set("decoder_hidden", num(m.decoder_hidden));
  s.set("heads", num(m.heads));
  s.set("layers", num(m.layers));
  s.set("dropout", num(m.dropout));
  s.set("decoder_dropout", num(m.decoder_dropout));
  s.set("nbeats_width", num(m.nbeats_width));
  s.set("nbeats_blocks", num(m.nbeats_blocks));
  s.set("learning_rate", num(trial.learning_rate));
}

}  // namespace adrev::app
