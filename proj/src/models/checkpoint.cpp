#include "adrev/models/checkpoint.hpp"

#include <fstream>
#include <json.hpp>

#include "adrev/error.hpp"
#include "adrev/hash.hpp"

namespace adrev::models {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json specs_to_json(const std::vector<data::FeatureSpec>& specs) {
  json out = json::array();
  for (const auto& s : specs) out.push_back({{"name", s.name}, {"cardinality", s.cardinality}});
  return out;
}

std::vector<data::FeatureSpec> specs_from_json(const json& j) {
  std::vector<data::FeatureSpec> out;
  for (const auto& s : j) out.push_back({s.at("name").get<std::string>(), s.at("cardinality").get<int>()});
  return out;
}

json config_to_json(const ModelConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"hidden", c.hidden},
          {"decoder_hidden", c.decoder_hidden},
          {"heads", c.heads},
          {"dropout", c.dropout},
          {"decoder_dropout", c.decoder_dropout},
          {"layers", c.layers},
          {"horizon", c.horizon},
          {"lookback", c.lookback},
          {"quantiles", c.quantiles},
          {"static_embedding", c.static_embedding},
          {"nbeats_blocks", c.nbeats_blocks},
          {"nbeats_width", c.nbeats_width},
          {"nbeats_layers", c.nbeats_layers},
          {"samples", c.samples},
          {"seed", c.seed},
          {"schema",
           {{"target", c.schema.target},
            {"unknown", c.schema.unknown},
            {"known", specs_to_json(c.schema.known)},
            {"statics", specs_to_json(c.schema.statics)}}}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.kind = parse_model_kind(j.at("kind").get<std::string>());
  j.at("hidden").get_to(c.hidden);
  j.at("decoder_hidden").get_to(c.decoder_hidden);
  j.at("heads").get_to(c.heads);
  j.at("dropout").get_to(c.dropout);
  j.at("decoder_dropout").get_to(c.decoder_dropout);
  j.at("layers").get_to(c.layers);
  j.at("horizon").get_to(c.horizon);
  j.at("lookback").get_to(c.lookback);
  j.at("quantiles").get_to(c.quantiles);
  j.at("static_embedding").get_to(c.static_embedding);
  j.at("nbeats_blocks").get_to(c.nbeats_blocks);
  j.at("nbeats_width").get_to(c.nbeats_width);
  j.at("nbeats_layers").get_to(c.nbeats_layers);
  j.at("samples").get_to(c.samples);
  j.at("seed").get_to(c.seed);
  const auto& s = j.at("schema");
  s.at("target").get_to(c.schema.target);
  s.at("unknown").get_to(c.schema.unknown);
  c.schema.known = specs_from_json(s.at("known"));
  c.schema.statics = specs_from_json(s.at("statics"));
  return c;
}

json pipeline_to_json(const data::PipelineConfig& p) {
  json j = {{"lookback", p.lookback},
            {"horizon", p.horizon},
            {"min_avg_revenue", p.min_avg_revenue},
            {"max_zero_run", p.max_zero_run},
            {"category_mean", p.category_mean},
            {"exclude_self", p.exclude_self}};
  if (p.val_start) j["val_start"] = data::format_date(*p.val_start);
  if (p.test_start) j["test_start"] = data::format_date(*p.test_start);
  return j;
}

data::PipelineConfig pipeline_from_json(const json& j) {
  data::PipelineConfig p;
  j.at("lookback").get_to(p.lookback);
  j.at("horizon").get_to(p.horizon);
  j.at("min_avg_revenue").get_to(p.min_avg_revenue);
  j.at("max_zero_run").get_to(p.max_zero_run);
  j.at("category_mean").get_to(p.category_mean);
  j.at("exclude_self").get_to(p.exclude_self);
  if (j.contains("val_start")) p.val_start = data::parse_date(j["val_start"].get<std::string>());
  if (j.contains("test_start")) p.test_start = data::parse_date(j["test_start"].get<std::string>());
  return p;
}

json scalers_to_json(const data::ScalerMap& scalers) {
  json out = json::object();
  for (const auto& [id, s] : scalers.by_publisher) {
    json cov = json::array();
    for (const auto& c : s.covariates) cov.push_back({c.mean, c.std});
    out[id] = {{"target", {s.target.mean, s.target.std}}, {"covariates", cov}};
  }
  return out;
}

data::ScalerMap scalers_from_json(const json& j) {
  data::ScalerMap out;
  for (const auto& [id, s] : j.items()) {
    data::PublisherScaler ps;
    ps.target = {s.at("target").at(0).get<double>(), s.at("target").at(1).get<double>()};
    const auto& cov = s.at("covariates");
    if (cov.size() != data::kCovariateCount) throw ConfigError("checkpoint: scaler for '" + id + "' is malformed");
    for (std::size_t c = 0; c < data::kCovariateCount; ++c) {
      ps.covariates[c] = {cov.at(c).at(0).get<double>(), cov.at(c).at(1).get<double>()};
    }
    out.by_publisher.emplace(id, ps);
  }
  return out;
}

}  // namespace

std::string schema_hash(const data::FeatureSchema& schema) { return sha256_hex(schema.fingerprint()); }

void save_checkpoint(const std::filesystem::path& path, const ForecastModel& model, const data::ScalerMap& scalers,
                     const data::Vocabulary& vocab, const data::PipelineConfig& pipeline) {
  json params = json::array();
  for (const auto& e : model.parameters().entries()) {
    const auto v = e.tensor.data();
    params.push_back({{"name", e.name}, {"shape", e.tensor.shape()}, {"values", std::vector<double>(v.begin(), v.end())}});
  }
  const json doc = {{"format", "adrev-checkpoint"},
                    {"version", kFormatVersion},
                    {"config", config_to_json(model.config())},
                    {"schema_hash", schema_hash(model.config().schema)},
                    {"pipeline", pipeline_to_json(pipeline)},
                    {"vocabulary",
                     {{"publishers", vocab.publishers}, {"countries", vocab.countries}, {"categories", vocab.categories}}},
                    {"scalers", scalers_to_json(scalers)},
                    {"parameters", params}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out << doc.dump() << '\n';
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
    if (doc.at("format") != "adrev-checkpoint" || doc.at("version") != kFormatVersion) {
      throw ConfigError("'" + path.string() + "' is not a supported checkpoint");
    }
    Checkpoint cp;
    const ModelConfig config = config_from_json(doc.at("config"));
    cp.schema_hash = doc.at("schema_hash").get<std::string>();
    if (cp.schema_hash != schema_hash(config.schema)) {
      throw ConfigError("checkpoint schema hash does not match its stored schema");
    }
    cp.pipeline = pipeline_from_json(doc.at("pipeline"));
    const auto& vocab = doc.at("vocabulary");
    vocab.at("publishers").get_to(cp.vocab.publishers);
    vocab.at("countries").get_to(cp.vocab.countries);
    vocab.at("categories").get_to(cp.vocab.categories);
    cp.scalers = scalers_from_json(doc.at("scalers"));
    cp.model = make_model(config);

    const auto& stored = doc.at("parameters");
    auto& entries = cp.model->parameters().entries();
    if (stored.size() != entries.size()) {
      throw ConfigError("checkpoint holds " + std::to_string(stored.size()) + " parameter tensors, model expects " +
                        std::to_string(entries.size()));
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& s = stored[i];
      const auto& name = s.at("name").get_ref<const std::string&>();
      if (name != entries[i].name || s.at("shape").get<Shape>() != entries[i].tensor.shape()) {
        throw ConfigError("checkpoint parameter '" + name + "' does not match model parameter '" +
                          entries[i].name + "'");
      }
      const auto values = s.at("values").get<std::vector<double>>();
      auto dst = entries[i].tensor.data();
      if (values.size() != dst.size()) throw ConfigError("checkpoint parameter '" + name + "' has wrong size");
      std::copy(values.begin(), values.end(), dst.begin());
    }
    return cp;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint '" + path.string() + "': " + e.what());
  }
}

void verify_schema(const Checkpoint& checkpoint, const data::FeatureSchema& schema) {
  if (schema_hash(schema) != checkpoint.schema_hash) {
    throw ConfigError("feature schema mismatch: data yields [" + schema.fingerprint() + "], checkpoint expects [" +
                      checkpoint.model->config().schema.fingerprint() + "]");
  }
}

}  // namespace adrev::models
