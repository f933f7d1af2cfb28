#include "adrev/app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adrev/app/run.hpp"
#include "adrev/app/svg.hpp"
#include "adrev/data/date.hpp"
#include "adrev/error.hpp"
#include "adrev/models/checkpoint.hpp"
#include "adrev/models/interpret.hpp"
#include "adrev/text.hpp"
#include "adrev/train/search.hpp"
#include "adrev/train/trainer.hpp"

namespace adrev::app {

namespace fs = std::filesystem;

namespace {

constexpr unsigned kTrainGroups = kCommon | kInputs | kPipeline | kModel | kTraining;

/// Collects outputs and writes the manifest last.
class Run {
 public:
  Run(const std::string& command, const Settings& settings, const fs::path& out)
      : dir_(create_run_dir(out)), manifest_(command, settings) {}

  const fs::path& dir() const { return dir_; }
  void input(const fs::path& path) { manifest_.add_input(path); }

  template <class Writer>
  void csv(const std::string& name, Writer&& writer) {
    std::ostringstream buffer;
    writer(buffer);
    text(name, buffer.str());
  }

  void text(const std::string& name, const std::string& content) {
    write_text(dir_ / name, content);
    manifest_.add_output(name);
  }

  void mark(const std::string& name) { manifest_.add_output(name); }

  CommandResult finish() {
    manifest_.add_output("manifest.json");
    manifest_.write(dir_);
    return {dir_, manifest_.outputs()};
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

fs::path required_path(const Settings& s, const std::string& key) {
  const std::string& v = s.text(key);
  if (v.empty()) throw ConfigError("missing --" + key);
  return v;
}

data::PreparedData load_for_checkpoint(const models::Checkpoint& ckpt, const fs::path& data_path) {
  auto prepared = data::prepare_with(data::ingest_csv(data_path), ckpt.pipeline, ckpt.scalers, ckpt.vocab);
  models::verify_schema(ckpt, prepared.schema);
  if (prepared.splits.test.empty()) throw DataError("no test windows in " + data_path.string());
  return prepared;
}

void write_importance(std::ostream& out, const std::vector<std::string>& names, const std::vector<double>& values) {
  out << "variable,importance\n";
  for (std::size_t i = 0; i < names.size(); ++i) out << names[i] << ',' << format_double(values[i]) << '\n';
}

std::string forecast_plot(const std::string& title, const train::Forecasts& f, std::size_t w) {
  const std::size_t tau = f.horizon, q = f.quantiles;
  std::vector<double> x(tau), truth(tau), point(tau), lo(tau), hi(tau);
  for (std::size_t h = 0; h < tau; ++h) {
    const std::size_t r = w * tau + h;
    x[h] = static_cast<double>(h + 1);
    truth[h] = f.truth[r];
    point[h] = f.point[r];
    lo[h] = f.bands[r * q];
    hi[h] = f.bands[r * q + q - 1];
  }
  std::optional<ShadedBand> band;
  if (q > 1) band = ShadedBand{lo, hi, "#dd8452"};
  return line_chart(title + " - " + f.publishers[w] + " from " + data::format_date(f.anchors[w]), x,
                    {{"actual", truth, "#333333", false}, {"forecast", point, "#dd8452", true}}, band,
                    "days ahead", "revenue");
}

}  // namespace

unsigned command_groups(std::string_view command) {
  if (command == "synth") return kCommon | kGenerator;
  if (command == "train") return kTrainGroups;
  if (command == "evaluate" || command == "interpret") return kCommon | kInputs;
  if (command == "tune") return kTrainGroups | kSearch;
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

CommandResult cmd_synth(const Settings& settings, const fs::path& out) {
  const auto spec = generator_spec(settings);
  spec.validate();
  const auto panel = synth::generate_panel(spec);
  Run run("synth", settings, out);
  run.csv("panel.csv", [&](std::ostream& os) { data::write_csv(os, panel); });
  run.text("config.cfg", settings.to_text());
  return run.finish();
}

CommandResult cmd_train(const Settings& settings, const fs::path& out) {
  const fs::path data_path = required_path(settings, "data");
  auto pipeline = pipeline_config(settings);
  const auto prepared = data::prepare(data::ingest_csv(data_path), pipeline);
  pipeline.val_start = prepared.val_start;
  pipeline.test_start = prepared.test_start;
  Settings resolved = settings;
  resolved.set("val_start", data::format_date(prepared.val_start));
  resolved.set("test_start", data::format_date(prepared.test_start));

  const auto model_cfg = model_config(settings, prepared.schema);
  const auto train_cfg = train_config(settings);
  auto model = models::make_model(model_cfg);
  const auto history = train::train(*model, prepared.splits.train, prepared.splits.val, train_cfg);

  Run run("train", resolved, out);
  run.input(data_path);
  models::save_checkpoint(run.dir() / "checkpoint.json", *model, prepared.scalers, prepared.vocab, pipeline);
  run.mark("checkpoint.json");
  run.csv("history.csv", [&](std::ostream& os) { train::write_history_csv(os, history); });
  run.text("config.cfg", resolved.to_text());
  std::ostringstream report;
  report << "model: " << models::to_string(model_cfg.kind) << "\n"
         << "parameters: " << model->parameters().scalar_count() << "\n"
         << "windows: train " << prepared.splits.train.size() << ", val " << prepared.splits.val.size() << ", test "
         << prepared.splits.test.size() << "\n"
         << "best epoch: " << history.best_epoch << " (validation loss " << format_double(history.best_val_loss)
         << ")\n";
  run.text("report.txt", report.str());
  return run.finish();
}

CommandResult cmd_evaluate(const Settings& settings, const fs::path& out) {
  const fs::path ckpt_path = required_path(settings, "checkpoint");
  const fs::path data_path = required_path(settings, "data");
  const auto ckpt = models::load_checkpoint(ckpt_path);
  const auto prepared = load_for_checkpoint(ckpt, data_path);
  const auto& test = prepared.splits.test;
  const std::string name(models::to_string(ckpt.model->kind()));

  const auto forecasts = train::predict(*ckpt.model, test, prepared.scalers, settings.u64("seed"));
  const auto report = train::evaluate(forecasts);
  const auto naive = train::evaluate(train::from_normalized(test, train::seasonal_naive(test), prepared.scalers));

  Run run("evaluate", settings, out);
  run.input(ckpt_path);
  run.input(data_path);
  run.csv("metrics.csv", [&](std::ostream& os) {
    train::write_metrics_csv(os, {{name, report}, {"seasonal_naive", naive}});
  });
  run.csv("metrics_by_step.csv", [&](std::ostream& os) { train::write_step_metrics_csv(os, name, report); });
  run.csv("metrics_by_publisher.csv",
          [&](std::ostream& os) { train::write_publisher_metrics_csv(os, name, report); });
  run.csv("forecasts.csv", [&](std::ostream& os) { train::write_forecasts_csv(os, forecasts); });
  std::ostringstream text;
  text << "model: " << name << "\n"
       << "test windows: " << test.size() << " from " << data::format_date(prepared.test_start) << "\n"
       << "SMAPE: " << format_double(report.aggregate.smape) << " (seasonal naive "
       << format_double(naive.aggregate.smape) << ")\n";
  if (forecasts.quantiles > 1) text << "quantile crossing rate: " << format_double(train::crossing_rate(forecasts)) << "\n";
  text << "Errors are on the currency scale. MAPE and SMAPE use eps = 1e-6 in the denominator so zero-revenue days "
          "stay finite.\n";
  run.text("report.txt", text.str());
  return run.finish();
}

CommandResult cmd_interpret(const Settings& settings, const fs::path& out) {
  const fs::path ckpt_path = required_path(settings, "checkpoint");
  const fs::path data_path = required_path(settings, "data");
  const auto ckpt = models::load_checkpoint(ckpt_path);
  if (ckpt.model->kind() != models::ModelKind::kTft) {
    throw CapabilityError("interpret needs a tft checkpoint, got " + std::string(models::to_string(ckpt.model->kind())));
  }
  const auto prepared = load_for_checkpoint(ckpt, data_path);
  const auto& test = prepared.splits.test;
  const auto result = models::interpret(*ckpt.model, test);
  const auto& imp = result.importance;
  const auto forecasts = train::predict(*ckpt.model, test, prepared.scalers, settings.u64("seed"));

  std::size_t best = 0, worst = 0;
  double best_score = 3.0, worst_score = -1.0;
  for (std::size_t w = 0; w < forecasts.size(); ++w) {
    const auto begin = static_cast<std::ptrdiff_t>(w * forecasts.horizon);
    const std::span<const double> y(forecasts.truth.data() + begin, forecasts.horizon);
    const std::span<const double> f(forecasts.point.data() + begin, forecasts.horizon);
    const double score = train::smape(y, f);
    if (score < best_score) {
      best_score = score;
      best = w;
    }
    if (score > worst_score) {
      worst_score = score;
      worst = w;
    }
  }

  std::vector<double> lags, profile;
  const std::size_t shown = std::min<std::size_t>(result.attention_profile.size(), 4 * 7 + 1);
  for (std::size_t l = 0; l < shown; ++l) {
    lags.push_back(static_cast<double>(l));
    profile.push_back(result.attention_profile[l]);
  }

  Run run("interpret", settings, out);
  run.input(ckpt_path);
  run.input(data_path);
  run.csv("importance_encoder.csv", [&](std::ostream& os) { write_importance(os, imp.encoder_names, imp.encoder); });
  run.csv("importance_decoder.csv", [&](std::ostream& os) { write_importance(os, imp.decoder_names, imp.decoder); });
  run.csv("importance_static.csv", [&](std::ostream& os) { write_importance(os, imp.static_names, imp.statics); });
  run.csv("attention_profile.csv", [&](std::ostream& os) {
    os << "lag,attention\n";
    for (std::size_t l = 0; l < result.attention_profile.size(); ++l)
      os << l << ',' << format_double(result.attention_profile[l]) << '\n';
  });
  run.text("importance_encoder.svg", bar_chart("Encoder variable importance", imp.encoder_names, imp.encoder));
  run.text("importance_decoder.svg", bar_chart("Decoder variable importance", imp.decoder_names, imp.decoder));
  run.text("importance_static.svg", bar_chart("Static variable importance", imp.static_names, imp.statics));
  run.text("attention_profile.svg",
           line_chart("Mean attention by lag", lags, {{"attention", profile, "#4c72b0", false}}, std::nullopt,
                      "lag (days)", "attention"));
  run.text("forecast_best.svg", forecast_plot("Best forecast", forecasts, best));
  run.text("forecast_worst.svg", forecast_plot("Worst forecast", forecasts, worst));
  return run.finish();
}

CommandResult cmd_tune(const Settings& settings, const fs::path& out) {
  const fs::path data_path = required_path(settings, "data");
  auto pipeline = pipeline_config(settings);
  const auto prepared = data::prepare(data::ingest_csv(data_path), pipeline);
  const auto base = model_config(settings, prepared.schema);
  const auto space = search_space(settings, base.kind);
  const auto result = train::hparam_search(base, space, prepared.splits.train, prepared.splits.val,
                                           train_config(settings), settings.u64("seed"));

  Settings best(kTrainGroups);
  for (const auto& [key, value] : settings.values())
    if (best.accepts(key)) best.set(key, value);
  apply_trial(best, result.best_trial());

  Run run("tune", settings, out);
  run.input(data_path);
  if (const std::string& space_file = settings.text("space"); !space_file.empty()) run.input(space_file);
  run.csv("trials.csv", [&](std::ostream& os) { train::write_trials_csv(os, result); });
  run.text("best.cfg", best.to_text());
  run.text("config.cfg", settings.to_text());
  return run.finish();
}

CommandResult run_command(std::string_view command, const Settings& settings, const fs::path& out) {
  if (command == "synth") return cmd_synth(settings, out);
  if (command == "train") return cmd_train(settings, out);
  if (command == "evaluate") return cmd_evaluate(settings, out);
  if (command == "interpret") return cmd_interpret(settings, out);
  if (command == "tune") return cmd_tune(settings, out);
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

}  // namespace adrev::app
