#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "adrev/app/commands.hpp"
#include "adrev/app/run.hpp"
#include "adrev/app/settings.hpp"
#include "adrev/app/svg.hpp"
#include "adrev/data/panel.hpp"
#include "adrev/error.hpp"
#include "adrev/log.hpp"
#include "adrev/models/checkpoint.hpp"
#include "adrev/train/trainer.hpp"

#ifndef ADREV_CLI_PATH
#define ADREV_CLI_PATH "adrev"
#endif

namespace adrev::app {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() / ("adrev_cli_" + std::to_string(::getpid())));
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    Settings s(command_groups("synth"));
    s.set("days", "200");
    s.set("publishers", "4");
    s.set("categories", "2");
    panel_ = new fs::path(cmd_synth(s, *root_ / "synth").run_dir / "panel.csv");

    Settings t = train_settings("tft");
    t.set("epochs", "2");
    tft_ = new fs::path(cmd_train(t, *root_ / "tft").run_dir);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
    delete panel_;
    delete tft_;
  }

  static Settings train_settings(const std::string& model) {
    Settings t(command_groups("train"));
    t.set("data", panel_->string());
    t.set("model", model);
    t.set("lookback", "21");
    t.set("hidden", "8");
    t.set("epochs", "1");
    t.set("nbeats_width", "16");
    t.set("samples", "10");
    return t;
  }

  static Settings checkpoint_settings(const std::string& command, const fs::path& run) {
    Settings s(command_groups(command));
    s.set("checkpoint", (run / "checkpoint.json").string());
    s.set("data", panel_->string());
    return s;
  }

  static fs::path* root_;
  static fs::path* panel_;
  static fs::path* tft_;
};

fs::path* CliFixture::root_ = nullptr;
fs::path* CliFixture::panel_ = nullptr;
fs::path* CliFixture::tft_ = nullptr;

TEST(SettingsFile, ParsesCommentsAndRejectsUnknownKeys) {
  Settings s(command_groups("train"));
  s.load_text("# comment\nhidden = 24  # trailing\n\n  dropout=0.2\nquantiles = 0.1, 0.5,0.9\n");
  EXPECT_EQ(s.size("hidden"), 24u);
  EXPECT_DOUBLE_EQ(s.real("dropout"), 0.2);
  EXPECT_EQ(s.reals("quantiles"), (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_THROW(s.load_text("nonsense = 1"), ConfigError);
  EXPECT_THROW(s.load_text("hidden"), ConfigError);
  EXPECT_THROW(s.set("publishers", "3"), ConfigError);  // generator key on train
  s.set("hidden", "x");
  EXPECT_THROW(s.size("hidden"), ConfigError);
  s.set("val_start", "2019-13-01");
  EXPECT_THROW(pipeline_config(s), ConfigError);
}

TEST(SettingsFile, DefaultsMirrorLibraryDefaults) {
  Settings s(command_groups("tune"));
  const auto p = pipeline_config(s);
  EXPECT_EQ(p.lookback, 89u);
  EXPECT_EQ(p.horizon, 7u);
  EXPECT_FALSE(p.val_start.has_value());
  const auto t = train_config(s);
  EXPECT_EQ(t.batch, 32u);
  EXPECT_EQ(t.epochs, 5u);
  EXPECT_EQ(t.learning_rate, 1e-3);
  const auto space = search_space(s, models::ModelKind::kTft);
  EXPECT_EQ(space.budget, 20u);
  EXPECT_EQ(space.epochs, 5u);
  EXPECT_EQ(space.learning_rate, (std::vector<double>{1e-3, 1e-4}));
  Settings g(command_groups("synth"));
  EXPECT_EQ(generator_spec(g).publishers, synth::GeneratorSpec{}.publishers);
  EXPECT_EQ(generator_spec(g).seed, 42u);
}

TEST(SettingsFile, TextRoundTrip) {
  Settings a(command_groups("train"));
  a.set("hidden", "12");
  a.set("val_start", "2019-01-01");
  Settings b(command_groups("train"));
  b.load_text(a.to_text());
  EXPECT_EQ(a.values(), b.values());
}

TEST(Svg, WellFormedXmlWithEscaping) {
  const std::string bars = bar_chart("a < b & \"c\"", {"x<y", "z"}, {0.25, 0.75});
  const std::string line = line_chart("t", {1, 2, 3}, {{"s&p", {1, 2, 1}, "#000", true}},
                                       ShadedBand{{0, 1, 0}, {2, 3, 2}, "#f00"}, "x", "y");
  for (const auto& doc : {bars, line}) {
    std::istringstream in(doc);
    boost::property_tree::ptree tree;
    EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree)) << doc;
  }
  EXPECT_NE(bars.find("x&lt;y"), std::string::npos);
  EXPECT_THROW(bar_chart("t", {"a"}, {1, 2}), ShapeError);
}

TEST(RunDir, NeverOverwrites) {
  const fs::path base = fs::temp_directory_path() / ("adrev_rundir_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::remove_all(base.string() + "-1");
  fs::remove_all(base.string() + "-2");
  EXPECT_EQ(create_run_dir(base), base);
  EXPECT_EQ(create_run_dir(base).string(), base.string() + "-1");
  EXPECT_EQ(create_run_dir(base).string(), base.string() + "-2");
  for (const char* suffix : {"", "-1", "-2"}) fs::remove_all(base.string() + suffix);
}

TEST_F(CliFixture, SynthParsesBackAndIsReproducible) {
  const auto panel = data::ingest_csv(*panel_);
  EXPECT_EQ(panel.size(), 4u);
  EXPECT_EQ(panel.publishers[0].length(), 200u);
  Settings s(command_groups("synth"));
  s.set("days", "200");
  s.set("publishers", "4");
  s.set("categories", "2");
  const auto again = cmd_synth(s, *root_ / "synth");
  EXPECT_NE(again.run_dir, panel_->parent_path());
  EXPECT_EQ(slurp(again.run_dir / "panel.csv"), slurp(*panel_));
  s.set("days", "96");
  EXPECT_THROW(cmd_synth(s, *root_ / "synth"), ConfigError);
}

TEST_F(CliFixture, TrainWritesRunDirectory) {
  for (const char* f : {"checkpoint.json", "history.csv", "config.cfg", "report.txt", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(*tft_ / f)) << f;
  }
  const auto history = lines(slurp(*tft_ / "history.csv"));
  EXPECT_EQ(history.front(), "epoch,train_loss,val_loss,best");
  EXPECT_EQ(history.size(), 4u);
  const std::string manifest = slurp(*tft_ / "manifest.json");
  for (const char* field : {"\"command\"", "\"config\"", "\"seed\"", "\"version\"", "\"started\"", "\"finished\"",
                            "\"inputs\"", "\"sha256\"", "\"outputs\""}) {
    EXPECT_NE(manifest.find(field), std::string::npos) << field;
  }
}

TEST_F(CliFixture, TrainHistoryIsReproducible) {
  Settings t = train_settings("lstm");
  const auto a = cmd_train(t, *root_ / "lstm");
  const auto b = cmd_train(t, *root_ / "lstm");
  EXPECT_EQ(slurp(a.run_dir / "history.csv"), slurp(b.run_dir / "history.csv"));
  EXPECT_EQ(slurp(a.run_dir / "checkpoint.json"), slurp(b.run_dir / "checkpoint.json"));
}

TEST_F(CliFixture, HorizonOverrideIsEchoed) {
  Settings t = train_settings("lstm");
  t.set("horizon", "30");
  const auto run = cmd_train(t, *root_ / "h30");
  EXPECT_NE(slurp(run.run_dir / "config.cfg").find("horizon = 30\n"), std::string::npos);
  EXPECT_EQ(models::load_checkpoint(run.run_dir / "checkpoint.json").model->config().horizon, 30u);
}

TEST_F(CliFixture, MissingColumnNamesTheColumn) {
  const fs::path bad = *root_ / "bad.csv";
  {
    std::ofstream out(bad);
    out << "date,publisher_id,country,category,revenue,impressions,clicks,page_views,sessions\n";
  }
  Settings t = train_settings("lstm");
  t.set("data", bad.string());
  try {
    cmd_train(t, *root_ / "bad");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bounces"), std::string::npos) << e.what();
  }
}

TEST_F(CliFixture, EvaluateMatchesInProcessEvaluation) {
  const auto run = cmd_evaluate(checkpoint_settings("evaluate", *tft_), *root_ / "eval");
  const auto rows = lines(slurp(run.run_dir / "metrics.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "model,horizon,MAE,MAPE,SMAPE");

  const auto ckpt = models::load_checkpoint(*tft_ / "checkpoint.json");
  const auto prepared =
      data::prepare_with(data::ingest_csv(*panel_), ckpt.pipeline, ckpt.scalers, ckpt.vocab);
  const auto report = train::evaluate(*ckpt.model, prepared.splits.test, prepared.scalers, 42);
  std::ostringstream expected;
  train::write_metrics_csv(expected, {{"tft", report}});
  EXPECT_EQ(rows[1], lines(expected.str())[1]);
  EXPECT_EQ(rows[2].rfind("seasonal_naive,7,", 0), 0u);
  EXPECT_TRUE(fs::exists(run.run_dir / "metrics_by_step.csv"));
  EXPECT_TRUE(fs::exists(run.run_dir / "metrics_by_publisher.csv"));
  EXPECT_NE(slurp(run.run_dir / "report.txt").find("eps = 1e-6"), std::string::npos);
}

TEST_F(CliFixture, InterpretOutputs) {
  const auto run = cmd_interpret(checkpoint_settings("interpret", *tft_), *root_ / "interp");
  for (const char* group : {"encoder", "decoder", "static"}) {
    const auto rows = lines(slurp(run.run_dir / ("importance_" + std::string(group) + ".csv")));
    double total = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i].substr(rows[i].find(',') + 1));
    EXPECT_NEAR(total, 1.0, 1e-9) << group;
  }
  for (const auto& name : run.outputs) {
    if (fs::path(name).extension() != ".svg") continue;
    std::ifstream in(run.run_dir / name);
    boost::property_tree::ptree tree;
    EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree)) << name;
  }
  EXPECT_TRUE(fs::exists(run.run_dir / "forecast_best.svg"));
  EXPECT_TRUE(fs::exists(run.run_dir / "forecast_worst.svg"));
}

TEST_F(CliFixture, InterpretRejectsOtherModels) {
  const auto lstm = cmd_train(train_settings("lstm"), *root_ / "lstm_ckpt");
  EXPECT_THROW(cmd_interpret(checkpoint_settings("interpret", lstm.run_dir), *root_ / "x"), CapabilityError);
}

TEST_F(CliFixture, TuneBestConfigReloadsIntoTrain) {
  Settings s(command_groups("tune"));
  s.set("data", panel_->string());
  s.set("model", "lstm");
  s.set("lookback", "21");
  s.set("budget", "1");
  s.set("trial_epochs", "1");
  s.set("hidden_choices", "4,8");
  const auto a = cmd_tune(s, *root_ / "tune");
  const auto b = cmd_tune(s, *root_ / "tune");
  EXPECT_EQ(lines(slurp(a.run_dir / "trials.csv")).size(), 2u);
  EXPECT_EQ(slurp(a.run_dir / "trials.csv"), slurp(b.run_dir / "trials.csv"));

  Settings t(command_groups("train"));
  t.load_file(a.run_dir / "best.cfg");
  t.set("epochs", "1");
  const auto run = cmd_train(t, *root_ / "from_best");
  EXPECT_TRUE(fs::exists(run.run_dir / "checkpoint.json"));
}

int run_cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(ADREV_CLI_PATH) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST_F(CliFixture, ExitCodesAndErrorPrefixes) {
  const fs::path err = *root_ / "stderr.txt";
  EXPECT_EQ(run_cli("synth --days 120 --publishers 2 --categories 1 --out " + (*root_ / "bin").string(), err), 0);
  EXPECT_EQ(run_cli("train --data " + (*root_ / "missing.csv").string(), err), 1);
  EXPECT_EQ(slurp(err).rfind("error E_IO:", 0), 0u) << slurp(err);
  EXPECT_EQ(run_cli("synth --days 10", err), 1);
  EXPECT_EQ(slurp(err).rfind("error E_CONFIG:", 0), 0u) << slurp(err);
  EXPECT_EQ(run_cli("synth --no-such-flag 1", err), 2);
  EXPECT_EQ(slurp(err).rfind("error E_USAGE:", 0), 0u) << slurp(err);
  EXPECT_EQ(run_cli("interpret --checkpoint " + (*root_ / "missing.json").string() + " --data " + panel_->string(),
                    err),
            1);
}

}  // namespace
}  // namespace adrev::app
