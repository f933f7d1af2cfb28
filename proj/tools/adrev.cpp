#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "adrev/app/commands.hpp"
#include "adrev/app/run.hpp"
#include "adrev/app/settings.hpp"
#include "adrev/error.hpp"

namespace {

using adrev::app::Settings;

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config;
  std::string out;
  std::map<std::string, std::string> flags;
};

// Later sources win: defaults, --config file, --space file, then flags.
Settings resolve(const std::string& name, Subcommand& sub) {
  Settings settings(adrev::app::command_groups(name));
  if (!sub.config.empty()) settings.load_file(sub.config);
  auto apply_flags = [&] {
    for (const auto& [key, value] : sub.flags)
      if (sub.app->count("--" + key) > 0) settings.set(key, value);
  };
  apply_flags();
  if (settings.accepts("space") && !settings.text("space").empty()) {
    settings.load_file(settings.text("space"));
    apply_flags();
  }
  return settings;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-horizon ad revenue forecasting"};
  app.set_version_flag("--version", adrev::app::build_version());
  app.require_subcommand(1);

  std::map<std::string, Subcommand> subs;
  for (const char* name : adrev::app::kCommands) {
    Subcommand& sub = subs[name];
    const unsigned groups = adrev::app::command_groups(name);
    sub.app = app.add_subcommand(name);
    sub.app->add_option("--config", sub.config, "key = value settings file");
    sub.app->add_option("--out", sub.out, "run directory (suffixed -1, -2, ... if it exists)")
        ->default_val(std::string("runs/") + name);
    for (const auto& key : adrev::app::key_table()) {
      if (!(groups & key.group)) continue;
      sub.app->add_option("--" + key.name, sub.flags[key.name], key.help)->default_str(key.fallback);
    }
  }
  subs["synth"].app->description("Generate a synthetic publisher panel");
  subs["train"].app->description("Train a model and write a checkpoint");
  subs["evaluate"].app->description("Score a checkpoint on the test split");
  subs["interpret"].app->description("Variable importance and attention profile of a TFT checkpoint");
  subs["tune"].app->description("Seeded random hyperparameter search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error E_USAGE: " << e.what() << '\n';
    return 2;
  }

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      const Settings settings = resolve(name, sub);
      const auto result = adrev::app::run_command(name, settings, sub.out);
      std::cout << result.run_dir.string() << '\n';
    }
  } catch (const adrev::Error& e) {
    std::cerr << "error " << e.code() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error E_INTERNAL: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
