#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adrev/app/settings.hpp"

namespace adrev::app {

struct CommandResult {
  std::filesystem::path run_dir;
  std::vector<std::string> outputs;  // file names inside run_dir
};

inline constexpr const char* kCommands[] = {"synth", "train", "evaluate", "interpret", "tune"};

/// Key groups accepted by a command; throws ConfigError for an unknown name.
unsigned command_groups(std::string_view command);

/// Each command writes into a fresh run directory derived from `out`.
CommandResult cmd_synth(const Settings& settings, const std::filesystem::path& out);
CommandResult cmd_train(const Settings& settings, const std::filesystem::path& out);
CommandResult cmd_evaluate(const Settings& settings, const std::filesystem::path& out);
CommandResult cmd_interpret(const Settings& settings, const std::filesystem::path& out);
CommandResult cmd_tune(const Settings& settings, const std::filesystem::path& out);

CommandResult run_command(std::string_view command, const Settings& settings, const std::filesystem::path& out);

}  // namespace adrev::app
