#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sqlreward/service/config.hpp"

namespace sqlreward::cli {

using json = nlohmann::json;

/// Options shared by every subcommand; flags given on the command line win
/// over the config file, which wins over built-in defaults.
struct Common {
  std::optional<std::string> config_file;
  std::optional<std::string> db_root;
  std::optional<std::string> preset;
  std::optional<std::size_t> k;
  std::optional<std::string> scope;
  std::optional<int> timeout_ms;
  std::optional<std::size_t> threads;
  std::optional<std::string> match_mode;

  service::ServiceConfig load() const;
};

void add_config_option(CLI::App& cmd, Common& common);

std::string read_file(const std::filesystem::path& file);
/// `arg` itself, or the contents of the file it names.
std::string text_or_file(const std::string& arg);
void print_json(const json& value);

void register_query_commands(CLI::App& app, Common& common);
void register_data_commands(CLI::App& app, Common& common);
void register_memory_commands(CLI::App& app, Common& common);
void register_serve_command(CLI::App& app, Common& common);

}  // namespace sqlreward::cli
