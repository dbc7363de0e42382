#include "common.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "sqlreward/errors.hpp"

namespace sqlreward::cli {

service::ServiceConfig Common::load() const {
  auto c = service::load_config(config_file ? std::optional<std::filesystem::path>(*config_file) : std::nullopt);
  json flags = json::object();
  if (db_root) flags["db_root"] = *db_root;
  if (preset) flags["preset"] = *preset;
  if (k) flags["k"] = *k;
  if (scope) flags["scope"] = *scope;
  if (timeout_ms) flags["timeouts"] = {{"reward_ms", *timeout_ms}, {"eval_ms", *timeout_ms}};
  if (threads) flags["threads"] = *threads;
  if (match_mode) flags["match_mode"] = *match_mode;
  return service::merge_config(std::move(c), flags);
}

void add_config_option(CLI::App& cmd, Common& common) {
  cmd.add_option("--config", common.config_file, "Service configuration file (JSON)");
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string text_or_file(const std::string& arg) {
  std::error_code ec;
  if (arg.size() < 4096 && std::filesystem::is_regular_file(arg, ec)) return read_file(arg);
  return arg;
}

void print_json(const json& value) { std::cout << value.dump(2) << '\n'; }

}  // namespace sqlreward::cli
