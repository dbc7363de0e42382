// Unified front end. Exit codes: 0 success, 1 usage error, 2 data error.
#include <iostream>

#include "common.hpp"
#include "sqlreward/errors.hpp"

int main(int argc, char** argv) {
  using namespace sqlreward::cli;
  CLI::App app{"Fine-grained Text-to-SQL reward engine"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  add_config_option(app, common);

  register_query_commands(app, common);
  register_data_commands(app, common);
  register_memory_commands(app, common);
  register_serve_command(app, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const sqlreward::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [DataError]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
