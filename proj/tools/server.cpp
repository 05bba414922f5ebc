// rxfeed-server: HTTP/SSE session service.
#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "common.hpp"
#include "json.hpp"

namespace {

extern "C" void handle_signal(int) { rxf_server_interrupt(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Live reaction feedback server"};
  std::string config_path;
  app.add_option("-c,--config", config_path, "TOML config file; RXFEED_* variables override it")
      ->check(CLI::ExistingFile);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
  CLI11_PARSE(app, argc, argv);

  rxf_service* service = nullptr;
  try {
    tool::check(rxf_service_create_from_env(config_path.c_str(), &service), "config");
    tool::CString cfg;
    tool::check(rxf_service_config(service, &cfg.p), "config");
    const auto effective = nlohmann::json::parse(cfg.str());
    if (print_config) {
      std::cout << effective.dump(2) << '\n';
      rxf_service_destroy(service);
      return 0;
    }

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    const auto host = effective["bind"].get<std::string>();
    const int port = effective["port"].get<int>();
    std::cerr << "listening on " << host << ':' << port << '\n';
    tool::check(rxf_server_run(service, host.c_str(), port), "serve");
    std::cerr << "stopped\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    rxf_service_destroy(service);
    return 1;
  }
  rxf_service_destroy(service);
  return 0;
}
