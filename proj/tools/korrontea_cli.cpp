// Command-line front end of the simulator.
// Exit codes: 0 success, 1 verification failed, 2 bad configuration or I/O.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "korrontea/simulator.hpp"
#include "korrontea/socket.hpp"
#include "korrontea/verify.hpp"

namespace {

using namespace korrontea;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "-" or empty means stdout.
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("cannot write {}", path));
  out << text;
  if (!out.flush()) throw Error(ErrorCode::kIoError, fmt::format("write to {} failed", path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"korrontea: synchronization of timestamped flows on one site"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::string endpoint;
  Tick from = 0;
  Tick to = 0;
  std::int64_t tick_us = 1000;

  auto* simulate = app.add_subcommand("simulate", "run a scenario in virtual time and print its trace");
  simulate->add_option("--config", config_path, "scenario JSON")->required();
  simulate->add_option("--out", out_path, "trace file (default stdout)");

  auto* check = app.add_subcommand("verify", "check a trace against its scenario");
  check->add_option("--config", config_path, "scenario JSON")->required();
  check->add_option("--trace", trace_path, "trace file")->required();

  auto* sweep = app.add_subcommand("sweep-alpha", "simulate once per alpha and report CSV");
  sweep->add_option("--config", config_path, "scenario JSON")->required();
  sweep->add_option("--from", from, "first alpha")->required();
  sweep->add_option("--to", to, "last alpha")->required();
  sweep->add_option("--out", out_path, "CSV file (default stdout)");

  auto* serve = app.add_subcommand("serve", "fuse one feeder's flows received over TCP");
  serve->add_option("--listen", endpoint, "host:port")->required();
  serve->add_option("--out", out_path, "trace file (default stdout)");
  serve->add_option("--tick-us", tick_us, "microseconds per tick");

  auto* feeder = app.add_subcommand("feed", "send a scenario's flows to a server");
  feeder->add_option("--connect", endpoint, "host:port")->required();
  feeder->add_option("--config", config_path, "scenario JSON")->required();
  feeder->add_option("--tick-us", tick_us, "microseconds per tick");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      auto result = sim::run_simulation(sim::load_config(config_path));
      write_output(out_path, sim::emit_trace(result.trace));
    } else if (check->parsed()) {
      auto config = sim::load_config(config_path);
      auto trace = sim::parse_trace(read_file(trace_path));
      auto report = sim::verify(trace, config);
      std::cout << sim::format_report(report);
      return report.ok() ? 0 : 1;
    } else if (sweep->parsed()) {
      auto rows = sim::sweep_alpha(sim::load_config(config_path), from, to);
      write_output(out_path, sim::sweep_csv(rows));
    } else if (serve->parsed()) {
      transport::Listener listener(transport::Endpoint::parse(endpoint));
      std::cerr << fmt::format("listening on port {}\n", listener.port());
      auto trace = transport::serve_once(listener, {.tick_us = tick_us});
      write_output(out_path, sim::emit_trace(trace));
    } else if (feeder->parsed()) {
      transport::feed(transport::Endpoint::parse(endpoint), sim::load_config(config_path), tick_us);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
