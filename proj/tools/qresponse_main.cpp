#include <CLI11.hpp>
#include <string>
#include <thread>

#include "qresponse/cli/runner.hpp"
#include "qresponse/cli/table.hpp"

int main(int argc, char** argv) {
  CLI::App app{"NV-center quantum dynamic-response simulator"};
  app.set_version_flag("--version", std::string("qresponse ") + qresponse::cli::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;  // 0 = hardware concurrency; 1 = deterministic reference mode

  const std::vector<std::string> kinds{"eig",    "berry", "quench", "bath",
                                       "invert", "bound", "sweep"};
  for (const std::string& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, "run a '" + kind + "' experiment config");
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
    sub->add_option("--threads", threads, "worker threads; 1 = reference mode");
  }

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  const std::string kind = app.get_subcommands().front()->get_name();
  return qresponse::cli::run_experiment(kind, config_path, out_dir, threads);
}
