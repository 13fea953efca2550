// qls-equiv: transient-absorption signals of heralded single photons and of
// the amplified classical probes that reproduce them.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qls/qls.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Pump-probe signals for heralded-biphoton and shaped classical probes, "
      "term-expansion listings, and beam-geometry checks"};

  std::string experiment;
  app.add_option("experiment", experiment,
                 "one of: conventional, heralded, pqip, equivalence, terms, geometry")
      ->required()
      ->check(CLI::IsMember(
          {"conventional", "heralded", "pqip", "equivalence", "terms", "geometry"}));

  std::string config_path;
  app.add_option("--config", config_path, "config file (key = value; defaults when omitted)")
      ->check(CLI::ExistingFile);

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "output directory (default: current directory)");

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);

  double threshold = 0.0;
  auto* threshold_opt =
      app.add_option("--threshold", threshold,
                     "equivalence pass threshold on the max relative deviation");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto kind = qls::parse_experiment(experiment);
    qls::RunConfig cfg = config_path.empty()
                             ? qls::parse_config("", "<defaults>", kind)
                             : qls::load_config(config_path, kind);
    if (threads > 0) cfg.threads = threads;
    if (threshold_opt->count() > 0) {
      if (!(threshold > 0.0)) {
        std::cerr << "error: --threshold must be > 0\n";
        return 1;
      }
      cfg.threshold = threshold;
    }
    return qls::run(cfg, out_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
