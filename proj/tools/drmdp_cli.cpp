// Command-line driver for the benchmark experiments.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "drmdp/error.hpp"
#include "drmdp/experiments.hpp"

namespace {

using drmdp::Json;
namespace ex = drmdp::experiments;

void emit_error(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

struct Overrides {
  std::string config;
  std::string out = "results";
  std::optional<int> seed_count;
  std::optional<long> steps;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON configuration file");
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--seed-count", o.seed_count, "number of seeded runs (overrides config)");
  sub->add_option("--steps", o.steps, "MVSA steps per run (overrides config)");
  sub->add_option("--threads", o.threads, "worker threads, 0 = hardware concurrency");
}

int execute(ex::Kind kind, const Overrides& o) {
  ex::ExperimentConfig cfg = o.config.empty()
                                 ? ex::ExperimentConfig::defaults(kind)
                                 : ex::ExperimentConfig::from_json(kind, drmdp::read_json(o.config));
  if (o.seed_count) {
    cfg.seed_count = *o.seed_count;
    cfg.seeds.clear();
  }
  if (o.steps) cfg.steps = *o.steps;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  for (const std::string& w : ex::config_warnings(cfg)) {
    std::cerr << Json{{"warning", w}}.dump() << std::endl;
  }
  for (const auto& path : ex::run(cfg, o.out)) std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular KL-robust MDP experiments"};
  app.set_version_flag("--version", drmdp::version_string());
  app.require_subcommand(1);

  Overrides overrides;
  std::optional<ex::Kind> chosen;
  for (ex::Kind kind : {ex::Kind::ApproxError, ex::Kind::Convergence, ex::Kind::Clt,
                        ex::Kind::QstarTable}) {
    CLI::App* sub = app.add_subcommand(ex::to_string(kind));
    add_common(sub, overrides);
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  app.get_subcommand("approx-error")->description("approximation error of U* against Q* over a delta grid");
  app.get_subcommand("convergence")->description("MVSA error curves and fitted log-log slope");
  app.get_subcommand("clt")->description("scaled MVSA errors, asymptotic covariance and ellipse coverage");
  app.get_subcommand("qstar")->description("U*_eps table and greedy policy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    emit_error("Usage", e.what());
    return 2;
  }

  try {
    return execute(*chosen, overrides);
  } catch (const drmdp::Error& e) {
    emit_error(std::string(drmdp::to_string(e.kind())), e.what());
  } catch (const std::exception& e) {
    emit_error("Internal", e.what());
  }
  return 1;
}
