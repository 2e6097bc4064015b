#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spbp/bias.hpp"
#include "spbp/conflicts.hpp"
#include "spbp/engine.hpp"
#include "spbp/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kInfeasible = 3;

struct RunArgs {
  std::string config;
  std::string out;
  int jobs = -1;
  long long seed = -1;
  bool quick = false;
};

struct ExportArgs {
  std::string config;
  std::string out;
  int size = -1;
  int instance = 0;
  int realization = 0;
  std::string variant;
};

int do_run(const RunArgs& a) {
  spbp::ExperimentConfig cfg;
  try {
    cfg = spbp::load_config(a.config);
  } catch (const spbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (!a.out.empty()) cfg.output = a.out;
  if (a.jobs >= 0) cfg.jobs = a.jobs;
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (a.quick) {
    cfg.T = 200;
    cfg.instances_per_size = 2;
  }
  try {
    spbp::run_experiment(cfg, std::cout);
  } catch (const spbp::SlotFailure& e) {
    std::cerr << e.what() << "\nfailing slot trace: " << e.trace_path() << '\n';
    return kInfeasible;
  } catch (const spbp::InfeasibleAssignment& e) {
    std::cerr << e.what() << '\n';
    return kInfeasible;
  }
  return 0;
}

int do_export(const ExportArgs& a) {
  spbp::ExperimentConfig cfg;
  try {
    cfg = spbp::load_config(a.config);
  } catch (const spbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const spbp::Variant* variant = &cfg.variants.front();
  if (!a.variant.empty()) {
    variant = nullptr;
    for (const auto& v : cfg.variants) {
      if (v.name == a.variant) variant = &v;
    }
    if (!variant) {
      std::cerr << "config error: no variant named '" << a.variant << "'\n";
      return kConfigError;
    }
  }
  spbp::RunKey key;
  bool found = false;
  const int size = a.size > 0 ? a.size : cfg.sizes.front();
  for (const auto& k : spbp::enumerate_runs(cfg)) {
    if (k.size == size && k.instance == a.instance && k.realization == a.realization) {
      key = k;
      found = true;
    }
  }
  if (!found) {
    std::cerr << "config error: no run with size " << size << ", instance " << a.instance << ", realization "
              << a.realization << '\n';
    return kConfigError;
  }
  const auto sc = spbp::make_scenario(spbp::scenario_spec(cfg, key));
  const auto radios = spbp::radios_for(sc, *variant);
  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  {
    std::ofstream os(dir / "edges.txt");
    spbp::write_edge_list(os, sc.graph, sc.rates);
  }
  {
    std::ofstream os(dir / "conflicts.txt");
    if (variant->scheduler == spbp::SchedulerKind::lgs) {
      spbp::write_conflicts(os, spbp::build_siso_conflict_graph(sc.graph, cfg.radio.interference_range));
    } else {
      spbp::write_conflicts(
          os, spbp::build_ach(sc.graph, radios, {cfg.radio.interference_range, cfg.radio.nullification}));
    }
  }
  {
    std::ofstream os(dir / "bias.csv");
    const auto w = spbp::edge_weights(sc.rates, variant->bias);
    spbp::write_bias_csv(os, spbp::compute_bias(sc.graph, w, spbp::flow_commodities(sc.flows)));
  }
  std::cout << "exported " << sc.graph.node_count() << " nodes, " << sc.graph.link_count() << " links to "
            << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shortest-path-biased backpressure routing simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment sweep and write CSV results");
  run->add_option("--config", run_args.config, "JSON experiment configuration")->required();
  run->add_option("--out", run_args.out, "Output directory (overrides the config)");
  run->add_option("--jobs", run_args.jobs, "Parallel runs (0: one per hardware thread)")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", run_args.seed, "Master seed (overrides the config)")->check(CLI::NonNegativeNumber);
  run->add_flag("--quick", run_args.quick, "Short horizon (T=200) and 2 instances per size");

  std::string summary_dir;
  auto* sum = app.add_subcommand("summarize", "Print mean and 95% CI per size, variant and traffic class");
  sum->add_option("dir", summary_dir, "Directory holding aggregate.csv")->required();

  ExportArgs export_args;
  auto* exp = app.add_subcommand("export", "Write one instance's edge list, conflict structure and bias table");
  exp->add_option("--config", export_args.config, "JSON experiment configuration")->required();
  exp->add_option("--out", export_args.out, "Output directory")->required();
  exp->add_option("--size", export_args.size, "Network size (default: first configured size)");
  exp->add_option("--instance", export_args.instance, "Instance index");
  exp->add_option("--realization", export_args.realization, "Realization index");
  exp->add_option("--variant", export_args.variant, "Variant name (default: first configured variant)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(run_args);
    if (*sum) {
      spbp::summarize(summary_dir, std::cout);
      return 0;
    }
    if (*exp) return do_export(export_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
