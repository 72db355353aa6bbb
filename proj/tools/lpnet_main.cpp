// lpnet command line: simulate | equilibria | stability | meanfield |
// sweep | detect. One JSON config file drives everything; flags override
// config values. Exit codes: 0 ok, 2 bad config/input, 3 non-finite state,
// 1 other runtime error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "lpnet/error.hpp"
#include "lpnet/io.hpp"
#include "lpnet/model.hpp"

namespace fs = std::filesystem;
using lpnet::io::json;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int threads = 0;
};

int resolve_threads(const GlobalArgs& args) {
  if (args.threads > 0) return args.threads;
  if (const char* env = std::getenv("LPNET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

json load_effective_config(const GlobalArgs& args) {
  json config = lpnet::io::load_json(args.config_path);
  if (args.seed_override) config["seed"] = *args.seed_override;
  return config;
}

std::string base_dir_of(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

std::string out_path(const GlobalArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return (fs::path(args.out_dir) / name).string();
}

lpnet::LatticeState build_initial_state(const lpnet::Network& net,
                                        lpnet::ModelKind model,
                                        const json& config,
                                        std::uint64_t seed,
                                        const std::string& base_dir) {
  const json init_section = config.value("initial", json::object());
  const lpnet::InitialCondition init = lpnet::io::parse_initial(init_section);
  if (init.policy == lpnet::InitialCondition::Policy::FromFile) {
    std::string path = init.path;
    if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
    return lpnet::io::state_from_json(lpnet::io::load_json(path));
  }
  const double radius = init_section.value("radius", 1.0);
  const double c1 = init_section.value("c1", 1.0);
  const double c2 = init_section.value("c2", 1.0);
  const double temperature = init_section.value("temperature", 1.0);
  return lpnet::draw_initial_state(net, model, init, radius, c1, c2,
                                   temperature, seed);
}

int cmd_simulate(const GlobalArgs& args) {
  const json config = load_effective_config(args);
  const auto model = lpnet::io::parse_model(config);
  const auto net = lpnet::io::parse_network(config.value("network", json()),
                                            base_dir_of(args.config_path));
  auto icfg = lpnet::io::parse_integrator(config.value("integrator", json()));
  icfg.seed = config.value("seed", 0ull);

  const auto s0 = build_initial_state(net, model, config, icfg.seed,
                                      base_dir_of(args.config_path));
  const auto traj = lpnet::run(net, s0, icfg);

  lpnet::io::Manifest manifest("simulate", config, icfg.seed,
                               resolve_threads(args));
  const auto csv = out_path(args, "trajectory.csv");
  const auto final_state = out_path(args, "final_state.json");
  lpnet::io::write_trajectory_csv(csv, traj);
  lpnet::io::write_state_json(final_state, traj.states.back());
  manifest.add_output(csv);
  manifest.add_output(final_state);
  manifest.write(out_path(args, "manifest.json"));
  return 0;
}

int cmd_equilibria(const GlobalArgs& args, bool with_stability) {
  const json config = load_effective_config(args);
  const auto net = lpnet::io::parse_network(config.value("network", json()),
                                            base_dir_of(args.config_path));
  if (!config.contains("equilibria")) {
    throw lpnet::ConfigError("missing equilibria section");
  }
  const json& section = config["equilibria"];
  const std::string coupling = section.value("coupling", "momentum");

  std::vector<lpnet::EquilibriumRecord> records;
  if (coupling == "momentum") {
    records = lpnet::momentum_equilibria(net, section.value("casimir", 1.0));
  } else if (coupling == "position") {
    if (!section.contains("lambda1")) {
      throw lpnet::ConfigError("position coupling needs `lambda1`");
    }
    records = lpnet::position_equilibria(net, section["lambda1"].get<double>(),
                                         section.value("c2", 1.0));
  } else {
    throw lpnet::ConfigError("coupling must be `momentum` or `position`");
  }
  if (with_stability) {
    lpnet::stability_pass(net, records, resolve_threads(args));
  }

  lpnet::io::Manifest manifest(with_stability ? "stability" : "equilibria",
                               config, config.value("seed", 0ull),
                               resolve_threads(args));
  const auto csv = out_path(args, "records.csv");
  const auto js = out_path(args, "records.json");
  lpnet::io::write_records_csv(csv, net, records);
  lpnet::io::write_records_json(js, net, records);
  manifest.add_output(csv);
  manifest.add_output(js);
  if (section.contains("lambda1_grid") && coupling == "position") {
    const auto grid = section["lambda1_grid"].get<std::vector<double>>();
    const auto curves = out_path(args, "lambda_curves.csv");
    lpnet::io::write_lambda_curves_csv(curves, net, grid,
                                       section.value("c2", 1.0));
    manifest.add_output(curves);
  }
  manifest.write(out_path(args, "manifest.json"));
  return 0;
}

int cmd_meanfield(const GlobalArgs& args) {
  const json config = load_effective_config(args);
  const auto model = lpnet::io::parse_model(config);
  if (!config.contains("meanfield")) {
    throw lpnet::ConfigError("missing meanfield section");
  }
  const json& section = config["meanfield"];
  auto opt = lpnet::io::parse_meanfield_options(section);
  opt.seed = config.value("seed", 0ull);
  const auto temperatures =
      lpnet::io::parse_temperatures(section.at("temperatures"));
  const Eigen::Matrix3d inertia =
      lpnet::io::parse_tensor(section.value("inertia", json(1.0)));
  const Eigen::Matrix3d coupling =
      lpnet::io::parse_tensor(section.value("coupling", json(1.0)));

  std::vector<lpnet::io::MeanFieldRow> rows;
  for (const double T : temperatures) {
    const double beta = 1.0 / T;
    lpnet::MeanFieldResult res;
    if (model == lpnet::ModelKind::RigidBody) {
      res = lpnet::meanfield_rb(inertia, coupling, section.value("radius", 1.0),
                                beta, opt);
    } else {
      res = lpnet::meanfield_ht(inertia, coupling, section.value("c1", 1.0),
                                section.value("c2", 1.0), beta, opt);
    }
    rows.push_back({T, res});
  }

  lpnet::io::Manifest manifest("meanfield", config, opt.seed,
                               resolve_threads(args));
  const auto csv = out_path(args, "meanfield.csv");
  lpnet::io::write_meanfield_csv(csv, rows);
  manifest.add_output(csv);
  manifest.write(out_path(args, "manifest.json"));
  return 0;
}

int cmd_sweep(const GlobalArgs& args) {
  const json config = load_effective_config(args);
  const auto model = lpnet::io::parse_model(config);
  const auto net = lpnet::io::parse_network(config.value("network", json()),
                                            base_dir_of(args.config_path));
  auto cfg = lpnet::io::parse_sweep(config, model);
  cfg.threads = resolve_threads(args);
  if (cfg.init.policy == lpnet::InitialCondition::Policy::FromFile) {
    std::string path = cfg.init.path;
    if (!path.empty() && path[0] != '/') {
      path = base_dir_of(args.config_path) + "/" + path;
    }
    cfg.file_state = lpnet::io::state_from_json(lpnet::io::load_json(path));
  }

  const auto result = lpnet::run_sweep(net, cfg);

  lpnet::io::Manifest manifest("sweep", config, cfg.base_seed,
                               resolve_threads(args));
  const auto csv = out_path(args, "sweep.csv");
  const auto js = out_path(args, "sweep.json");
  lpnet::io::write_sweep_csv(csv, result);
  lpnet::io::write_sweep_json(js, config, result);
  manifest.add_output(csv);
  manifest.add_output(js);
  manifest.write(out_path(args, "manifest.json"));
  return 0;
}

int cmd_detect(const GlobalArgs& args, const std::string& input,
               const std::string& column) {
  std::vector<double> temperatures, series;
  lpnet::io::read_sweep_series(input, column, temperatures, series);
  const auto transitions = lpnet::detect_transitions(temperatures, series);

  json config_echo;
  config_echo["input"] = input;
  config_echo["column"] = column;
  lpnet::io::Manifest manifest("detect", config_echo, 0, 1);
  const auto csv = out_path(args, "transitions.csv");
  lpnet::io::write_transitions_csv(csv, transitions);
  manifest.add_output(csv);
  manifest.write(out_path(args, "manifest.json"));

  for (const auto& t : transitions) {
    std::cout << "T_c = " << t.temperature << " +/- " << t.uncertainty
              << " (strength " << t.strength << (t.weak ? ", weak" : "")
              << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networks of interacting rigid bodies and heavy tops: "
               "simulation, spectral equilibria, and thermodynamics"};
  app.require_subcommand(1);

  GlobalArgs args;
  std::string detect_input, detect_column = "mag";

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", args.config_path, "JSON config file")
          ->required();
    }
    sub->add_option("--out-dir", args.out_dir, "output directory");
    sub->add_option("--threads", args.threads,
                    "worker threads (default: LPNET_THREADS or hardware)");
    sub->add_option("--seed", args.seed_override, "override the config seed");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate, true);
  auto* equilibria =
      app.add_subcommand("equilibria", "spectral equilibria and classes");
  add_common(equilibria, true);
  auto* stability = app.add_subcommand(
      "stability", "equilibria plus linearised stability spectra");
  add_common(stability, true);
  auto* meanfield =
      app.add_subcommand("meanfield", "mean-field magnetisation curve");
  add_common(meanfield, true);
  auto* sweep = app.add_subcommand("sweep", "temperature sweep");
  add_common(sweep, true);
  auto* detect =
      app.add_subcommand("detect", "locate transitions in a sweep CSV");
  detect->add_option("--input", detect_input, "sweep.csv path")->required();
  detect->add_option("--column", detect_column,
                     "CSV column to scan (default mag)");
  add_common(detect, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (equilibria->parsed()) return cmd_equilibria(args, false);
    if (stability->parsed()) return cmd_equilibria(args, true);
    if (meanfield->parsed()) return cmd_meanfield(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (detect->parsed()) return cmd_detect(args, detect_input, detect_column);
  } catch (const lpnet::NonFiniteState& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const lpnet::ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const lpnet::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
