#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lpnet/equilibria.hpp"
#include "lpnet/integrate.hpp"
#include "lpnet/network.hpp"
#include "lpnet/statmech.hpp"
#include "lpnet/sweep.hpp"

// File formats: a JSON config drives the CLI; graphs can come from a small
// structured text format; all CSV output is comma-separated, header row,
// UTF-8, LF, floats at 17 significant digits.

namespace lpnet::io {

using nlohmann::json;

/// %.17g rendering used by every CSV writer.
std::string fmt17(double x);

json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);

/// 3 numbers -> diagonal tensor, 9 numbers (flat or 3x3 nested) -> full
/// matrix, single number -> multiple of the identity.
Eigen::Matrix3d parse_tensor(const json& j);

/// network = {"lattice": {...}} | {"file": path} | {"nodes": N, "edges": [...]}
/// with optional "inertia" / "coupling" defaults.
Network parse_network(const json& network_section,
                      const std::string& base_dir = "");

/// Structured text graph: `nodes N`, `edge i j [tensor]`, `inertia i tensor`,
/// `default_inertia tensor`, `default_coupling tensor`, `#` comments.
Network network_from_text(const std::string& path,
                          const Eigen::Matrix3d& default_inertia,
                          const Eigen::Matrix3d& default_coupling);

ModelKind parse_model(const json& config);
IntegratorConfig parse_integrator(const json& section);
InitialCondition parse_initial(const json& section);
SweepConfig parse_sweep(const json& config, ModelKind model);
MeanFieldOptions parse_meanfield_options(const json& section);

/// Explicit list, or {"min": a, "max": b, "count": n, "spacing": "linear" |
/// "geometric"}.
std::vector<double> parse_temperatures(const json& j);

/// Checkpoint states.
json state_to_json(const LatticeState& s);
LatticeState state_from_json(const json& j);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_state_json(const std::string& path, const LatticeState& s);

void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_sweep_json(const std::string& path, const json& config_echo,
                      const SweepResult& result);

void write_records_csv(const std::string& path, const Network& net,
                       const std::vector<EquilibriumRecord>& records);
void write_records_json(const std::string& path, const Network& net,
                        const std::vector<EquilibriumRecord>& records);

/// Eigenvalue curves of the position Laplacian over a lambda1 grid.
void write_lambda_curves_csv(const std::string& path, const Network& net,
                             const std::vector<double>& lambda1_grid,
                             double c2);

struct MeanFieldRow {
  double temperature;
  MeanFieldResult result;
};
void write_meanfield_csv(const std::string& path,
                         const std::vector<MeanFieldRow>& rows);

void write_transitions_csv(const std::string& path,
                           const std::vector<TransitionEstimate>& transitions);

/// Reads `temperature` and a named column back from a sweep CSV (the
/// `detect` subcommand's input).
void read_sweep_series(const std::string& path, const std::string& column,
                       std::vector<double>& temperatures,
                       std::vector<double>& series);

/// Run manifest: effective config echo, seed, timestamps, output files.
class Manifest {
 public:
  Manifest(std::string command, json config_echo, std::uint64_t seed,
           int threads);
  void add_output(const std::string& path);
  void write(const std::string& path);

 private:
  json doc_;
};

}  // namespace lpnet::io
