#include "lpnet/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "lpnet/error.hpp"
#include "lpnet/model.hpp"

namespace lpnet::io {

namespace {

constexpr const char* kVersion = "1.0.0";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json vec3(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read file: " + path);
  try {
    return json::parse(in, nullptr, true, true);  // allow comments
  } catch (const json::exception& e) {
    throw ConfigError("JSON parse error in " + path + ": " + e.what());
  }
}

void save_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

Eigen::Matrix3d parse_tensor(const json& j) {
  try {
    if (j.is_number()) {
      return j.get<double>() * Eigen::Matrix3d::Identity();
    }
    if (j.is_array() && j.size() == 3 && j[0].is_number()) {
      Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
      for (int i = 0; i < 3; ++i) m(i, i) = j[i].get<double>();
      return m;
    }
    if (j.is_array() && j.size() == 9) {
      Eigen::Matrix3d m;
      for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = j[i].get<double>();
      return m;
    }
    if (j.is_array() && j.size() == 3 && j[0].is_array()) {
      Eigen::Matrix3d m;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
      }
      return m;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad tensor: ") + e.what());
  }
  throw ConfigError("tensor must be a scalar, 3 diagonal entries or a 3x3 matrix");
}

Network parse_network(const json& section, const std::string& base_dir) {
  if (!section.is_object()) throw ConfigError("missing network section");
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d coupling = Eigen::Matrix3d::Identity();
  if (section.contains("inertia")) inertia = parse_tensor(section["inertia"]);
  if (section.contains("coupling")) coupling = parse_tensor(section["coupling"]);

  if (section.contains("lattice")) {
    const auto& lat = section["lattice"];
    if (!lat.contains("width") || !lat.contains("height")) {
      throw ConfigError("lattice needs width and height");
    }
    return Network::lattice2d(lat["width"].get<int>(), lat["height"].get<int>(),
                              lat.value("periodic", false), inertia, coupling);
  }
  if (section.contains("file")) {
    std::string path = section["file"].get<std::string>();
    if (!base_dir.empty() && !path.empty() && path[0] != '/') {
      path = base_dir + "/" + path;
    }
    return network_from_text(path, inertia, coupling);
  }
  if (section.contains("nodes")) {
    std::vector<std::array<int, 2>> edges;
    for (const auto& e : section.value("edges", json::array())) {
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return Network::from_edges(section["nodes"].get<int>(), edges, inertia,
                               coupling);
  }
  throw ConfigError("network needs `lattice`, `file` or `nodes`+`edges`");
}

Network network_from_text(const std::string& path,
                          const Eigen::Matrix3d& default_inertia,
                          const Eigen::Matrix3d& default_coupling) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read graph file: " + path);

  auto tensor_from_words = [](const std::vector<double>& w, size_t at,
                              const Eigen::Matrix3d& fallback) {
    const size_t left = w.size() - at;
    if (left == 0) return fallback;
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    if (left == 3) {
      for (int i = 0; i < 3; ++i) m(i, i) = w[at + i];
    } else if (left == 9) {
      for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = w[at + i];
    } else {
      throw ConfigError("graph file: tensor needs 3 or 9 numbers");
    }
    return m;
  };

  int nodes = -1;
  Eigen::Matrix3d inertia_default = default_inertia;
  Eigen::Matrix3d coupling_default = default_coupling;
  std::vector<std::array<int, 2>> edges;
  std::vector<Eigen::Matrix3d> edge_tensors;
  std::vector<std::pair<int, Eigen::Matrix3d>> node_overrides;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string keyword;
    if (!(ss >> keyword)) continue;
    std::vector<double> numbers;
    double value = 0.0;
    while (ss >> value) numbers.push_back(value);
    auto fail = [&](const std::string& msg) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (keyword == "nodes") {
      if (numbers.size() != 1) fail("nodes needs one integer");
      nodes = static_cast<int>(numbers[0]);
    } else if (keyword == "edge") {
      if (numbers.size() < 2) fail("edge needs two endpoints");
      edges.push_back({static_cast<int>(numbers[0]), static_cast<int>(numbers[1])});
      edge_tensors.push_back(tensor_from_words(numbers, 2, coupling_default));
    } else if (keyword == "inertia") {
      if (numbers.size() < 4) fail("inertia needs a node index and a tensor");
      node_overrides.emplace_back(static_cast<int>(numbers[0]),
                                  tensor_from_words(numbers, 1, inertia_default));
    } else if (keyword == "default_inertia") {
      inertia_default = tensor_from_words(numbers, 0, default_inertia);
    } else if (keyword == "default_coupling") {
      coupling_default = tensor_from_words(numbers, 0, default_coupling);
      // Couplings already parsed keep their explicit values; plain edges
      // seen before this line keep the previous default.
    } else {
      fail("unknown keyword `" + keyword + "`");
    }
  }
  if (nodes < 1) throw ConfigError(path + ": missing `nodes` line");

  std::vector<Eigen::Matrix3d> inertia(nodes, inertia_default);
  for (const auto& [idx, tensor] : node_overrides) {
    if (idx < 0 || idx >= nodes) {
      throw ConfigError(path + ": inertia override index out of range");
    }
    inertia[idx] = tensor;
  }
  return Network::from_edges(nodes, edges, std::move(inertia),
                             std::move(edge_tensors));
}

ModelKind parse_model(const json& config) {
  const std::string name = config.value("model", "rigid_body");
  if (name == "rigid_body") return ModelKind::RigidBody;
  if (name == "heavy_top") return ModelKind::HeavyTop;
  throw ConfigError("model must be `rigid_body` or `heavy_top`");
}

IntegratorConfig parse_integrator(const json& section) {
  IntegratorConfig cfg;
  if (!section.is_object()) throw ConfigError("missing integrator section");
  cfg.dt = section.value("dt", cfg.dt);
  cfg.steps = section.value("steps", cfg.steps);
  cfg.theta = section.value("theta", cfg.theta);
  cfg.sigma = section.value("sigma", cfg.sigma);
  cfg.record_every = section.value("record_every", cfg.record_every);
  cfg.projection = section.value("projection", cfg.projection);
  cfg.validate();
  return cfg;
}

InitialCondition parse_initial(const json& section) {
  InitialCondition init;
  if (!section.is_object()) return init;
  const std::string policy = section.value("policy", "random_on_orbit");
  if (policy == "random_on_orbit") {
    init.policy = InitialCondition::Policy::RandomOnOrbit;
  } else if (policy == "near_ferro") {
    init.policy = InitialCondition::Policy::NearFerro;
  } else if (policy == "from_file") {
    init.policy = InitialCondition::Policy::FromFile;
    init.path = section.value("path", "");
    if (init.path.empty()) throw ConfigError("from_file needs `path`");
  } else {
    throw ConfigError("unknown initial policy `" + policy + "`");
  }
  init.axis = section.value("axis", init.axis);
  init.perturbation = section.value("perturbation", init.perturbation);
  init.perturbed_nodes = section.value("perturb_nodes", init.perturbed_nodes);
  return init;
}

std::vector<double> parse_temperatures(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else if (j.is_object()) {
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const int count = j.at("count").get<int>();
    if (count < 1) throw ConfigError("temperature count must be >= 1");
    const bool geometric = j.value("spacing", "linear") == "geometric";
    for (int k = 0; k < count; ++k) {
      const double f = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
      out.push_back(geometric ? lo * std::pow(hi / lo, f)
                              : lo + f * (hi - lo));
    }
  } else {
    throw ConfigError("temperatures must be a list or a {min,max,count} range");
  }
  return out;
}

SweepConfig parse_sweep(const json& config, ModelKind model) {
  if (!config.contains("sweep")) throw ConfigError("missing sweep section");
  const json& section = config["sweep"];
  SweepConfig cfg;
  cfg.model = model;
  cfg.temperatures = parse_temperatures(section.at("temperatures"));
  cfg.theta = section.value("theta", cfg.theta);
  cfg.dt = section.value("dt", cfg.dt);
  cfg.steps = section.value("steps", cfg.steps);
  cfg.record_every = section.value("record_every", cfg.record_every);
  cfg.burn_in = section.value("burn_in", cfg.burn_in);
  cfg.replicas = section.value("replicas", cfg.replicas);
  cfg.annealed = section.value("annealed", cfg.annealed);
  cfg.projection = section.value("projection", cfg.projection);
  cfg.base_seed = config.value("seed", 0ull);
  if (config.contains("initial")) {
    const json& init = config["initial"];
    cfg.init = parse_initial(init);
    cfg.radius = init.value("radius", cfg.radius);
    cfg.c1 = init.value("c1", cfg.c1);
    cfg.c2 = init.value("c2", cfg.c2);
  }
  cfg.validate();
  return cfg;
}

MeanFieldOptions parse_meanfield_options(const json& section) {
  MeanFieldOptions opt;
  opt.mc_samples = section.value("mc_samples", opt.mc_samples);
  opt.damping = section.value("damping", opt.damping);
  opt.tol = section.value("tol", opt.tol);
  opt.max_iter = section.value("max_iter", opt.max_iter);
  return opt;
}

json state_to_json(const LatticeState& s) {
  json j;
  j["model"] =
      s.kind() == ModelKind::RigidBody ? "rigid_body" : "heavy_top";
  json momentum = json::array();
  for (const auto& v : s.momentum) momentum.push_back(vec3(v));
  j["momentum"] = std::move(momentum);
  if (s.kind() == ModelKind::HeavyTop) {
    json position = json::array();
    for (const auto& v : s.position) position.push_back(vec3(v));
    j["position"] = std::move(position);
  }
  return j;
}

LatticeState state_from_json(const json& j) {
  LatticeState s;
  for (const auto& v : j.at("momentum")) {
    s.momentum.emplace_back(v[0].get<double>(), v[1].get<double>(),
                            v[2].get<double>());
  }
  if (j.contains("position")) {
    for (const auto& v : j.at("position")) {
      s.position.emplace_back(v[0].get<double>(), v[1].get<double>(),
                              v[2].get<double>());
    }
    if (s.position.size() != s.momentum.size()) {
      throw ConfigError("state momentum/position lengths differ");
    }
  }
  if (!s.finite()) throw ConfigError("state file contains non-finite values");
  return s;
}

void write_state_json(const std::string& path, const LatticeState& s) {
  save_json(path, state_to_json(s));
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  const bool heavy = !traj.states.empty() &&
                     traj.states.front().kind() == ModelKind::HeavyTop;
  if (heavy) {
    out << "time,energy,casimir_c1,casimir_c2,mx,my,mz,gx,gy,gz\n";
  } else {
    out << "time,energy,casimir_total,mx,my,mz\n";
  }
  for (int k = 0; k < traj.samples(); ++k) {
    const Eigen::Vector3d m = mean_momentum(traj.states[k]);
    out << fmt17(traj.times[k]) << ',' << fmt17(traj.energies[k]) << ','
        << fmt17(traj.casimirs[k].total1);
    if (heavy) out << ',' << fmt17(traj.casimirs[k].total2);
    out << ',' << fmt17(m[0]) << ',' << fmt17(m[1]) << ',' << fmt17(m[2]);
    if (heavy) {
      const Eigen::Vector3d g = mean_position(traj.states[k]);
      out << ',' << fmt17(g[0]) << ',' << fmt17(g[1]) << ',' << fmt17(g[2]);
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  auto out = open_out(path);
  out << "temperature,replica,seed,ok,mx,my,mz,mag,gx,gy,gz,"
         "amx,amy,amz,agx,agy,agz,energy_mean,energy_variance,"
         "casimir_drift,drift_flagged,wall_seconds,error\n";
  for (const auto& c : result.cells) {
    const auto& o = c.observables;
    out << fmt17(c.temperature) << ',' << c.replica << ',' << c.seed << ','
        << (c.ok ? 1 : 0);
    const Eigen::Vector3d m = o.mean_momentum;
    const Eigen::Vector3d g = o.mean_position;
    const Eigen::Vector3d am = o.abs_mean_momentum;
    const Eigen::Vector3d ag = o.abs_mean_position;
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(m[i]);
    out << ',' << fmt17(o.magnetisation);
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(g[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(am[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(ag[i]);
    out << ',' << fmt17(o.mean_energy) << ',' << fmt17(o.energy_variance)
        << ',' << fmt17(c.casimir_drift) << ',' << (c.drift_flagged ? 1 : 0)
        << ',' << fmt17(c.wall_seconds) << ',' << c.error << '\n';
  }
}

void write_sweep_json(const std::string& path, const json& config_echo,
                      const SweepResult& result) {
  json j;
  j["config"] = config_echo;
  json aggs = json::array();
  for (const auto& a : result.aggregates) {
    json row;
    row["temperature"] = a.temperature;
    row["cells"] = a.cells;
    row["mean"] = vec3(a.mean);
    row["stddev"] = vec3(a.stddev);
    row["median"] = vec3(a.median);
    row["abs_mean"] = vec3(a.abs_mean);
    row["magnitude_mean"] = a.magnitude_mean;
    row["magnitude_std"] = a.magnitude_std;
    row["magnitude_median"] = a.magnitude_median;
    aggs.push_back(std::move(row));
  }
  j["aggregates"] = std::move(aggs);
  save_json(path, j);
}

void write_records_csv(const std::string& path, const Network& net,
                       const std::vector<EquilibriumRecord>& records) {
  auto out = open_out(path);
  out << "index,group,eigenvalue,lambda1,multiplicity,class,group_mixed,"
         "abscissa,casimir_c1,casimir_c2,rhs_residual\n";
  for (size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    LatticeState field;
    rhs_into(net, r.state, field);
    double field2 = 0.0, state2 = 0.0;
    for (const auto& v : field.momentum) field2 += v.squaredNorm();
    for (const auto& v : field.position) field2 += v.squaredNorm();
    for (const auto& v : r.state.momentum) state2 += v.squaredNorm();
    for (const auto& v : r.state.position) state2 += v.squaredNorm();
    const double residual = std::sqrt(field2 / std::max(state2, 1e-300));
    out << k << ',' << r.group << ',' << fmt17(r.eigenvalue) << ','
        << fmt17(r.lambda1) << ',' << r.multiplicity << ','
        << to_string(r.spin_class) << ',' << (r.group_mixed ? 1 : 0) << ','
        << fmt17(r.spectral_abscissa) << ',' << fmt17(r.casimirs.total1) << ','
        << fmt17(r.casimirs.total2) << ',' << fmt17(residual) << '\n';
  }
}

void write_records_json(const std::string& path, const Network& net,
                        const std::vector<EquilibriumRecord>& records) {
  json j;
  j["coupling"] = records.empty() ||
                          records.front().state.kind() == ModelKind::RigidBody
                      ? "momentum"
                      : "position";
  json rows = json::array();
  for (size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    json row;
    row["index"] = k;
    row["eigenvalue"] = r.eigenvalue;
    row["lambda1"] = r.lambda1;
    row["multiplicity"] = r.multiplicity;
    row["group"] = r.group;
    row["class"] = to_string(r.spin_class);
    row["group_mixed"] = r.group_mixed;
    if (!std::isnan(r.spectral_abscissa)) {
      row["spectral_abscissa"] = r.spectral_abscissa;
    }
    row["casimir_c1"] = r.casimirs.total1;
    if (!r.casimirs.c2.empty()) row["casimir_c2"] = r.casimirs.total2;
    row["state"] = state_to_json(r.state);
    rows.push_back(std::move(row));
  }
  j["records"] = std::move(rows);
  (void)net;
  save_json(path, j);
}

void write_lambda_curves_csv(const std::string& path, const Network& net,
                             const std::vector<double>& lambda1_grid,
                             double c2) {
  auto out = open_out(path);
  out << "lambda1,index,lambda2,class\n";
  for (const double l1 : lambda1_grid) {
    const auto records = position_equilibria(net, l1, c2);
    for (size_t k = 0; k < records.size(); ++k) {
      out << fmt17(l1) << ',' << k << ',' << fmt17(records[k].eigenvalue)
          << ',' << to_string(records[k].spin_class) << '\n';
    }
  }
}

void write_meanfield_csv(const std::string& path,
                         const std::vector<MeanFieldRow>& rows) {
  auto out = open_out(path);
  out << "T,m1,m2,m3,converged,iterations,stderr\n";
  for (const auto& row : rows) {
    const auto& m = row.result.order_parameter;
    out << fmt17(row.temperature) << ',' << fmt17(m[0]) << ',' << fmt17(m[1])
        << ',' << fmt17(m[2]) << ',' << (row.result.converged ? 1 : 0) << ','
        << row.result.iterations << ',' << fmt17(row.result.stderr_est)
        << '\n';
  }
}

void write_transitions_csv(const std::string& path,
                           const std::vector<TransitionEstimate>& transitions) {
  auto out = open_out(path);
  out << "temperature,uncertainty,strength,weak\n";
  for (const auto& t : transitions) {
    out << fmt17(t.temperature) << ',' << fmt17(t.uncertainty) << ','
        << fmt17(t.strength) << ',' << (t.weak ? 1 : 0) << '\n';
  }
}

void read_sweep_series(const std::string& path, const std::string& column,
                       std::vector<double>& temperatures,
                       std::vector<double>& series) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sweep CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty sweep CSV");
  std::vector<std::string> headers;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) headers.push_back(cell);
  }
  int t_col = -1, v_col = -1;
  for (size_t i = 0; i < headers.size(); ++i) {
    if (headers[i] == "temperature") t_col = static_cast<int>(i);
    if (headers[i] == column) v_col = static_cast<int>(i);
  }
  if (t_col < 0 || v_col < 0) {
    throw ConfigError("sweep CSV lacks column `" + column + "`");
  }
  // Average duplicate temperatures (replicas) in file order.
  std::vector<double> t_raw, v_raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    int idx = 0;
    double t = 0.0, v = 0.0;
    bool have_t = false, have_v = false;
    while (std::getline(ss, cell, ',')) {
      if (idx == t_col) {
        t = std::stod(cell);
        have_t = true;
      }
      if (idx == v_col) {
        v = std::stod(cell);
        have_v = true;
      }
      ++idx;
    }
    if (have_t && have_v) {
      t_raw.push_back(t);
      v_raw.push_back(v);
    }
  }
  temperatures.clear();
  series.clear();
  for (size_t i = 0; i < t_raw.size(); ++i) {
    bool seen = false;
    for (const double t : temperatures) seen = seen || t == t_raw[i];
    if (seen) continue;
    double sum = 0.0;
    int count = 0;
    for (size_t j = 0; j < t_raw.size(); ++j) {
      if (t_raw[j] == t_raw[i]) {
        sum += v_raw[j];
        ++count;
      }
    }
    temperatures.push_back(t_raw[i]);
    series.push_back(sum / count);
  }
}

Manifest::Manifest(std::string command, json config_echo, std::uint64_t seed,
                   int threads) {
  doc_["artifact_version"] = kVersion;
  doc_["command"] = std::move(command);
  doc_["config"] = std::move(config_echo);
  doc_["seed"] = seed;
  doc_["threads"] = threads;
  doc_["started"] = iso_now();
  doc_["outputs"] = json::array();
}

void Manifest::add_output(const std::string& path) {
  doc_["outputs"].push_back(path);
}

void Manifest::write(const std::string& path) {
  doc_["finished"] = iso_now();
  save_json(path, doc_);
}

}  // namespace lpnet::io
