#include "pairtunnel/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "pairtunnel/io_util.hpp"

namespace pairtunnel {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

template <typename T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

ModelParams RunConfig::model_params() const {
  ModelParams p;
  p.J = J;
  p.U0 = U0;
  p.U1 = U1;
  p.theta = theta;
  p.num_sites = num_sites;
  p.boundary = boundary;
  return p;
}

PotentialProfile RunConfig::potential() const {
  if (potential_shape == "none") return PotentialProfile::none();
  if (potential_shape == "gaussian") return PotentialProfile::gaussian(V, sigma, center);
  if (potential_shape == "impurity") return PotentialProfile::impurity(V, center);
  if (potential_shape == "box") return PotentialProfile::box(V, site_start, site_end);
  if (potential_shape == "tabulated")
    return PotentialProfile::tabulated(tabulated_values, first_site);
  throw ConfigError("unknown potential shape: " + potential_shape);
}

WavePacketSpec RunConfig::packet() const {
  WavePacketSpec s;
  s.kappa0 = kappa0;
  s.center = packet_center;
  s.sigma = packet_sigma;
  return s;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "model")
      c.model = model_from_string(get_as<std::string>(j, "model"));
    else if (key == "J")
      c.J = get_as<double>(j, "J");
    else if (key == "U0")
      c.U0 = get_as<double>(j, "U0");
    else if (key == "U1")
      c.U1 = get_as<double>(j, "U1");
    else if (key == "theta")
      c.theta = get_as<double>(j, "theta");
    else if (key == "num_sites")
      c.num_sites = get_as<int>(j, "num_sites");
    else if (key == "boundary")
      c.boundary = boundary_from_string(get_as<std::string>(j, "boundary"));
    else if (key == "potential_shape")
      c.potential_shape = get_as<std::string>(j, "potential_shape");
    else if (key == "V")
      c.V = get_as<double>(j, "V");
    else if (key == "sigma")
      c.sigma = get_as<double>(j, "sigma");
    else if (key == "center")
      c.center = get_as<int>(j, "center");
    else if (key == "site_start")
      c.site_start = get_as<int>(j, "site_start");
    else if (key == "site_end")
      c.site_end = get_as<int>(j, "site_end");
    else if (key == "tabulated_values")
      c.tabulated_values = get_as<std::vector<double>>(j, "tabulated_values");
    else if (key == "first_site")
      c.first_site = get_as<int>(j, "first_site");
    else if (key == "kappa0")
      c.kappa0 = get_as<double>(j, "kappa0");
    else if (key == "packet_center")
      c.packet_center = get_as<int>(j, "packet_center");
    else if (key == "packet_sigma")
      c.packet_sigma = get_as<double>(j, "packet_sigma");
    else if (key == "kappa_grid")
      c.kappa_grid = get_as<std::vector<double>>(j, "kappa_grid");
    else if (key == "V_grid")
      c.V_grid = get_as<std::vector<double>>(j, "V_grid");
    else if (key == "theta_grid")
      c.theta_grid = get_as<std::vector<double>>(j, "theta_grid");
    else if (key == "one_state_hopping")
      c.one_state_hopping = get_as<double>(j, "one_state_hopping");
    else if (key == "t_final")
      c.t_final = get_as<double>(j, "t_final");
    else if (key == "sample_every")
      c.sample_every = get_as<double>(j, "sample_every");
    else if (key == "dump_final_state")
      c.dump_final_state = get_as<bool>(j, "dump_final_state");
    else if (key == "out_path")
      c.out_path = get_as<std::string>(j, "out_path");
    else if (key == "format")
      c.format = get_as<std::string>(j, "format");
    else if (key == "threads")
      c.threads = get_as<int>(j, "threads");
    else
      throw ConfigError("unknown config key: " + key);
  }
  if (c.format != "csv" && c.format != "json")
    throw ConfigError("format must be csv or json");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.sample_every <= 0) throw ConfigError("sample_every must be > 0");
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["model"] = to_string(model);
  j["J"] = J;
  j["U0"] = U0;
  j["U1"] = U1;
  j["theta"] = theta;
  j["num_sites"] = num_sites;
  j["boundary"] = to_string(boundary);
  j["potential_shape"] = potential_shape;
  j["V"] = V;
  j["sigma"] = sigma;
  j["center"] = center;
  j["site_start"] = site_start;
  j["site_end"] = site_end;
  j["tabulated_values"] = tabulated_values;
  j["first_site"] = first_site;
  j["kappa0"] = kappa0;
  j["packet_center"] = packet_center;
  j["packet_sigma"] = packet_sigma;
  j["kappa_grid"] = kappa_grid;
  j["V_grid"] = V_grid;
  j["theta_grid"] = theta_grid;
  j["one_state_hopping"] = one_state_hopping;
  j["t_final"] = t_final;
  j["sample_every"] = sample_every;
  j["dump_final_state"] = dump_final_state;
  j["out_path"] = out_path;
  j["format"] = format;
  j["threads"] = threads;
  return j;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

std::string RunConfig::canonical_dump() const { return to_json().dump(); }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.J = 1.0;
  c.potential_shape = "gaussian";
  c.sigma = 0.65;
  c.center = 0;

  if (name == "fig1-left" || name == "fig1-right") {
    c.model = Model::Full;
    c.num_sites = 11;
    c.boundary = Boundary::Periodic;
    c.potential_shape = "none";
    if (name == "fig1-left") {
      c.U0 = -2;
      c.U1 = 0;
    } else {
      c.U0 = -5;
      c.U1 = -3;
    }
    c.theta_grid = linspace(0.0, 2.0 * kPi / 11.0, 41);
    return c;
  }
  if (name == "fig2") {
    // three gap values at fixed kappa = pi/2; the runner emits one series
    // per gap plus the one-state reference
    c.model = Model::TwoState;
    c.U0 = -2;
    c.U1 = 0;
    c.kappa_grid = {0.5 * kPi};
    c.V_grid = linspace(-4.0, 4.0, 161);
    return c;
  }
  if (name == "fig9") {
    c.model = Model::TwoState;
    c.U0 = -4;  // gap 2; the three-state panels use U1 = -2 and U1 = 0
    c.U1 = -2;
    c.kappa_grid = linspace(0.02 * kPi, 0.98 * kPi, 49);
    c.V_grid = linspace(-4.0, 4.0, 81);
    return c;
  }
  if (name == "fig3") {
    c.model = Model::Full;
    c.U0 = -2;
    c.U1 = 0;
    c.V = -2;
    c.num_sites = 201;
    c.boundary = Boundary::Open;
    c.kappa0 = 0.5 * kPi;
    c.packet_center = -60;
    c.packet_sigma = 10;
    c.dump_final_state = true;
    return c;
  }
  if (name == "fig4-top" || name == "fig4-mid" || name == "fig4-bot") {
    c.model = Model::Full;
    if (name == "fig4-top") {
      c.U0 = -8;
      c.U1 = -6;
    } else if (name == "fig4-mid") {
      c.U0 = -4;
      c.U1 = -2;
    } else {
      c.U0 = -2;
      c.U1 = 0;
    }
    c.num_sites = 201;
    c.boundary = Boundary::Open;
    c.kappa0 = 0.5 * kPi;
    c.packet_center = -60;
    c.packet_sigma = 10;
    c.V_grid = linspace(-4.0, 4.0, 33);
    return c;
  }
  if (name == "fig7") {
    c.model = Model::Full;  // the runner adds the two- and three-state traces
    c.U0 = -4;
    c.U1 = -2;
    c.V = -2.2;
    c.num_sites = 201;
    c.boundary = Boundary::Open;
    c.kappa0 = 0.5 * kPi;
    c.packet_center = -60;
    c.packet_sigma = 10;
    return c;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"fig1-left", "fig1-right", "fig2", "fig9", "fig3", "fig4-top", "fig4-mid",
          "fig4-bot", "fig7"};
}

nlohmann::json result_record(const RunConfig& config, const std::string& method,
                             const nlohmann::json& outputs,
                             const std::vector<std::string>& flags) {
  nlohmann::json rec;
  rec["software"] = "pairtunnel";
  rec["version"] = kVersion;
  rec["config"] = config.to_json();
  rec["config_hash"] = fnv1a_hex(config.canonical_dump());
  rec["method"] = method;
  rec["outputs"] = outputs;
  rec["flags"] = flags;
  return rec;
}

}  // namespace pairtunnel
