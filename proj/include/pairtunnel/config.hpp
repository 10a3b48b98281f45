#pragma once

#include <optional>
#include <string>
#include <vector>

// vendored single-header nlohmann/json
#include "json.hpp"

#include "pairtunnel/dynamics.hpp"
#include "pairtunnel/model.hpp"
#include "pairtunnel/potential.hpp"

namespace pairtunnel {

inline constexpr const char* kVersion = "0.1.0";

/// Error in user-supplied configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One fully described run.  Round-trips losslessly through JSON; unknown
/// keys are rejected.  All computations are deterministic: there is no RNG
/// anywhere in the pipeline.
struct RunConfig {
  Model model = Model::TwoState;

  // ModelParams fields
  double J = 1.0;
  double U0 = 0.0;
  double U1 = 0.0;
  double theta = 0.0;
  int num_sites = 201;
  Boundary boundary = Boundary::Open;

  // PotentialProfile fields
  std::string potential_shape = "none";  // none|gaussian|impurity|box|tabulated
  double V = 0.0;
  double sigma = 0.65;
  int center = 0;
  int site_start = 0, site_end = 0;
  std::vector<double> tabulated_values;
  int first_site = 0;

  // WavePacketSpec fields
  double kappa0 = 1.5707963267948966;
  int packet_center = -60;
  double packet_sigma = 10.0;

  // sweep grids
  std::vector<double> kappa_grid;
  std::vector<double> V_grid;
  std::vector<double> theta_grid;

  double one_state_hopping = 0.0;  // 0: half lower-band width
  double t_final = 0.0;            // 0: auto
  double sample_every = 1.0;
  bool dump_final_state = false;

  std::string out_path = "";
  std::string format = "csv";  // csv|json
  int threads = 1;

  ModelParams model_params() const;
  PotentialProfile potential() const;
  WavePacketSpec packet() const;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static RunConfig load_file(const std::string& path);
  std::string canonical_dump() const;  // sorted keys; hashed into outputs
};

/// Named parameter sets reproducing the reference figures.
/// bands:      fig1-left, fig1-right
/// scatter:    fig2, fig9
/// wavepacket: fig3, fig4-top, fig4-mid, fig4-bot, fig7
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Everything needed to re-run a single result standalone.
nlohmann::json result_record(const RunConfig& config, const std::string& method,
                             const nlohmann::json& outputs,
                             const std::vector<std::string>& flags = {});

}  // namespace pairtunnel
