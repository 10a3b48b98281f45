// pairtunnel: command-line front end for the two-boson tunneling laboratory.
//
// Subcommands: bands | scatter | wavepacket | verify
// Exit codes:  0 success, 1 physics/acceptance failure, 2 usage/config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "json.hpp"

#include "pairtunnel/config.hpp"
#include "pairtunnel/dynamics.hpp"
#include "pairtunnel/hamiltonian.hpp"
#include "pairtunnel/io_util.hpp"
#include "pairtunnel/scattering.hpp"
#include "pairtunnel/spectral.hpp"
#include "pairtunnel/verify.hpp"

namespace pt = pairtunnel;
using nlohmann::json;

namespace {

struct CliArgs {
  std::string config_path;
  std::string preset_name;
  std::string out_path;
  std::string format;
  int threads = 0;
};

pt::RunConfig resolve_config(const CliArgs& args) {
  json merged;
  if (!args.preset_name.empty()) merged = pt::preset(args.preset_name).to_json();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw pt::ConfigError("cannot open config file: " + args.config_path);
    json file;
    try {
      in >> file;
    } catch (const json::exception& e) {
      throw pt::ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!file.is_object()) throw pt::ConfigError("config must be a JSON object");
    if (merged.is_null()) merged = json::object();
    for (auto& [k, v] : file.items()) merged[k] = v;
  }
  if (merged.is_null())
    throw pt::ConfigError("provide --config and/or --preset (see --help)");
  pt::RunConfig cfg = pt::RunConfig::from_json(merged);
  if (!args.out_path.empty()) cfg.out_path = args.out_path;
  if (!args.format.empty()) cfg.format = args.format;
  if (args.threads > 0) cfg.threads = args.threads;
  return cfg;
}

std::string stem_path(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / p.stem();
  return out.string() + suffix;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

void stamp(pt::CsvWriter& csv, const pt::RunConfig& cfg) {
  csv.comment("pairtunnel " + std::string(pt::kVersion));
  csv.comment("config_hash " + pt::fnv1a_hex(cfg.canonical_dump()));
  csv.comment("config " + cfg.canonical_dump());
}

// ---- bands ----------------------------------------------------------------

int cmd_bands(const pt::RunConfig& cfg) {
  if (cfg.theta_grid.empty())
    throw pt::ConfigError("bands needs a non-empty theta_grid");
  const pt::ModelParams params = cfg.model_params();
  const auto spectra = pt::band_structure_full(params, cfg.theta_grid);

  const std::string out = cfg.out_path.empty() ? "bands.csv" : cfg.out_path;
  pt::CsvWriter csv(out);
  stamp(csv, cfg);
  csv.header({"theta", "eigenvalue_index", "E"});
  for (size_t i = 0; i < spectra.size(); ++i)
    for (int n = 0; n < spectra[i].size(); ++n)
      csv.row({pt::format_double(cfg.theta_grid[i]), std::to_string(n),
               pt::format_double(spectra[i][n])});

  // analytic overlay on a fine quasimomentum grid
  pt::CsvWriter overlay(stem_path(out, "_analytic.csv"));
  stamp(overlay, cfg);
  overlay.header({"kappa", "branch", "E_analytic"});
  const int fine = 257;
  for (int i = 0; i < fine; ++i) {
    const double kappa = -std::numbers::pi + 2.0 * std::numbers::pi * i / (fine - 1);
    if (cfg.U1 == 0.0) {
      overlay.row({pt::format_double(kappa), "exact",
                   pt::format_double(pt::dispersion_exact(params, kappa))});
    } else {
      overlay.row({pt::format_double(kappa), "lower",
                   pt::format_double(pt::dispersion_two_state(params, kappa, pt::Band::Lower))});
      overlay.row({pt::format_double(kappa), "upper",
                   pt::format_double(pt::dispersion_two_state(params, kappa, pt::Band::Upper))});
    }
  }
  std::cout << "bands: wrote " << out << " and " << stem_path(out, "_analytic.csv") << "\n";
  return 0;
}

// ---- scatter ---------------------------------------------------------------

struct SweepSeries {
  std::string label;
  pt::Model model;
  pt::ModelParams params;
  pt::ScatterOptions options;
};

int cmd_scatter(const pt::RunConfig& cfg, const std::string& preset_name) {
  if (cfg.kappa_grid.empty() || cfg.V_grid.empty())
    throw pt::ConfigError("scatter needs non-empty kappa_grid and V_grid");
  const pt::PotentialProfile tmpl = cfg.potential();
  if (tmpl.shape() == pt::PotentialProfile::Shape::None)
    throw pt::ConfigError("scatter needs a parametric potential shape");

  std::vector<SweepSeries> series;
  if (preset_name == "fig2") {
    for (double gap : {1.0, 2.0, 4.0}) {
      pt::ModelParams p = cfg.model_params();
      p.U0 = -gap;
      p.U1 = 0;
      pt::ScatterOptions opt;
      series.push_back({"two-state gap=" + pt::format_double(gap), pt::Model::TwoState, p, opt});
      series.push_back({"one-state gap=" + pt::format_double(gap), pt::Model::OneState, p, opt});
    }
  } else if (preset_name == "fig9") {
    pt::ModelParams p = cfg.model_params();  // (U0, U1) = (-4, -2), gap 2
    pt::ScatterOptions opt;
    series.push_back({"one-state", pt::Model::OneState, p, opt});
    series.push_back({"two-state", pt::Model::TwoState, p, opt});
    series.push_back({"three-state u1=-2", pt::Model::ThreeState, p, opt});
    pt::ModelParams p0 = p;
    p0.U0 = -2;
    p0.U1 = 0;
    series.push_back({"three-state u1=0", pt::Model::ThreeState, p0, opt});
  } else {
    pt::ScatterOptions opt;
    opt.one_state_hopping = cfg.one_state_hopping;
    series.push_back({pt::to_string(cfg.model), cfg.model, cfg.model_params(), opt});
  }

  const std::string out = cfg.out_path.empty() ? "scatter.csv" : cfg.out_path;
  pt::CsvWriter csv(out);
  stamp(csv, cfg);
  csv.header({"series", "model", "gap", "kappa", "V", "P_t", "P_r", "flag"});
  for (const auto& s : series) {
    const auto table = pt::sweep_tunneling(s.model, s.params, tmpl, cfg.kappa_grid,
                                           cfg.V_grid, s.options, cfg.threads);
    for (const auto& point : table)
      csv.row({s.label, pt::to_string(point.model), pt::format_double(s.params.gap()),
               pt::format_double(point.kappa), pt::format_double(point.V),
               pt::format_double(point.P_t), pt::format_double(point.P_r),
               point.flagged ? "1" : "0"});
  }
  std::cout << "scatter: wrote " << out << "\n";
  return 0;
}

// ---- wavepacket ------------------------------------------------------------

void write_traces_csv(const std::string& path, const pt::RunConfig& cfg,
                      const pt::OccupationTraces& traces) {
  pt::CsvWriter csv(path);
  stamp(csv, cfg);
  csv.header({"t", "same_site", "adjacent", "separated", "separated_by_one"});
  for (size_t i = 0; i < traces.times.size(); ++i)
    csv.row({pt::format_double(traces.times[i]), pt::format_double(traces.same_site[i]),
             pt::format_double(traces.adjacent[i]), pt::format_double(traces.separated[i]),
             pt::format_double(i < traces.separated_by_one.size()
                                   ? traces.separated_by_one[i]
                                   : 0.0)});
}

json outcomes_json(const pt::ExperimentResult& r) {
  json o;
  o["P_t"] = r.outcomes.transmitted;
  o["P_r"] = r.outcomes.reflected;
  o["P_d"] = r.outcomes.dissociated;
  o["unclassified"] = r.outcomes.unclassified;
  o["barrier_halfwidth"] = r.outcomes.barrier_halfwidth;
  o["bound_separation"] = r.outcomes.bound_separation;
  o["t_final"] = r.t_final;
  o["group_velocity"] = r.group_velocity;
  o["initial_energy"] = r.initial_energy;
  o["norm_drift_per_time"] = r.report.norm_drift_per_time;
  o["energy_drift_relative"] = r.report.energy_drift_relative;
  return o;
}

pt::ExperimentOptions experiment_options(const pt::RunConfig& cfg) {
  pt::ExperimentOptions opt;
  opt.t_final = cfg.t_final;
  opt.sample_every = cfg.sample_every;
  opt.scatter.one_state_hopping = cfg.one_state_hopping;
  return opt;
}

int cmd_wavepacket(const pt::RunConfig& cfg, const std::string& preset_name) {
  const std::string out = cfg.out_path.empty() ? "wavepacket.json" : cfg.out_path;

  if (preset_name == "fig7") {
    // family traces of the two-state, three-state and full models
    json runs;
    for (pt::Model model : {pt::Model::TwoState, pt::Model::ThreeState, pt::Model::Full}) {
      pt::ExperimentOptions opt = experiment_options(cfg);
      const pt::ExperimentResult r = pt::run_scattering_experiment(
          model, cfg.model_params(), cfg.potential(), cfg.packet(), opt);
      const std::string path = stem_path(out, "_" + pt::to_string(model) + ".csv");
      write_traces_csv(path, cfg, r.traces);
      runs[pt::to_string(model)] = outcomes_json(r);
      std::cout << "wavepacket: wrote " << path << "\n";
    }
    write_json_file(out, pt::result_record(cfg, "dynamics", runs));
    std::cout << "wavepacket: wrote " << out << "\n";
    return 0;
  }

  if (preset_name.rfind("fig4", 0) == 0) {
    if (cfg.V_grid.empty()) throw pt::ConfigError("fig4 presets need a V_grid");
    const pt::PotentialProfile tmpl = cfg.potential();
    std::vector<json> rows(cfg.V_grid.size());
    pt::parallel_for_indexed(static_cast<int>(cfg.V_grid.size()), cfg.threads, [&](int i) {
      const double v = cfg.V_grid[static_cast<size_t>(i)];
      pt::ExperimentOptions opt = experiment_options(cfg);
      opt.sample_every = 1e9;  // classification only
      const pt::ExperimentResult r = pt::run_scattering_experiment(
          pt::Model::Full, cfg.model_params(), tmpl.with_amplitude(v), cfg.packet(), opt);
      const pt::ScatterSolution tm = pt::solve_scattering(
          pt::Model::TwoState, cfg.model_params(), tmpl.with_amplitude(v), cfg.kappa0);
      json row;
      row["V"] = v;
      row["P_t"] = r.outcomes.transmitted;
      row["P_d"] = r.outcomes.dissociated;
      row["P_r"] = r.outcomes.reflected;
      row["unclassified"] = r.outcomes.unclassified;
      row["P_t_two_state_tm"] = tm.P_t;
      rows[static_cast<size_t>(i)] = row;
    });

    const std::string csv_path = stem_path(out, ".csv");
    pt::CsvWriter csv(csv_path);
    stamp(csv, cfg);
    csv.header({"V", "P_t", "P_d", "P_r", "unclassified", "P_t_two_state_tm"});
    json arr = json::array();
    for (const auto& row : rows) {
      csv.row({pt::format_double(row["V"].get<double>()),
               pt::format_double(row["P_t"].get<double>()),
               pt::format_double(row["P_d"].get<double>()),
               pt::format_double(row["P_r"].get<double>()),
               pt::format_double(row["unclassified"].get<double>()),
               pt::format_double(row["P_t_two_state_tm"].get<double>())});
      arr.push_back(row);
    }
    write_json_file(out, pt::result_record(cfg, "dynamics+tm", json{{"scan", arr}}));
    std::cout << "wavepacket: wrote " << out << " and " << csv_path << "\n";
    return 0;
  }

  // single run of the configured model
  pt::ExperimentOptions opt = experiment_options(cfg);
  opt.keep_final_state = cfg.dump_final_state && cfg.model == pt::Model::Full;
  const pt::ExperimentResult r = pt::run_scattering_experiment(
      cfg.model, cfg.model_params(), cfg.potential(), cfg.packet(), opt);

  write_json_file(out, pt::result_record(cfg, "dynamics", outcomes_json(r)));
  write_traces_csv(stem_path(out, "_traces.csv"), cfg, r.traces);
  std::cout << "wavepacket: wrote " << out << " and " << stem_path(out, "_traces.csv") << "\n";

  if (opt.keep_final_state && r.final_state) {
    const std::string snap = stem_path(out, "_snapshot.csv");
    pt::CsvWriter csv(snap);
    stamp(csv, cfg);
    csv.header({"l", "m", "probability"});
    const pt::ModelParams params = cfg.model_params();
    const pt::PairBasis basis(params.num_sites);
    for (int idx = 0; idx < basis.dim(); ++idx) {
      const auto [i, j] = basis.pair_at(idx);
      csv.row({std::to_string(i + params.min_site()), std::to_string(j + params.min_site()),
               pt::format_double(std::norm((*r.final_state)[idx]))});
    }
    std::cout << "wavepacket: wrote " << snap << "\n";
  }

  if (cfg.model == pt::Model::Full && r.outcomes.unclassified > 1e-3) {
    std::cerr << "wavepacket: classification rejected, unclassified mass "
              << pt::format_double(r.outcomes.unclassified)
              << " > 1e-3 (enlarge the lattice or the propagation time)\n";
    return 1;
  }
  return 0;
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const CliArgs& args) {
  const int threads = args.threads > 0 ? args.threads : 1;
  const auto results = pt::run_acceptance_checks(threads);
  json arr = json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("%s  %2d. %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
    if (!r.details.empty()) std::printf("      %s\n", r.details.c_str());
    json item;
    item["id"] = r.id;
    item["name"] = r.name;
    item["pass"] = r.pass;
    item["details"] = r.details;
    item["seconds"] = r.seconds;
    arr.push_back(item);
  }
  json summary;
  summary["software"] = "pairtunnel";
  summary["version"] = pt::kVersion;
  summary["all_pass"] = all_pass;
  summary["checks"] = arr;
  const std::string out = args.out_path.empty() ? "verify.json" : args.out_path;
  write_json_file(out, summary);
  std::printf("%s (%zu checks); summary written to %s\n", all_pass ? "ALL PASS" : "FAILURES",
              results.size(), out.c_str());
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairtunnel: two-boson tunneling laboratory for 1D lattices"};
  app.require_subcommand(1);

  CliArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON run configuration");
    sub->add_option("--preset", args.preset_name, "named parameter preset");
    sub->add_option("--out", args.out_path, "output path");
    sub->add_option("--format", args.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", args.threads, "worker threads for sweeps");
  };

  CLI::App* bands = app.add_subcommand("bands", "band-structure sampling over the Peierls phase");
  CLI::App* scatter = app.add_subcommand("scatter", "transfer-matrix tunneling sweeps");
  CLI::App* wavepacket = app.add_subcommand("wavepacket", "wave-packet scattering experiments");
  CLI::App* verify = app.add_subcommand("verify", "run the physics acceptance suite");
  for (CLI::App* sub : {bands, scatter, wavepacket, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(args);
    const pt::RunConfig cfg = resolve_config(args);
    if (bands->parsed()) return cmd_bands(cfg);
    if (scatter->parsed()) return cmd_scatter(cfg, args.preset_name);
    if (wavepacket->parsed()) return cmd_wavepacket(cfg, args.preset_name);
  } catch (const pt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
