#include "pairtunnel/verify.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pairtunnel/dynamics.hpp"
#include "pairtunnel/hamiltonian.hpp"
#include "pairtunnel/io_util.hpp"
#include "pairtunnel/scattering.hpp"
#include "pairtunnel/spectral.hpp"

namespace pairtunnel {

namespace {

constexpr double kPi = std::numbers::pi;

// Reference values pinned from the committed reference run of this code
// (model-derived regression anchors, not quantities taken from elsewhere).
constexpr double kPinnedResonanceV = -2.29;      // check 8: two-state peak location
constexpr double kPinnedResonancePt = 0.99992;   // check 8: two-state peak height
constexpr double kPinnedFig3Pt = 0.03421;        // check 9
constexpr double kPinnedFig3Pr = 0.50760;        // check 9
constexpr double kPinnedFig3Pd = 0.45744;        // check 9

std::string fmt(double v) { return format_double(v); }

struct Scoped {
  std::ostringstream details;
  bool pass = true;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details << "[FAIL " << what << "] ";
    }
  }
  void note(const std::string& what) { details << what << "; "; }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

Eigen::VectorXd sorted_eigenvalues(const SparseMatrixXc& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(h),
                                                         Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

// ---- checks ---------------------------------------------------------------

Scoped check_two_state_closed_form() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -5;
  p.U1 = -3;
  p.num_sites = 64;
  p.boundary = Boundary::Periodic;
  const Eigen::VectorXd ev = sorted_eigenvalues(build_two_state_hamiltonian(p, PotentialProfile::none()));

  std::vector<double> expected;
  for (int n = 0; n < 64; ++n) {
    const double kappa = 2.0 * kPi * n / 64.0;
    expected.push_back(dispersion_two_state(p, kappa, Band::Lower));
    expected.push_back(dispersion_two_state(p, kappa, Band::Upper));
  }
  std::sort(expected.begin(), expected.end());
  double worst = 0;
  for (int i = 0; i < ev.size(); ++i)
    worst = std::max(worst, std::abs(ev[i] - expected[static_cast<size_t>(i)]));
  s.note("max |eig - closed form| = " + fmt(worst));
  s.require(worst <= 1e-12, "two-state spectrum vs closed form at 1e-12");
  return s;
}

Scoped check_exact_band() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -2;
  p.U1 = 0;
  p.num_sites = 11;
  p.boundary = Boundary::Periodic;
  const Eigen::VectorXd ev = sorted_eigenvalues(build_full_hamiltonian(p, PotentialProfile::none()));

  std::vector<double> expected;
  for (int n = 0; n < 11; ++n)
    expected.push_back(dispersion_exact(p, 2.0 * kPi * n / 11.0));
  std::sort(expected.begin(), expected.end());
  double worst = 0;
  for (size_t i = 0; i < expected.size(); ++i)
    worst = std::max(worst, std::abs(ev[static_cast<int>(i)] - expected[i]));
  s.note("max |bound band - exact dispersion| = " + fmt(worst));
  s.require(worst <= 1e-2, "11 lowest eigenvalues vs exact dispersion at 1e-2");
  return s;
}

Scoped check_wannier_amplitudes() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = 0;
  const WannierState w = wannier_states(p);
  const double onsite = w.amplitude_at(0, two_comp::onsite);
  const double left = w.amplitude_at(-1, two_comp::adjacent);
  const double right = w.amplitude_at(0, two_comp::adjacent);
  s.note("onsite = " + fmt(onsite) + ", neighbors = " + fmt(left) + ", " + fmt(right));
  s.require(std::abs(onsite - 0.975) <= 5e-3, "onsite amplitude 0.975 +- 5e-3");
  s.require(std::abs(left - 0.157) <= 5e-3, "left neighbor amplitude 0.157 +- 5e-3");
  s.require(std::abs(right - 0.157) <= 5e-3, "right neighbor amplitude 0.157 +- 5e-3");
  return s;
}

Scoped check_bandwidth_and_dominant_hopping() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = -2;  // gap 2
  const double width = dispersion_two_state(p, kPi, Band::Lower) -
                       dispersion_two_state(p, 0.0, Band::Lower);
  const double expected_width = std::sqrt(3.0) - 1.0;
  s.note("lower-band width = " + fmt(width));
  s.require(std::abs(width - expected_width) <= 1e-4, "band width sqrt(3)-1 at 1e-4");

  const EffectiveHoppings fitted = hopping_integrals(p, HoppingMethod::FittedFromBand, 8);
  const double i1 = fitted.values[1];
  s.note("fitted I_1 = " + fmt(i1));
  s.require(std::abs(i1 - 0.36603) <= 0.15 * 0.36603, "dominant I_1 within 15% of 0.36603");
  return s;
}

Scoped check_transfer_sanity() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = -2;

  // determinants
  double worst_det1 = 0, worst_det2 = 0, worst_det3 = 0;
  for (double eps : {0.0, -1.3, 0.7, 2.2}) {
    for (double e : {-4.4, -4.1, -3.6}) {
      worst_det1 = std::max(worst_det1,
                            std::abs(tm_one_state(e, 0.366, eps).matrix.determinant() - 1.0));
      worst_det2 = std::max(
          worst_det2, std::abs(tm_two_state(p, e, eps, 0.4 * eps).matrix.determinant() - 1.0));
      const TransferStep t3 = tm_three_state(p, e, eps, 0.4 * eps, 0.1 * eps);
      worst_det3 = std::max(worst_det3, std::abs(t3.matrix.determinant()));
    }
  }
  s.note("det defects: one " + fmt(worst_det1) + ", two " + fmt(worst_det2) + ", three " +
         fmt(worst_det3));
  s.require(worst_det1 <= 1e-14, "one-state det = 1 at 1e-14");
  s.require(worst_det2 <= 1e-14, "two-state det = 1 at 1e-14");
  s.require(worst_det3 <= 1e-12, "three-state det = 0 at 1e-12");

  // flux conservation and transparency at V = 0
  const PotentialProfile tmpl = PotentialProfile::gaussian(1.0, 0.65, 0);
  const std::vector<double> v_grid = linspace(-4.0, 4.0, 100);
  for (Model model : {Model::OneState, Model::TwoState, Model::ThreeState}) {
    double worst_flux = 0;
    int flagged = 0;
    for (double v : v_grid) {
      const ScatterSolution sol =
          solve_scattering(model, p, tmpl.with_amplitude(v), 0.5 * kPi);
      if (sol.flagged()) {
        ++flagged;
        continue;
      }
      worst_flux = std::max(worst_flux, std::abs(sol.P_t + sol.P_r - 1.0));
    }
    const ScatterSolution free_sol =
        solve_scattering(model, p, tmpl.with_amplitude(0.0), 0.5 * kPi);
    s.note(to_string(model) + ": max |P_t+P_r-1| = " + fmt(worst_flux) + ", flagged " +
           std::to_string(flagged) + ", P_t(0) = " + fmt(free_sol.P_t));
    s.require(worst_flux <= 1e-10, to_string(model) + " flux conservation at 1e-10");
    s.require(std::abs(free_sol.P_t - 1.0) <= 1e-10, to_string(model) + " P_t(0) = 1");
    s.require(flagged == 0, to_string(model) + " no flagged points on the grid");
  }
  return s;
}

Scoped check_barrier_well_symmetry() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = -2;
  ScatterOptions opt;
  opt.one_state_hopping = half_bandwidth(p);
  const PotentialProfile tmpl = PotentialProfile::gaussian(1.0, 0.65, 0);
  double worst = 0;
  for (double v : linspace(0.0, 3.0, 31)) {
    const double plus =
        solve_scattering(Model::OneState, p, tmpl.with_amplitude(v), 0.5 * kPi, opt).P_t;
    const double minus =
        solve_scattering(Model::OneState, p, tmpl.with_amplitude(-v), 0.5 * kPi, opt).P_t;
    worst = std::max(worst, std::abs(plus - minus));
  }
  s.note("max |P_t(V) - P_t(-V)| = " + fmt(worst));
  s.require(worst <= 1e-10, "barrier/well symmetry at kappa = pi/2 within 1e-10");
  return s;
}

Scoped check_stationary_dynamic_agreement() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = -2;
  p.num_sites = 601;
  p.boundary = Boundary::Open;
  const PotentialProfile tmpl = PotentialProfile::gaussian(1.0, 0.65, 0);
  WavePacketSpec spec;
  spec.kappa0 = 0.5 * kPi;
  spec.center = -150;
  spec.sigma = 20;
  ExperimentOptions opt;
  opt.scatter.one_state_hopping = half_bandwidth(p);

  for (Model model : {Model::OneState, Model::TwoState}) {
    for (double v : {-2.0, -1.0, 0.5, 1.0}) {
      const PotentialProfile profile = tmpl.with_amplitude(v);
      ExperimentOptions run_opt = opt;
      const ExperimentResult dyn = run_scattering_experiment(model, p, profile, spec, run_opt);
      const ScatterSolution tm =
          solve_scattering(model, p, profile, spec.kappa0, opt.scatter);
      const double diff = std::abs(dyn.outcomes.transmitted - tm.P_t);
      s.note(to_string(model) + " V=" + fmt(v) + ": dyn " + fmt(dyn.outcomes.transmitted) +
             " vs tm " + fmt(tm.P_t));
      s.require(diff <= 0.02, to_string(model) + " dynamic vs stationary at V=" + fmt(v));
    }
  }
  return s;
}

Scoped check_resonance_window() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = -2;
  ScatterOptions opt;
  opt.one_state_hopping = half_bandwidth(p);
  const PotentialProfile tmpl = PotentialProfile::gaussian(1.0, 0.65, 0);
  const double kappa = 0.5 * kPi;

  const std::vector<double> v_grid = linspace(-4.0, -1.0, 301);
  std::vector<double> p_two(v_grid.size());
  for (size_t i = 0; i < v_grid.size(); ++i)
    p_two[i] = solve_scattering(Model::TwoState, p, tmpl.with_amplitude(v_grid[i]), kappa, opt).P_t;

  // most transmissive interior local maximum
  int best = -1;
  for (size_t i = 1; i + 1 < v_grid.size(); ++i)
    if (p_two[i] > p_two[i - 1] && p_two[i] > p_two[i + 1])
      if (best < 0 || p_two[i] > p_two[static_cast<size_t>(best)]) best = static_cast<int>(i);
  s.require(best >= 0, "two-state P_t has a local maximum on V in (-4, -1)");
  if (best < 0) return s;

  const double v_peak = v_grid[static_cast<size_t>(best)];
  const double pt_two = p_two[static_cast<size_t>(best)];
  const double pt_one =
      solve_scattering(Model::OneState, p, tmpl.with_amplitude(v_peak), kappa, opt).P_t;
  const double pt_three =
      solve_scattering(Model::ThreeState, p, tmpl.with_amplitude(v_peak), kappa, opt).P_t;
  s.note("peak at V = " + fmt(v_peak) + ": two " + fmt(pt_two) + ", one " + fmt(pt_one) +
         ", three " + fmt(pt_three));
  s.require(pt_two > pt_one, "resonant two-state P_t exceeds the one-state value");
  s.require(pt_three < pt_two, "three-state P_t strictly below the two-state peak");
  s.require(std::abs(v_peak - kPinnedResonanceV) <= 0.02 + 1e-12,
            "peak location matches the pinned reference");
  s.require(std::abs(pt_two - kPinnedResonancePt) <= 0.02,
            "peak height matches the pinned reference");
  return s;
}

Scoped check_full_sum_rules() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -2;
  p.U1 = 0;
  p.num_sites = 201;
  p.boundary = Boundary::Open;
  const PotentialProfile profile = PotentialProfile::gaussian(-2.0, 0.65, 0);
  WavePacketSpec spec;
  spec.kappa0 = 0.5 * kPi;
  spec.center = -60;
  spec.sigma = 10;

  ExperimentOptions opt;
  // On 201 sites the dissociated boson reflects off the open edge and
  // re-enters the barrier region shortly after t = 294, so stop the run just
  // under twice the barrier-arrival time (147).  A 301-site control run gives
  // identical probabilities with zero unclassified mass.
  opt.t_final = 290.0;
  const ExperimentResult r = run_scattering_experiment(Model::Full, p, profile, spec, opt);
  const OutcomeProbs& o = r.outcomes;
  const double sum = o.transmitted + o.reflected + o.dissociated + o.unclassified;
  s.note("P_t = " + fmt(o.transmitted) + ", P_r = " + fmt(o.reflected) + ", P_d = " +
         fmt(o.dissociated) + ", unclassified = " + fmt(o.unclassified));
  s.note("norm drift/time = " + fmt(r.report.norm_drift_per_time) + ", energy drift = " +
         fmt(r.report.energy_drift_relative));
  s.require(r.report.norm_drift_per_time <= 1e-8, "norm drift <= 1e-8 per unit time");
  s.require(r.report.energy_drift_relative <= 1e-8, "relative energy drift <= 1e-8");
  s.require(std::abs(sum - 1.0) <= 1e-8, "outcome probabilities sum to 1");
  s.require(o.unclassified <= 1e-3, "unclassified mass <= 1e-3");
  s.require(o.dissociated > 1e-2, "dissociation clearly open (P_d > 1e-2)");
  s.require(std::abs(o.transmitted - kPinnedFig3Pt) <= 5e-3, "P_t matches pinned reference");
  s.require(std::abs(o.reflected - kPinnedFig3Pr) <= 5e-3, "P_r matches pinned reference");
  s.require(std::abs(o.dissociated - kPinnedFig3Pd) <= 5e-3, "P_d matches pinned reference");
  return s;
}

struct DipScan {
  double peak_v = 0, peak_pt = 0;
  bool peak_found = false;
  bool dip_found = false;
  double dip_v = 0, dip_pd = 0;
  double channel_margin = 0;  // dissociation energy margin at the peak
};

DipScan dissociation_dip_scan(double u0, double u1, const std::vector<double>& v_grid,
                              int threads) {
  ModelParams p;
  p.J = 1;
  p.U0 = u0;
  p.U1 = u1;
  p.num_sites = 201;
  p.boundary = Boundary::Open;
  const PotentialProfile tmpl = PotentialProfile::gaussian(1.0, 0.65, 0);
  WavePacketSpec spec;
  spec.kappa0 = 0.5 * kPi;
  spec.center = -60;
  spec.sigma = 10;

  std::vector<double> pt(v_grid.size()), pd(v_grid.size());
  parallel_for_indexed(static_cast<int>(v_grid.size()), threads, [&](int i) {
    ExperimentOptions run;
    run.sample_every = 1e9;  // classification only, no intermediate samples
    run.t_final = 290.0;     // see the sum-rule check: stay ahead of edge bounces
    const ExperimentResult r = run_scattering_experiment(
        Model::Full, p, tmpl.with_amplitude(v_grid[static_cast<size_t>(i)]), spec, run);
    pt[static_cast<size_t>(i)] = r.outcomes.transmitted;
    pd[static_cast<size_t>(i)] = r.outcomes.dissociated;
  });

  DipScan out;
  // resonant feature: most transmissive interior local maximum of P_t
  int peak = -1;
  for (size_t i = 1; i + 1 < v_grid.size(); ++i)
    if (pt[i] > pt[i - 1] && pt[i] > pt[i + 1])
      if (peak < 0 || pt[i] > pt[static_cast<size_t>(peak)]) peak = static_cast<int>(i);
  if (peak < 0) return out;
  out.peak_found = true;
  out.peak_v = v_grid[static_cast<size_t>(peak)];
  out.peak_pt = pt[static_cast<size_t>(peak)];
  dissociation_channel_open(p, tmpl.with_amplitude(out.peak_v), spec.kappa0,
                            &out.channel_margin);

  // strict local minimum of P_d within one grid step of the peak
  for (int di = -1; di <= 1; ++di) {
    const int i = peak + di;
    if (i <= 0 || i + 1 >= static_cast<int>(v_grid.size())) continue;
    const size_t u = static_cast<size_t>(i);
    if (pd[u] < pd[u - 1] && pd[u] < pd[u + 1]) {
      out.dip_found = true;
      out.dip_v = v_grid[u];
      out.dip_pd = pd[u];
    }
  }
  return out;
}

Scoped check_dissociation_dip(int threads) {
  Scoped s;
  // the criterion's configuration
  const DipScan mid = dissociation_dip_scan(-4, -2, linspace(-4.4, -1.2, 33), threads);
  s.require(mid.peak_found, "(-4,-2) scan has a resonant P_t maximum");
  if (mid.peak_found)
    s.note("(-4,-2): P_t peak at V = " + fmt(mid.peak_v) + " (P_t = " + fmt(mid.peak_pt) +
           "), dissociation margin there = " + fmt(mid.channel_margin) +
           (mid.dip_found ? ", P_d dip at V = " + fmt(mid.dip_v) : ", no P_d dip"));
  s.require(mid.dip_found,
            "(-4,-2) P_d has a local minimum within one grid step of the resonance");

  // control: same predicate where the dissociation channel is open at the
  // resonance; documents that the co-located dip physics is reproduced
  const DipScan bot = dissociation_dip_scan(-2, 0, linspace(-3.0, -1.2, 10), threads);
  if (bot.peak_found)
    s.note("(-2,0): P_t peak at V = " + fmt(bot.peak_v) + " (P_t = " + fmt(bot.peak_pt) +
           "), margin = " + fmt(bot.channel_margin) +
           (bot.dip_found ? ", P_d dip at V = " + fmt(bot.dip_v) + " (P_d = " +
                                fmt(bot.dip_pd) + ")"
                          : ", no P_d dip"));
  return s;
}

Scoped check_traces_three_vs_full() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -4;
  p.U1 = -2;
  p.num_sites = 201;
  p.boundary = Boundary::Open;
  const PotentialProfile profile = PotentialProfile::gaussian(-2.2, 0.65, 0);
  WavePacketSpec spec;
  spec.kappa0 = 0.5 * kPi;
  spec.center = -60;
  spec.sigma = 10;

  const ExperimentResult full = run_scattering_experiment(Model::Full, p, profile, spec);
  const ExperimentResult three = run_scattering_experiment(Model::ThreeState, p, profile, spec);

  // transit window: packet center within (3 sigma + barrier halfwidth) of the well
  const double v = std::abs(full.group_velocity);
  const double t_hit = std::abs(spec.center) / v;
  const double halfwindow = (3.0 * spec.sigma + full.outcomes.barrier_halfwidth) / v;

  double worst = 0, worst_three_sep = 0;
  const size_t n = std::min(full.traces.times.size(), three.traces.times.size());
  for (size_t i = 0; i < n; ++i) {
    const double t = full.traces.times[i];
    worst_three_sep = std::max(worst_three_sep, three.traces.separated[i]);
    if (std::abs(t - t_hit) > halfwindow) continue;
    worst = std::max({worst,
                      std::abs(full.traces.same_site[i] - three.traces.same_site[i]),
                      std::abs(full.traces.adjacent[i] - three.traces.adjacent[i]),
                      std::abs(full.traces.separated[i] - three.traces.separated[i])});
  }
  s.note("max family-trace deviation over transit = " + fmt(worst));
  s.note("max three-state separated-family occupation = " + fmt(worst_three_sep));
  s.require(worst <= 0.05, "three-state traces track the full model within 0.05");
  s.require(worst_three_sep < 0.05, "separated family stays below 0.05 throughout");
  return s;
}

Scoped check_gauge_invariance() {
  Scoped s;
  ModelParams p;
  p.J = 1;
  p.U0 = -2;
  p.U1 = 0;
  p.num_sites = 11;
  p.boundary = Boundary::Periodic;
  p.theta = 0.3;
  const Eigen::VectorXd ev1 = sorted_eigenvalues(build_full_hamiltonian(p, PotentialProfile::none()));
  p.theta = 0.3 + 2.0 * kPi / 11.0;
  const Eigen::VectorXd ev2 = sorted_eigenvalues(build_full_hamiltonian(p, PotentialProfile::none()));
  const double worst = (ev1 - ev2).cwiseAbs().maxCoeff();
  s.note("max spectral shift under one flux quantum = " + fmt(worst));
  s.require(worst <= 1e-10, "spectra at theta and theta + 2 pi / 11 coincide at 1e-10");
  return s;
}

struct CheckSpec {
  const char* name;
  Scoped (*fn)(int threads);
};

Scoped wrap_two_state_closed_form(int) { return check_two_state_closed_form(); }
Scoped wrap_exact_band(int) { return check_exact_band(); }
Scoped wrap_wannier(int) { return check_wannier_amplitudes(); }
Scoped wrap_bandwidth(int) { return check_bandwidth_and_dominant_hopping(); }
Scoped wrap_transfer(int) { return check_transfer_sanity(); }
Scoped wrap_symmetry(int) { return check_barrier_well_symmetry(); }
Scoped wrap_stat_dyn(int) { return check_stationary_dynamic_agreement(); }
Scoped wrap_resonance(int) { return check_resonance_window(); }
Scoped wrap_sum_rules(int) { return check_full_sum_rules(); }
Scoped wrap_dip(int threads) { return check_dissociation_dip(threads); }
Scoped wrap_traces(int) { return check_traces_three_vs_full(); }
Scoped wrap_gauge(int) { return check_gauge_invariance(); }

const CheckSpec kChecks[] = {
    {"two-state closed form spectrum", wrap_two_state_closed_form},
    {"exact bound band vs full diagonalization", wrap_exact_band},
    {"Wannier amplitudes", wrap_wannier},
    {"bandwidth constant and dominant hopping", wrap_bandwidth},
    {"transfer-matrix sanity and flux conservation", wrap_transfer},
    {"barrier/well symmetry", wrap_symmetry},
    {"stationary vs dynamic agreement", wrap_stat_dyn},
    {"resonance existence and suppression", wrap_resonance},
    {"full-system sum rules and dissociation", wrap_sum_rules},
    {"dissociation dip at the resonance", wrap_dip},
    {"three-state vs full family traces", wrap_traces},
    {"flux-threading gauge invariance", wrap_gauge},
};

}  // namespace

int acceptance_check_count() { return static_cast<int>(std::size(kChecks)); }

std::string acceptance_check_name(int id) {
  return kChecks[static_cast<size_t>(id - 1)].name;
}

CheckResult run_acceptance_check(int id, int threads) {
  const CheckSpec& spec = kChecks[static_cast<size_t>(id - 1)];
  CheckResult result;
  result.id = id;
  result.name = spec.name;
  const auto start = std::chrono::steady_clock::now();
  try {
    Scoped s = spec.fn(threads);
    result.pass = s.pass;
    result.details = s.details.str();
  } catch (const std::exception& e) {
    result.pass = false;
    result.details = std::string("exception: ") + e.what();
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<CheckResult> run_acceptance_checks(int threads) {
  std::vector<CheckResult> results;
  for (int id = 1; id <= acceptance_check_count(); ++id)
    results.push_back(run_acceptance_check(id, threads));
  return results;
}

}  // namespace pairtunnel
