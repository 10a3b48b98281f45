#include "pairtunnel/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pairtunnel/propagator.hpp"
#include "pairtunnel/spectral.hpp"

namespace pairtunnel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNormDriftBudget = 1e-8;  // per unit time

Complex phase(double x) { return std::exp(Complex(0.0, x)); }

double packet_weight(double kappa, double kappa0, double sigma_kappa) {
  const double d = kappa - kappa0;
  return std::exp(-d * d / (2.0 * sigma_kappa * sigma_kappa));
}

// Relative-coordinate block of the clean periodic pair Hamiltonian at total
// quasimomentum K; basis is the separation r = 0..r_max.
Eigen::MatrixXcd pair_momentum_block(const ModelParams& params, double total_kappa,
                                     int r_max) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(r_max + 1, r_max + 1);
  m(0, 0) = params.U0;
  if (r_max >= 1) m(1, 1) = params.U1;
  const Complex hop = -0.5 * params.J * (1.0 + phase(total_kappa));
  for (int r = 0; r + 1 <= r_max; ++r) {
    const double bose = (r == 0) ? std::sqrt(2.0) : 1.0;
    m(r + 1, r) = bose * hop;
    m(r, r + 1) = std::conj(m(r + 1, r));
  }
  return m;
}

// Lowest eigenpair of the block; the bound band for attractive U0.
void bound_block_state(const ModelParams& params, double total_kappa, int r_max,
                       double& energy, Eigen::VectorXcd* state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      pair_momentum_block(params, total_kappa, r_max),
      state ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  energy = solver.eigenvalues()(0);
  if (state) {
    Eigen::VectorXcd v = solver.eigenvectors().col(0);
    const Complex head = v(0);  // onsite amplitude, dominant for a bound pair
    if (std::abs(head) > 1e-12) v *= std::conj(head) / std::abs(head);
    *state = v;
  }
}

void check_packet_margins(const ModelParams& params, const WavePacketSpec& spec,
                          const PotentialProfile& profile) {
  if (spec.sigma < 5.0)
    throw std::invalid_argument("wave packet must be wide: sigma >= 5 sites");
  const double margin = 4.0 * spec.sigma;
  if (spec.center - params.min_site() < margin ||
      params.max_site() - spec.center < margin)
    throw std::invalid_argument("wave packet too close to a lattice edge");
  if (profile.shape() != PotentialProfile::Shape::None) {
    const double d = (spec.center < profile.support_min())
                         ? profile.support_min() - spec.center
                         : spec.center - profile.support_max();
    if (d < margin) throw std::invalid_argument("wave packet overlaps the potential support");
  }
}

VectorXc make_packet_one_state(const ModelParams& params, const WavePacketSpec& spec) {
  const int L = params.num_sites;
  VectorXc amp = VectorXc::Zero(L);
  for (int i = 0; i < L; ++i) {
    const double d = (i + params.min_site()) - spec.center;
    amp[i] = std::exp(-d * d / (2.0 * spec.sigma * spec.sigma)) *
             phase(spec.kappa0 * (i + params.min_site()));
  }
  amp.normalize();
  return amp;
}

VectorXc make_packet_multi(Model model, const ModelParams& params,
                           const WavePacketSpec& spec) {
  const int L = params.num_sites;
  const int ncomp = (model == Model::TwoState) ? two_comp::count : three_comp::count;
  const double sigma_kappa = 1.0 / spec.sigma;
  const int grid = 4096;

  VectorXc amp = VectorXc::Zero(L * ncomp);
  for (int n = 0; n < grid; ++n) {
    const double kappa = -kPi + 2.0 * kPi * (n + 1.0) / grid;
    const double w = packet_weight(kappa, spec.kappa0, sigma_kappa);
    if (w < 1e-8) continue;
    Eigen::VectorXcd c;
    if (model == Model::TwoState) {
      c = bloch_eigenproblem(params, kappa).C_minus;
    } else {
      double e;
      Eigen::Vector3cd c3;
      three_state_lower_band(params, kappa, e, c3);
      c = c3;
    }
    for (int i = 0; i < L; ++i) {
      const Complex ph = w * phase(kappa * (i + params.min_site() - spec.center));
      for (int comp = 0; comp < ncomp; ++comp) amp[i * ncomp + comp] += ph * c[comp];
    }
  }
  amp.normalize();
  return amp;
}

VectorXc make_packet_full(const ModelParams& params, const WavePacketSpec& spec) {
  const int L = params.num_sites;
  const PairBasis basis(L);
  const int r_max = (L - 1) / 2;
  const double sigma_kappa = 1.0 / spec.sigma;
  const int l0 = spec.center - params.min_site();

  // The eigenstate amplitude at momentum K is e^{iKj} f_K(r) with j the left
  // boson.  The assembled center of mass sits at the phase reference plus
  // <r>/2 plus the gauge group delay <d arg f_K / dK>; compensating both with
  // one rigid per-K phase keeps the packet a pure bound-band superposition
  // centered at l0.
  double com_shift = 0;
  {
    const double dk = 1e-4;
    double energy;
    Eigen::VectorXcd f0, fp, fm;
    bound_block_state(params, spec.kappa0, r_max, energy, &f0);
    bound_block_state(params, spec.kappa0 + dk, r_max, energy, &fp);
    bound_block_state(params, spec.kappa0 - dk, r_max, energy, &fm);
    for (int r = 0; r <= r_max; ++r) {
      const double w = std::norm(f0[r]);
      if (w < 1e-20) continue;
      const double drift = std::arg(fp[r] / fm[r]) / (2.0 * dk);
      com_shift += w * (0.5 * r - drift);
    }
  }

  VectorXc amp = VectorXc::Zero(basis.dim());
  for (int n = 0; n < L; ++n) {
    double kappa = 2.0 * kPi * n / L;
    if (kappa > kPi) kappa -= 2.0 * kPi;
    const double w = packet_weight(kappa, spec.kappa0, sigma_kappa);
    if (w < 1e-8) continue;
    double energy;
    Eigen::VectorXcd f;
    bound_block_state(params, kappa, r_max, energy, &f);
    for (int j = 0; j < L; ++j) {
      for (int r = 0; r <= r_max; ++r) {
        if (j + r >= L) break;  // window onto the open lattice: drop ring wraps
        amp[basis.index(j, j + r)] += w * f[r] * phase(kappa * (j - l0 + com_shift));
      }
    }
  }
  amp.normalize();
  return amp;
}

}  // namespace

VectorXc make_packet(Model model, const ModelParams& params, const WavePacketSpec& spec,
                     const PotentialProfile& profile, const ScatterOptions& options) {
  params.validate();
  check_packet_margins(params, spec, profile);
  (void)options;
  switch (model) {
    case Model::OneState: return make_packet_one_state(params, spec);
    case Model::TwoState:
    case Model::ThreeState: return make_packet_multi(model, params, spec);
    case Model::Full: return make_packet_full(params, spec);
  }
  throw std::invalid_argument("unknown model");
}

VectorXc propagate(const SparseMatrixXc& h, VectorXc state, double t_final,
                   double sample_every, const SampleObserver& observer,
                   PropagationReport* report) {
  if (std::abs(state.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("propagate expects a normalized state");
  if (!(t_final >= 0) || !(sample_every > 0))
    throw std::invalid_argument("propagate needs t_final >= 0 and sample_every > 0");

  const auto wall_start = std::chrono::steady_clock::now();
  const ChebyshevPropagator prop(h);
  const double e0 = report ? prop.energy(state) : 0.0;
  double worst_norm_rate = 0, worst_energy = 0;

  if (observer) observer(0.0, state);
  double t = 0;
  while (t < t_final - 1e-12) {
    const double dt = std::min(sample_every, t_final - t);
    prop.step(state, dt);
    t += dt;

    const double drift = std::abs(state.norm() - 1.0);
    const double allowed = kNormDriftBudget * std::max(t, 1.0);
    if (drift > allowed)
      throw std::runtime_error("propagator norm drift exceeded budget: " +
                               std::to_string(drift) + " at t = " + std::to_string(t));
    worst_norm_rate = std::max(worst_norm_rate, drift / std::max(t, 1.0));
    if (report) {
      const double e = prop.energy(state);
      worst_energy = std::max(worst_energy, std::abs(e - e0) / std::max(std::abs(e0), 1.0));
    }
    if (observer) observer(t, state);
  }

  if (report) {
    report->norm_drift_per_time = worst_norm_rate;
    report->energy_drift_relative = worst_energy;
    report->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  }
  return state;
}

FamilyTraceRecorder::FamilyTraceRecorder(Model model, int num_sites)
    : model_(model), num_sites_(num_sites) {}

SampleObserver FamilyTraceRecorder::observer() {
  return [this](double t, const VectorXc& state) {
    traces_.times.push_back(t);
    switch (model_) {
      case Model::Full: {
        const Eigen::Vector4d f = family_masses_full(state, num_sites_);
        traces_.same_site.push_back(f[0]);
        traces_.adjacent.push_back(f[1]);
        traces_.separated.push_back(f[2] + f[3]);
        traces_.separated_by_one.push_back(f[2]);
        break;
      }
      case Model::TwoState: {
        const Eigen::VectorXd m = component_masses(state, num_sites_, two_comp::count);
        traces_.same_site.push_back(m[two_comp::onsite]);
        traces_.adjacent.push_back(m[two_comp::adjacent]);
        traces_.separated.push_back(0.0);
        break;
      }
      case Model::ThreeState: {
        const Eigen::VectorXd m = component_masses(state, num_sites_, three_comp::count);
        traces_.same_site.push_back(m[three_comp::onsite]);
        traces_.adjacent.push_back(m[three_comp::adjacent]);
        traces_.separated.push_back(m[three_comp::separated]);
        break;
      }
      case Model::OneState: {
        traces_.same_site.push_back(1.0);  // the pair is the particle
        traces_.adjacent.push_back(0.0);
        traces_.separated.push_back(0.0);
        break;
      }
    }
  };
}

namespace {

int auto_barrier_halfwidth(const PotentialProfile& profile) {
  switch (profile.shape()) {
    case PotentialProfile::Shape::None:
      return 2;
    case PotentialProfile::Shape::Gaussian:
      return static_cast<int>(std::ceil(6.0 * profile.sigma())) + 2;
    default:
      return std::max(profile.support_max() - profile.center(),
                      profile.center() - profile.support_min()) +
             2;
  }
}

}  // namespace

OutcomeProbs classify_outcomes(const VectorXc& final_state, const ModelParams& params,
                               const PotentialProfile& profile, const RegionParams& regions) {
  const PairBasis basis(params.num_sites);
  if (final_state.size() != basis.dim())
    throw std::invalid_argument("classify_outcomes expects a full-model state");

  const int half = regions.barrier_halfwidth > 0 ? regions.barrier_halfwidth
                                                 : auto_barrier_halfwidth(profile);
  const int c = profile.center();
  const int d_bound = regions.bound_separation;

  OutcomeProbs out;
  out.barrier_halfwidth = half;
  out.bound_separation = d_bound;
  for (int idx = 0; idx < basis.dim(); ++idx) {
    const auto [i, j] = basis.pair_at(idx);
    const double w = std::norm(final_state[idx]);
    if (w == 0.0) continue;
    const int l = i + params.min_site();
    const int m = j + params.min_site();
    const bool l_in = std::abs(l - c) <= half;
    const bool m_in = std::abs(m - c) <= half;

    if (l_in != m_in) {
      out.dissociated += w;  // one boson captured at the potential
    } else if (m - l <= d_bound) {
      if (std::min(l, m) > c + half)
        out.transmitted += w;
      else if (std::max(l, m) < c - half)
        out.reflected += w;
      else
        out.unclassified += w;
    } else {
      if (!l_in && !m_in)
        out.dissociated += w;
      else
        out.unclassified += w;
    }
  }
  return out;
}

double bound_band_energy(const ModelParams& params, double kappa) {
  double e;
  bound_block_state(params, kappa, 160, e, nullptr);
  return e;
}

double bound_band_group_velocity(const ModelParams& params, double kappa) {
  const double dk = 1e-5;
  return (bound_band_energy(params, kappa + dk) - bound_band_energy(params, kappa - dk)) /
         (2.0 * dk);
}

bool dissociation_channel_open(const ModelParams& params, const PotentialProfile& profile,
                               double kappa0, double* margin) {
  const double e_pair = bound_band_energy(params, kappa0);
  const double band_edge = params.J;  // single-boson band is [-J, J]

  // single-boson levels of the well, on a chain comfortably larger than the support
  const int pad = 80;
  const int lo = profile.support_min() - pad, hi = profile.support_max() + pad;
  const int n = hi - lo + 1;
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h1(i, i) = profile.value(lo + i);
    if (i + 1 < n) {
      h1(i, i + 1) = -0.5 * params.J;
      h1(i + 1, i) = -0.5 * params.J;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h1, Eigen::EigenvaluesOnly);

  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double level = solver.eigenvalues()(i);
    if (level > -band_edge - 1e-9) break;  // only levels split off below the band
    const double e_free = e_pair - level;
    best = std::max(best, std::min(e_free + band_edge, band_edge - e_free));
  }
  // breakup into two free bosons, ignoring their residual interaction
  best = std::max(best, std::min(e_pair + 2.0 * band_edge, 2.0 * band_edge - e_pair));

  if (margin) *margin = best;
  return best > 0;
}

ExperimentResult run_scattering_experiment(Model model, const ModelParams& params,
                                           const PotentialProfile& profile,
                                           const WavePacketSpec& spec,
                                           const ExperimentOptions& options) {
  params.validate();
  if (params.boundary != Boundary::Open)
    throw std::invalid_argument("scattering experiments run on open lattices");

  const double hop = options.scatter.one_state_hopping != 0.0
                         ? options.scatter.one_state_hopping
                         : half_bandwidth(params);

  SparseMatrixXc h;
  double vg = 0;
  switch (model) {
    case Model::OneState: {
      EffectiveHoppings nn;
      nn.values = {0.0, hop};
      h = build_one_state_hamiltonian(nn, profile, params.num_sites, params.boundary);
      vg = hop * std::sin(spec.kappa0);
      break;
    }
    case Model::TwoState:
      h = build_two_state_hamiltonian(params, profile);
      vg = group_velocity(params, spec.kappa0, DispersionModel::TwoState);
      break;
    case Model::ThreeState: {
      h = build_three_state_hamiltonian(params, profile);
      const double dk = 1e-5;
      double ep, em;
      Eigen::Vector3cd scratch;
      three_state_lower_band(params, spec.kappa0 + dk, ep, scratch);
      three_state_lower_band(params, spec.kappa0 - dk, em, scratch);
      vg = (ep - em) / (2.0 * dk);
      break;
    }
    case Model::Full:
      h = build_full_hamiltonian(params, profile);
      vg = bound_band_group_velocity(params, spec.kappa0);
      break;
  }
  if (std::abs(vg) < 1e-6)
    throw std::invalid_argument("carrier quasimomentum has no group velocity");

  ExperimentResult result;
  result.group_velocity = vg;
  result.t_final = options.t_final > 0
                       ? options.t_final
                       : 2.0 * std::abs(spec.center - profile.center()) / std::abs(vg);

  VectorXc packet = make_packet(model, params, spec, profile, options.scatter);

  FamilyTraceRecorder recorder(model, params.num_sites);
  PropagationReport report;
  result.initial_energy = packet.dot(h * packet).real();

  VectorXc final_state = propagate(h, std::move(packet), result.t_final,
                                   options.sample_every, recorder.observer(), &report);
  result.report = report;
  result.traces = recorder.traces();

  const int half = options.regions.barrier_halfwidth > 0
                       ? options.regions.barrier_halfwidth
                       : auto_barrier_halfwidth(profile);
  if (model == Model::Full) {
    result.outcomes = classify_outcomes(final_state, params, profile, options.regions);
  } else {
    // truncated models: transmitted/reflected mass of the site coordinate
    const int ncomp = model == Model::OneState    ? 1
                      : model == Model::TwoState ? two_comp::count
                                                 : three_comp::count;
    OutcomeProbs out;
    out.barrier_halfwidth = half;
    out.bound_separation = options.regions.bound_separation;
    const int c = profile.center();
    for (int i = 0; i < params.num_sites; ++i) {
      const int l = i + params.min_site();
      double w = 0;
      for (int comp = 0; comp < ncomp; ++comp) w += std::norm(final_state[i * ncomp + comp]);
      if (l > c + half)
        out.transmitted += w;
      else if (l < c - half)
        out.reflected += w;
      else
        out.unclassified += w;
    }
    result.outcomes = out;
  }
  if (options.keep_final_state) result.final_state = std::move(final_state);
  return result;
}

}  // namespace pairtunnel
