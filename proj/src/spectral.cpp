#include "pairtunnel/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pairtunnel/hamiltonian.hpp"

namespace pairtunnel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = 1.4142135623730951;

Eigen::Matrix2cd bloch_matrix(const ModelParams& params, double kappa) {
  // basis (adjacent, onsite), absolute energies
  const Complex h = -params.J * (1.0 + std::exp(Complex(0.0, kappa))) / kSqrt2;
  Eigen::Matrix2cd m;
  m << Complex(params.U1, 0.0), h, std::conj(h), Complex(params.U0, 0.0);
  return m;
}

Eigen::Vector2cd gauge_fix(Eigen::Vector2cd c) {
  c.normalize();
  const Complex onsite = c[two_comp::onsite];
  if (std::abs(onsite) > 1e-12) {
    c *= std::conj(onsite) / std::abs(onsite);
  } else {
    const Complex adj = c[two_comp::adjacent];
    if (std::abs(adj) > 0) c *= std::conj(adj) / std::abs(adj);
  }
  return c;
}

}  // namespace

double dispersion_two_state(const ModelParams& params, double kappa, Band band) {
  const double half_gap = 0.5 * params.gap();
  const double c = std::cos(0.5 * kappa);
  const double root = std::sqrt(half_gap * half_gap + 2.0 * params.J * params.J * c * c);
  return params.U0 + half_gap + (band == Band::Lower ? -root : root);
}

double dispersion_exact(const ModelParams& params, double kappa) {
  const double c = std::cos(0.5 * kappa);
  return -std::sqrt(params.U0 * params.U0 + 4.0 * params.J * params.J * c * c);
}

BlochPoint bloch_eigenproblem(const ModelParams& params, double kappa) {
  BlochPoint out;
  const Eigen::Matrix2cd m = bloch_matrix(params, kappa);
  const Complex h = m(0, 1);

  if (std::abs(h) < 1e-14) {
    // zone edge: the matrix is diagonal, assign by diagonal energy
    const bool onsite_lower = params.U0 <= params.U1;
    out.E_minus = std::min(params.U0, params.U1);
    out.E_plus = std::max(params.U0, params.U1);
    out.C_minus = onsite_lower ? Eigen::Vector2cd(0.0, 1.0) : Eigen::Vector2cd(1.0, 0.0);
    out.C_plus = onsite_lower ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
    return out;
  }

  const double mean = 0.5 * (params.U0 + params.U1);
  const double half_diff = 0.5 * (params.U1 - params.U0);
  const double root = std::sqrt(half_diff * half_diff + std::norm(h));
  out.E_minus = mean - root;
  out.E_plus = mean + root;
  // (h, E - U1) solves the row equations for eigenvalue E
  out.C_minus = gauge_fix(Eigen::Vector2cd(h, Complex(out.E_minus - params.U1, 0.0)));
  out.C_plus = gauge_fix(Eigen::Vector2cd(h, Complex(out.E_plus - params.U1, 0.0)));
  return out;
}

BlochSolution solve_bloch_band(const ModelParams& params, int kappa_resolution) {
  if (kappa_resolution < 8) throw std::invalid_argument("kappa_resolution too small");
  BlochSolution sol;
  sol.kappa_grid.reserve(kappa_resolution);
  for (int n = 0; n < kappa_resolution; ++n) {
    const double kappa = -kPi + 2.0 * kPi * (n + 1.0) / kappa_resolution;  // (-pi, pi]
    const BlochPoint p = bloch_eigenproblem(params, kappa);
    sol.kappa_grid.push_back(kappa);
    sol.E_minus.push_back(p.E_minus);
    sol.E_plus.push_back(p.E_plus);
    sol.C_minus.push_back(p.C_minus);
    sol.C_plus.push_back(p.C_plus);
  }
  return sol;
}

std::vector<Eigen::VectorXd> band_structure_full(const ModelParams& params,
                                                 const std::vector<double>& theta_grid) {
  params.validate();
  if (params.boundary != Boundary::Periodic)
    throw std::invalid_argument("band structure sampling needs a periodic lattice");
  std::vector<Eigen::VectorXd> out;
  out.reserve(theta_grid.size());
  ModelParams p = params;
  for (double theta : theta_grid) {
    p.theta = theta;
    const Eigen::MatrixXcd h =
        Eigen::MatrixXcd(build_full_hamiltonian(p, PotentialProfile::none()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = solver.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    out.push_back(std::move(ev));
  }
  return out;
}

WannierState wannier_states(const ModelParams& params, int kappa_resolution) {
  const BlochSolution band = solve_bloch_band(params, kappa_resolution);
  const int n = kappa_resolution;

  WannierState w;
  w.offsets.reserve(n);
  w.adjacent_amp.assign(n, 0.0);
  w.onsite_amp.assign(n, 0.0);

  // Phi(j) = (1/N) sum_n C_-(kappa_n) e^{i kappa_n j}; real in the chosen gauge.
  for (int jj = 0; jj < n; ++jj) {
    const int offset = jj - n / 2;
    w.offsets.push_back(offset);
    Complex adj(0, 0), ons(0, 0);
    for (int g = 0; g < n; ++g) {
      const Complex phase = std::exp(Complex(0.0, band.kappa_grid[g] * offset));
      adj += band.C_minus[g][two_comp::adjacent] * phase;
      ons += band.C_minus[g][two_comp::onsite] * phase;
    }
    w.adjacent_amp[jj] = (adj / double(n)).real();
    w.onsite_amp[jj] = (ons / double(n)).real();
  }

  // e-folding length from the amplitude envelope between offsets 1 and 6
  auto mag = [&](int offset) {
    const int jj = offset + n / 2;
    return std::hypot(w.adjacent_amp[jj], w.onsite_amp[jj]);
  };
  const double m1 = mag(1), m6 = mag(6);
  if (m1 > 0 && m6 > 0 && m6 < m1)
    w.decay_length = 5.0 / std::log(m1 / m6);
  else
    w.decay_length = static_cast<double>(n);
  const double edge = std::max(mag(n / 2 - 1), mag(-n / 2 + 1));
  w.aliasing_warning = edge > 1e-10;
  return w;
}

double WannierState::amplitude_at(int offset, int comp) const {
  const int n = static_cast<int>(offsets.size());
  const int jj = offset + n / 2;
  if (jj < 0 || jj >= n) return 0.0;
  return comp == two_comp::onsite ? onsite_amp[jj] : adjacent_amp[jj];
}

double WannierState::norm_squared() const {
  double s = 0;
  for (size_t i = 0; i < offsets.size(); ++i)
    s += adjacent_amp[i] * adjacent_amp[i] + onsite_amp[i] * onsite_amp[i];
  return s;
}

namespace {

EffectiveHoppings fit_from_band(const ModelParams& params, int m_max, int resolution) {
  const BlochSolution band = solve_bloch_band(params, resolution);
  EffectiveHoppings h;
  h.provenance = EffectiveHoppings::Provenance::FittedFromBand;
  h.values.resize(static_cast<size_t>(m_max) + 1, 0.0);
  const int n = resolution;
  for (int m = 0; m <= m_max; ++m) {
    double acc = 0;
    for (int g = 0; g < n; ++g) acc += band.E_minus[g] * std::cos(m * band.kappa_grid[g]);
    // E(kappa) = -I_0 - sum_{m>=1} I_m cos(m kappa)
    h.values[static_cast<size_t>(m)] = (m == 0 ? -acc / n : -2.0 * acc / n);
  }
  return h;
}

EffectiveHoppings from_wannier_elements(const ModelParams& params, int m_max,
                                        int resolution) {
  // Assemble Wannier states in real space on a clean ring and take matrix
  // elements of the two-state Hamiltonian; an independent route to the same
  // band and a direct check of the fitted integrals.
  const WannierState w = wannier_states(params, resolution);
  const int L = resolution;
  ModelParams ring = params;
  ring.theta = 0;
  ring.num_sites = L;
  ring.boundary = Boundary::Periodic;
  const SparseMatrixXc h2 = build_two_state_hamiltonian(ring, PotentialProfile::none());

  auto embed = [&](int center_index) {
    VectorXc v = VectorXc::Zero(two_comp::count * L);
    for (size_t i = 0; i < w.offsets.size(); ++i) {
      const int site = ((center_index + w.offsets[i]) % L + L) % L;
      v[site * two_comp::count + two_comp::adjacent] = w.adjacent_amp[i];
      v[site * two_comp::count + two_comp::onsite] = w.onsite_amp[i];
    }
    return v;
  };

  const int c = L / 2;
  const VectorXc phi0 = embed(c);
  const VectorXc h_phi0 = h2 * phi0;

  EffectiveHoppings h;
  h.provenance = EffectiveHoppings::Provenance::WannierMatrixElements;
  h.values.resize(static_cast<size_t>(m_max) + 1, 0.0);
  for (int m = 0; m <= m_max; ++m) {
    const double elem = embed(c + m).dot(h_phi0).real();
    h.values[static_cast<size_t>(m)] = (m == 0 ? -elem : -2.0 * elem);
  }
  return h;
}

}  // namespace

EffectiveHoppings hopping_integrals(const ModelParams& params, HoppingMethod method,
                                    int m_max, int kappa_resolution) {
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
  EffectiveHoppings h = (method == HoppingMethod::FittedFromBand)
                            ? fit_from_band(params, m_max, kappa_resolution)
                            : from_wannier_elements(params, m_max, kappa_resolution);
  // drop trailing integrals below 1e-8 |I_1|
  const double floor = 1e-8 * std::abs(h.values[1]);
  while (h.values.size() > 2 && std::abs(h.values.back()) < floor) h.values.pop_back();
  return h;
}

double EffectiveHoppings::dominant() const {
  if (values.size() > 1) return std::abs(values[1]);
  return 0.0;
}

std::string EffectiveHoppings::provenance_name(Provenance p) {
  switch (p) {
    case Provenance::FittedFromBand: return "fitted-from-band";
    case Provenance::WannierMatrixElements: return "wannier-matrix-elements";
    case Provenance::User: return "user";
  }
  return "user";
}

double half_bandwidth(const ModelParams& params) {
  return 0.5 * (dispersion_two_state(params, kPi, Band::Lower) -
                dispersion_two_state(params, 0.0, Band::Lower));
}

Eigen::Matrix3cd three_state_bloch_matrix(const ModelParams& params, double kappa) {
  const Complex f = 1.0 + std::exp(Complex(0.0, kappa));
  const Complex g3 = -0.5 * params.J * f;      // separated <-> adjacent
  const Complex g2 = -params.J / kSqrt2 * f;   // adjacent <-> onsite
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(three_comp::separated, three_comp::adjacent) = g3;
  m(three_comp::adjacent, three_comp::separated) = std::conj(g3);
  m(three_comp::adjacent, three_comp::adjacent) = params.U1;
  m(three_comp::adjacent, three_comp::onsite) = g2;
  m(three_comp::onsite, three_comp::adjacent) = std::conj(g2);
  m(three_comp::onsite, three_comp::onsite) = params.U0;
  return m;
}

void three_state_lower_band(const ModelParams& params, double kappa, double& energy,
                            Eigen::Vector3cd& bloch_vector) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(
      three_state_bloch_matrix(params, kappa));
  energy = solver.eigenvalues()(0);
  bloch_vector = solver.eigenvectors().col(0);
  const Complex onsite = bloch_vector(three_comp::onsite);
  if (std::abs(onsite) > 1e-12)
    bloch_vector *= std::conj(onsite) / std::abs(onsite);
  else if (std::abs(bloch_vector(three_comp::adjacent)) > 0)
    bloch_vector *= std::conj(bloch_vector(three_comp::adjacent)) /
                    std::abs(bloch_vector(three_comp::adjacent));
}

double group_velocity(const ModelParams& params, double kappa, DispersionModel model) {
  const double dk = 1e-6;
  auto e = [&](double k) {
    return model == DispersionModel::TwoState
               ? dispersion_two_state(params, k, Band::Lower)
               : dispersion_exact(params, k);
  };
  return (e(kappa + dk) - e(kappa - dk)) / (2.0 * dk);
}

double bound_band_admixture(const ModelParams& params) {
  ModelParams p = params;
  p.boundary = Boundary::Periodic;
  const Eigen::MatrixXcd h =
      Eigen::MatrixXcd(build_full_hamiltonian(p, PotentialProfile::none()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const PairBasis basis(p.num_sites);

  double worst = 0;
  for (int n = 0; n < p.num_sites; ++n) {  // the bound band: lowest L states
    const Eigen::VectorXcd v = solver.eigenvectors().col(n);
    double inside = 0;
    for (int idx = 0; idx < basis.dim(); ++idx) {
      const auto [l, m] = basis.pair_at(idx);
      const int sep = m - l;
      const bool family12 = (sep <= 1) || (p.boundary == Boundary::Periodic && sep == p.num_sites - 1);
      if (family12) inside += std::norm(v[idx]);
    }
    worst = std::max(worst, 1.0 - inside);
  }
  return worst;
}

}  // namespace pairtunnel
