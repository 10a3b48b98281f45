#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "pairtunnel/model.hpp"
#include "pairtunnel/potential.hpp"

namespace pairtunnel {

/// One-step transfer matrix at a site.
///
/// Conventions (absolute energies, same zero as the Hamiltonians):
///  - one-state, vector (psi_l, psi_{l-1}):      T = [[2(2 eps_l - E)/I, -1], [1, 0]]
///  - two-state, vector (adjacent_l, onsite_l):  T = [[ab-1, -b], [a, -1]] with
///        a = sqrt(2) (U1 + eps_l + eps_{l+1} - E)/J,
///        b = sqrt(2) (U0 + 2 eps_{l+1} - E)/J
///  - three-state, vector (adjacent_l, onsite_l, separated_{l-1}): T = A^{-1} B.
/// det T is 1 for the first two and 0 for the third (B is rank deficient).
struct TransferStep {
  Eigen::MatrixXcd matrix;
  int site = 0;
  Model model = Model::OneState;
  bool near_singular = false;  // |det A| < 1e-12 ||A||^3 (three-state only)
};

TransferStep tm_one_state(double E, double I, double eps_l, int site = 0);
TransferStep tm_two_state(const ModelParams& params, double E, double eps_l,
                          double eps_l_plus_1, int site = 0);
TransferStep tm_three_state(const ModelParams& params, double E, double eps_l,
                            double eps_l_plus_1, double eps_l_plus_2, int site = 0);

/// The A, B blocks of the three-state recursion A x_{l+1} = B x_l.
void three_state_blocks(const ModelParams& params, double E, double eps_l,
                        double eps_l_plus_1, double eps_l_plus_2,
                        Eigen::Matrix3cd& A, Eigen::Matrix3cd& B);

enum class ScatterFlag { Ok, BandEdge, NonConvergent, SingularStep };
enum class ScatterMethod { Backward, ForwardMatched };

/// Stationary scattering amplitudes for one kappa on the lower band.
///
/// amp_a and amp_b follow the S-matrix slots of the scattering relation
/// (0, b)^T = S (1, a)^T, so t = 1/conj(amp_b) identically and
/// amp_a = r / conj(t).
struct ScatterSolution {
  Model model = Model::OneState;
  double kappa = 0;
  double energy = 0;
  std::complex<double> amp_a{0, 0}, amp_b{0, 0};
  std::complex<double> t{0, 0}, r{0, 0};
  double P_t = 0, P_r = 0;
  int asymptotic_cutoff = 0;        // propagation ran over [-cutoff, cutoff]
  double residual = 0;              // weight left in evanescent/null channels
  ScatterFlag flag = ScatterFlag::Ok;
  ScatterMethod method = ScatterMethod::Backward;

  bool flagged() const { return flag != ScatterFlag::Ok; }
};

struct ScatterOptions {
  /// Nearest-neighbor hopping of the one-state model; 0 selects the
  /// half-bandwidth of the two-state lower band.
  double one_state_hopping = 0.0;
};

/// Transfer-matrix scattering for the given model.
///
/// Seeds the purely right-going lower-band solution past the potential
/// support and propagates it backward across the support; the left
/// asymptotics are decomposed into e^{+-i kappa l} channels.  The singular
/// three-state step is propagated backward by minimum-norm least squares
/// with residual monitoring and falls back to forward propagation of a
/// fundamental pair of solutions matched on the right whenever the backward
/// residual exceeds 1e-8.  kappa within 1e-3 of a band edge is flagged.
ScatterSolution solve_scattering(Model model, const ModelParams& params,
                                 const PotentialProfile& profile, double kappa,
                                 const ScatterOptions& options = {});

struct SweepPoint {
  Model model;
  double kappa, V;
  double P_t, P_r;
  bool flagged;
};

/// Dense P_t(kappa, V) table; per-point failures are flagged, never fatal.
/// Points are emitted in (kappa outer, V inner) grid order regardless of
/// thread count.
std::vector<SweepPoint> sweep_tunneling(Model model, const ModelParams& params,
                                        const PotentialProfile& profile_template,
                                        const std::vector<double>& kappa_grid,
                                        const std::vector<double>& V_grid,
                                        const ScatterOptions& options = {},
                                        int threads = 1);

}  // namespace pairtunnel
