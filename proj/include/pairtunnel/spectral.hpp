#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pairtunnel/effective_hoppings.hpp"
#include "pairtunnel/model.hpp"

namespace pairtunnel {

enum class Band { Lower, Upper };
enum class DispersionModel { TwoState, Exact };
enum class HoppingMethod { FittedFromBand, WannierMatrixElements };

/// Closed-form two-state dispersion
///   E(kappa) = U0 + Delta/2 -+ sqrt((Delta/2)^2 + 2 J^2 cos^2(kappa/2)),
/// Delta = |U0 - U1|, in the absolute energy convention of the Hamiltonians.
double dispersion_two_state(const ModelParams& params, double kappa, Band band);

/// Exact bound-pair dispersion for the U1 = 0 regime,
///   E(kappa) = -sqrt(U0^2 + 4 J^2 cos^2(kappa/2)).
double dispersion_exact(const ModelParams& params, double kappa);

/// Eigenpair of the 2x2 quasimomentum problem at one kappa.
/// Gauge: the onsite component is real and >= 0; if it vanishes (upper band
/// at the zone edge) the adjacent component is made real and >= 0 instead.
/// At kappa = pi the matrix is diagonal and the assignment follows the
/// diagonal energies.
struct BlochPoint {
  double E_minus = 0, E_plus = 0;
  Eigen::Vector2cd C_minus, C_plus;  // components (adjacent, onsite)
};
BlochPoint bloch_eigenproblem(const ModelParams& params, double kappa);

/// Lower/upper band samples over a uniform kappa grid in (-pi, pi].
struct BlochSolution {
  std::vector<double> kappa_grid;
  std::vector<double> E_minus, E_plus;
  std::vector<Eigen::Vector2cd> C_minus, C_plus;
};
BlochSolution solve_bloch_band(const ModelParams& params, int kappa_resolution);

/// All eigenvalues of the clean periodic two-boson Hamiltonian per Peierls
/// phase, sorted ascending.  Rejects open boundary.
std::vector<Eigen::VectorXd> band_structure_full(const ModelParams& params,
                                                 const std::vector<double>& theta_grid);

/// Lower-band Wannier state of the bound pair, centered on site 0.
/// Amplitudes are real in the chosen gauge; offsets run over
/// [-resolution/2, resolution/2).
struct WannierState {
  std::vector<int> offsets;
  std::vector<double> adjacent_amp;  // bosons at (center+offset, center+offset+1)
  std::vector<double> onsite_amp;    // both bosons at center+offset
  double decay_length = 0;           // e-folding length of the amplitude tail
  bool aliasing_warning = false;     // tail did not fit the kappa grid

  double amplitude_at(int offset, int comp) const;
  double norm_squared() const;
};
WannierState wannier_states(const ModelParams& params, int kappa_resolution = 512);

/// Hopping integrals of the lower band.
///
/// FittedFromBand reads I_m off the cosine series of -E_minus(kappa);
/// WannierMatrixElements assembles Wannier states in real space, applies the
/// clean two-state Hamiltonian and converts the matrix elements to the same
/// normalization (I_0 = -<Phi_0|H|Phi_0>, I_m = -2 <Phi_m|H|Phi_0>).  Both
/// routes agree to ~1e-8.  Trailing integrals below 1e-8 |I_1| are dropped.
EffectiveHoppings hopping_integrals(const ModelParams& params, HoppingMethod method,
                                    int m_max = 8, int kappa_resolution = 512);

/// Half of the lower-band width, sqrt((Delta/2)^2 + 2 J^2) - Delta/2 over 2;
/// the conventional single hopping of the nearest-neighbor point-particle
/// picture.
double half_bandwidth(const ModelParams& params);

/// Quasimomentum matrix of the three-state chain in the (separated,
/// adjacent, onsite) component basis.
Eigen::Matrix3cd three_state_bloch_matrix(const ModelParams& params, double kappa);

/// Lowest band of the three-state chain; the Bloch vector is gauged with a
/// real non-negative onsite component.
void three_state_lower_band(const ModelParams& params, double kappa, double& energy,
                            Eigen::Vector3cd& bloch_vector);

/// dE/dkappa of the chosen lower-band dispersion by centered difference
/// (delta kappa = 1e-6), in sites per unit time.
double group_velocity(const ModelParams& params, double kappa, DispersionModel model);

/// Largest admixture of states outside the {onsite, adjacent} families over
/// the bound band of the clean periodic full model: max_n (1 - |P psi_n|^2)
/// over the num_sites lowest eigenstates.
double bound_band_admixture(const ModelParams& params);

}  // namespace pairtunnel
