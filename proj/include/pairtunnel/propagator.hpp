#pragma once

#include <vector>

#include "pairtunnel/hamiltonian.hpp"
#include "pairtunnel/states.hpp"

namespace pairtunnel {

/// Chebyshev expansion of exp(-i H t) for a sparse Hermitian H.
///
/// The spectral interval is bracketed by Gershgorin disks with a small safety
/// margin, so the expansion coefficients decay superexponentially once the
/// order passes a*dt.  Terms are kept until the Bessel weights drop below
/// 1e-17, which keeps the norm drift near machine precision per step.
class ChebyshevPropagator {
 public:
  explicit ChebyshevPropagator(const SparseMatrixXc& h);

  /// state <- exp(-i H dt) state
  void step(VectorXc& state, double dt) const;

  double spectrum_min() const { return e_min_; }
  double spectrum_max() const { return e_max_; }

  /// Real part of <state|H|state>; H is Hermitian so this is the energy.
  double energy(const VectorXc& state) const;

 private:
  const SparseMatrixXc& h_;
  double e_min_ = 0, e_max_ = 0;
  double half_span_ = 1, center_ = 0;
};

/// J_0..J_n at x via downward (Miller) recurrence, normalized with
/// J_0 + 2 J_2 + 2 J_4 + ... = 1.  Accurate to ~1e-15 for the x used here.
std::vector<double> bessel_j_array(double x, int n_max);

}  // namespace pairtunnel
