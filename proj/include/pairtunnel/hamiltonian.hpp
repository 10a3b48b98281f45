#pragma once

#include <Eigen/Sparse>
#include <complex>

#include "pairtunnel/effective_hoppings.hpp"
#include "pairtunnel/model.hpp"
#include "pairtunnel/potential.hpp"
#include "pairtunnel/states.hpp"

namespace pairtunnel {

using SparseMatrixXc = Eigen::SparseMatrix<std::complex<double>>;

/// Exact two-boson Hamiltonian on the PairBasis.
///
/// Hopping is -(J/2) e^{i theta} per rightward single-boson hop, with the
/// bosonic sqrt(2) enhancement on transitions into or out of doubly occupied
/// sites.  Diagonal: U0 on (l,l), U1 on (l,l+1), plus eps_l + eps_m for every
/// pair.  Hermitian by construction.
SparseMatrixXc build_full_hamiltonian(const ModelParams& params,
                                      const PotentialProfile& profile);

/// Truncation to the {onsite, adjacent} families, interleaved layout of
/// MultiCompState with two_comp ordering.  theta is not used (taken as 0).
/// Diagonal: (U1 + eps_l + eps_{l+1}, U0 + 2 eps_l); inter-family hopping
/// amplitude -sqrt(2) J / 2.
SparseMatrixXc build_two_state_hamiltonian(const ModelParams& params,
                                           const PotentialProfile& profile);

/// Adds the family with one empty site between the bosons (three_comp
/// ordering).  The new family has diagonal eps_l + eps_{l+2} (no interaction
/// energy) and couples to the adjacent family with amplitude -J/2.
SparseMatrixXc build_three_state_hamiltonian(const ModelParams& params,
                                             const PotentialProfile& profile);

/// Point-particle Hamiltonian of the pair:
///   H psi_l = -(1/2) sum_m I_m (psi_{l+m} + psi_{l-m}) + 2 eps_l psi_l,
/// where the m = 0 term contributes the diagonal -I_0.  The factor 2 on the
/// potential reflects the two bosons moving together.
SparseMatrixXc build_one_state_hamiltonian(const EffectiveHoppings& hoppings,
                                           const PotentialProfile& profile,
                                           int num_sites, Boundary boundary);

/// Max |H - H^dagger| entry; 0 for exactly Hermitian builds.
double hermiticity_defect(const SparseMatrixXc& h);

}  // namespace pairtunnel
