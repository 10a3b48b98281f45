#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "pairtunnel/model.hpp"

namespace pairtunnel {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;

/// Basis of ordered site pairs (l, m), l <= m, for two identical bosons.
///
/// Pairs are enumerated row-major in (l, m): (0,0), (0,1), ..., (0,L-1),
/// (1,1), ...  The ordering is fixed so that eigenvector phases and CSV dumps
/// are reproducible.  Indices here are 0-based lattice offsets; translation
/// to signed site coordinates is done by the callers.
class PairBasis {
 public:
  explicit PairBasis(int num_sites) : num_sites_(num_sites) {}

  int num_sites() const { return num_sites_; }
  int dim() const { return num_sites_ * (num_sites_ + 1) / 2; }

  int index(int l, int m) const {
    // requires 0 <= l <= m < L
    return l * num_sites_ - l * (l - 1) / 2 + (m - l);
  }

  std::pair<int, int> pair_at(int idx) const {
    int l = 0;
    int row_len = num_sites_;
    while (idx >= row_len) {
      idx -= row_len;
      --row_len;
      ++l;
    }
    return {l, l + idx};
  }

 private:
  int num_sites_;
};

/// Full two-boson amplitude psi_{l,m} over a PairBasis.
struct FullPairState {
  VectorXc amp;
  int num_sites = 0;

  PairBasis basis() const { return PairBasis(num_sites); }
  double norm() const { return amp.norm(); }
};

// Component ordering of the truncated states.  The two-component state is
// (adjacent, onsite) and the three-component state is (separated, adjacent,
// onsite), matching the diagonal interaction energies (U1, U0) and
// (0, U1, U0) respectively:
//   onsite    -- both bosons on site l
//   adjacent  -- bosons on sites l and l+1
//   separated -- bosons on sites l and l+2
namespace two_comp {
inline constexpr int adjacent = 0;
inline constexpr int onsite = 1;
inline constexpr int count = 2;
}  // namespace two_comp

namespace three_comp {
inline constexpr int separated = 0;
inline constexpr int adjacent = 1;
inline constexpr int onsite = 2;
inline constexpr int count = 3;
}  // namespace three_comp

/// Per-site multi-component amplitude vector, layout amp[site*num_comp + comp].
struct MultiCompState {
  VectorXc amp;
  int num_sites = 0;
  int num_comp = 1;

  Complex& at(int site_index, int comp) { return amp[site_index * num_comp + comp]; }
  Complex at(int site_index, int comp) const { return amp[site_index * num_comp + comp]; }
  double norm() const { return amp.norm(); }
};

/// Probability mass per Fock family of a full two-boson state:
/// [0] both on one site, [1] adjacent, [2] separated by exactly one empty
/// site, [3] separated further.
Eigen::Vector4d family_masses_full(const VectorXc& amp, int num_sites);

/// Probability mass per component of an interleaved multi-component state.
Eigen::VectorXd component_masses(const VectorXc& amp, int num_sites, int num_comp);

}  // namespace pairtunnel
