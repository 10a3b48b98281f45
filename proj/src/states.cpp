#include "pairtunnel/states.hpp"

namespace pairtunnel {

Eigen::Vector4d family_masses_full(const VectorXc& amp, int num_sites) {
  PairBasis basis(num_sites);
  Eigen::Vector4d masses = Eigen::Vector4d::Zero();
  for (int idx = 0; idx < basis.dim(); ++idx) {
    const auto [l, m] = basis.pair_at(idx);
    const double w = std::norm(amp[idx]);
    const int sep = m - l;
    if (sep == 0)
      masses[0] += w;
    else if (sep == 1)
      masses[1] += w;
    else if (sep == 2)
      masses[2] += w;
    else
      masses[3] += w;
  }
  return masses;
}

Eigen::VectorXd component_masses(const VectorXc& amp, int num_sites, int num_comp) {
  Eigen::VectorXd masses = Eigen::VectorXd::Zero(num_comp);
  for (int l = 0; l < num_sites; ++l)
    for (int c = 0; c < num_comp; ++c) masses[c] += std::norm(amp[l * num_comp + c]);
  return masses;
}

}  // namespace pairtunnel
