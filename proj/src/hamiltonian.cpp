#include "pairtunnel/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pairtunnel {

namespace {

using Triplet = Eigen::Triplet<Complex>;
constexpr double kSqrt2 = 1.4142135623730951;

void check_profile_inside(const ModelParams& params, const PotentialProfile& profile) {
  if (profile.shape() == PotentialProfile::Shape::None) return;
  if (profile.support_min() < params.min_site() || profile.support_max() > params.max_site())
    throw std::invalid_argument("potential support extends beyond the lattice");
}

// Wraps a 0-based site index for periodic chains; returns -1 when the move
// leaves an open chain.
int wrap(int i, int num_sites, Boundary bc) {
  if (i >= 0 && i < num_sites) return i;
  if (bc == Boundary::Open) return -1;
  return (i % num_sites + num_sites) % num_sites;
}

}  // namespace

SparseMatrixXc build_full_hamiltonian(const ModelParams& params,
                                      const PotentialProfile& profile) {
  params.validate();
  check_profile_inside(params, profile);

  const int L = params.num_sites;
  const PairBasis basis(L);
  const Complex hop_right = -0.5 * params.J *
                            std::exp(Complex(0.0, params.theta));
  const Complex hop_left = std::conj(hop_right);

  std::vector<double> eps(L);
  for (int i = 0; i < L; ++i) eps[i] = profile.value(i + params.min_site());

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(basis.dim()) * 6);

  for (int idx = 0; idx < basis.dim(); ++idx) {
    const auto [i, j] = basis.pair_at(idx);

    double diag = eps[i] + eps[j];
    if (i == j) diag += params.U0;
    if (i != j && (j == i + 1 || (params.boundary == Boundary::Periodic && i == 0 && j == L - 1)))
      diag += params.U1;
    trip.emplace_back(idx, idx, Complex(diag, 0.0));

    // single-boson moves out of each distinct occupied site
    const int occupied[2] = {i, j};
    const int count = (i == j) ? 1 : 2;
    for (int k = 0; k < count; ++k) {
      const int src = occupied[k];
      const int other = occupied[1 - k];  // == src when i == j
      const double n_src = (i == j) ? 2.0 : 1.0;
      for (int dir : {+1, -1}) {
        const int dst = wrap(src + dir, L, params.boundary);
        if (dst < 0) continue;
        const double n_dst = (dst == other && i != j) ? 1.0 : 0.0;
        const double bose = std::sqrt(n_src) * std::sqrt(n_dst + 1.0);
        const int a = std::min(dst, (i == j) ? src : other);
        const int b = std::max(dst, (i == j) ? src : other);
        const Complex amp = (dir > 0 ? hop_right : hop_left) * bose;
        trip.emplace_back(basis.index(a, b), idx, amp);
      }
    }
  }

  SparseMatrixXc h(basis.dim(), basis.dim());
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

SparseMatrixXc build_two_state_hamiltonian(const ModelParams& params,
                                           const PotentialProfile& profile) {
  params.validate();
  check_profile_inside(params, profile);

  const int L = params.num_sites;
  const int dim = two_comp::count * L;
  const double g = -0.5 * kSqrt2 * params.J;  // inter-family hop

  std::vector<double> eps(L);
  for (int i = 0; i < L; ++i) eps[i] = profile.value(i + params.min_site());

  auto s_of = [](int l) { return l * two_comp::count + two_comp::adjacent; };
  auto d_of = [](int l) { return l * two_comp::count + two_comp::onsite; };

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(dim) * 4);
  for (int l = 0; l < L; ++l) {
    trip.emplace_back(d_of(l), d_of(l), Complex(params.U0 + 2.0 * eps[l], 0.0));

    const int lp1 = wrap(l + 1, L, params.boundary);
    if (lp1 < 0) continue;  // open edge: the adjacent slot at l = L-1 stays decoupled

    trip.emplace_back(s_of(l), s_of(l), Complex(params.U1 + eps[l] + eps[lp1], 0.0));
    trip.emplace_back(s_of(l), d_of(l), Complex(g, 0.0));
    trip.emplace_back(d_of(l), s_of(l), Complex(g, 0.0));
    trip.emplace_back(s_of(l), d_of(lp1), Complex(g, 0.0));
    trip.emplace_back(d_of(lp1), s_of(l), Complex(g, 0.0));
  }

  SparseMatrixXc h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

SparseMatrixXc build_three_state_hamiltonian(const ModelParams& params,
                                             const PotentialProfile& profile) {
  params.validate();
  check_profile_inside(params, profile);
  if (params.boundary == Boundary::Periodic && params.num_sites < 5)
    throw std::invalid_argument("three-state model needs at least 5 sites on a ring");

  const int L = params.num_sites;
  const int dim = three_comp::count * L;
  const double g2 = -0.5 * kSqrt2 * params.J;  // onsite <-> adjacent
  const double g3 = -0.5 * params.J;           // adjacent <-> separated

  std::vector<double> eps(L);
  for (int i = 0; i < L; ++i) eps[i] = profile.value(i + params.min_site());

  auto w_of = [](int l) { return l * three_comp::count + three_comp::separated; };
  auto s_of = [](int l) { return l * three_comp::count + three_comp::adjacent; };
  auto d_of = [](int l) { return l * three_comp::count + three_comp::onsite; };

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(dim) * 5);
  for (int l = 0; l < L; ++l) {
    trip.emplace_back(d_of(l), d_of(l), Complex(params.U0 + 2.0 * eps[l], 0.0));

    const int lp1 = wrap(l + 1, L, params.boundary);
    if (lp1 >= 0) {
      trip.emplace_back(s_of(l), s_of(l), Complex(params.U1 + eps[l] + eps[lp1], 0.0));
      trip.emplace_back(s_of(l), d_of(l), Complex(g2, 0.0));
      trip.emplace_back(d_of(l), s_of(l), Complex(g2, 0.0));
      trip.emplace_back(s_of(l), d_of(lp1), Complex(g2, 0.0));
      trip.emplace_back(d_of(lp1), s_of(l), Complex(g2, 0.0));
    }

    const int lp2 = wrap(l + 2, L, params.boundary);
    if (lp2 >= 0 && lp1 >= 0) {
      trip.emplace_back(w_of(l), w_of(l), Complex(eps[l] + eps[lp2], 0.0));
      trip.emplace_back(w_of(l), s_of(l), Complex(g3, 0.0));
      trip.emplace_back(s_of(l), w_of(l), Complex(g3, 0.0));
      trip.emplace_back(w_of(l), s_of(lp1), Complex(g3, 0.0));
      trip.emplace_back(s_of(lp1), w_of(l), Complex(g3, 0.0));
    }
  }

  SparseMatrixXc h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

SparseMatrixXc build_one_state_hamiltonian(const EffectiveHoppings& hoppings,
                                           const PotentialProfile& profile,
                                           int num_sites, Boundary boundary) {
  if (hoppings.values.empty())
    throw std::invalid_argument("one-state model needs at least one hopping integral");
  if (num_sites < 3) throw std::invalid_argument("num_sites must be >= 3");

  const int L = num_sites;
  const int min_site = -(L - 1) / 2;
  if (profile.shape() != PotentialProfile::Shape::None &&
      (profile.support_min() < min_site || profile.support_max() > min_site + L - 1))
    throw std::invalid_argument("potential support extends beyond the lattice");

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(L) * (hoppings.values.size() * 2 + 1));
  for (int l = 0; l < L; ++l) {
    const double diag = -hoppings.values[0] + 2.0 * profile.value(l + min_site);
    trip.emplace_back(l, l, Complex(diag, 0.0));
    for (int m = 1; m <= hoppings.m_max(); ++m) {
      const double amp = -0.5 * hoppings.values[static_cast<size_t>(m)];
      if (amp == 0.0) continue;
      for (int dir : {+1, -1}) {
        const int dst = wrap(l + dir * m, L, boundary);
        if (dst < 0) continue;
        trip.emplace_back(dst, l, Complex(amp, 0.0));
      }
    }
  }

  SparseMatrixXc h(L, L);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

double hermiticity_defect(const SparseMatrixXc& h) {
  SparseMatrixXc diff = SparseMatrixXc(h.adjoint()) - h;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrixXc::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

}  // namespace pairtunnel
