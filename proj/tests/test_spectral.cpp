#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pairtunnel/hamiltonian.hpp"
#include "pairtunnel/spectral.hpp"

using namespace pairtunnel;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams params(double u0, double u1) {
  ModelParams p;
  p.J = 1.0;
  p.U0 = u0;
  p.U1 = u1;
  p.num_sites = 11;
  p.boundary = Boundary::Periodic;
  return p;
}

}  // namespace

TEST_CASE("two-state dispersion closed form") {
  SUBCASE("zone edge reaches the diagonal energies") {
    const ModelParams p = params(-5, -3);
    CHECK(dispersion_two_state(p, kPi, Band::Lower) == doctest::Approx(-5.0).epsilon(1e-14));
    CHECK(dispersion_two_state(p, kPi, Band::Upper) == doctest::Approx(-3.0).epsilon(1e-14));
  }
  SUBCASE("lower-band width at gap 2 is sqrt(3) - 1") {
    const ModelParams p = params(-4, -2);
    const double width =
        dispersion_two_state(p, kPi, Band::Lower) - dispersion_two_state(p, 0, Band::Lower);
    CHECK(width == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-12));
    CHECK(width == doctest::Approx(0.7321).epsilon(2e-4));
  }
  SUBCASE("direct evaluation") {
    const ModelParams p = params(-5, -1);
    CHECK(dispersion_two_state(p, 0, Band::Lower) ==
          doctest::Approx(-5.0 + 2.0 - std::sqrt(6.0)).epsilon(1e-14));
    CHECK(dispersion_two_state(p, 0, Band::Lower) == doctest::Approx(-5.4495).epsilon(1e-4));
  }
  SUBCASE("even and 2 pi periodic") {
    const ModelParams p = params(-4, -2);
    for (double kappa : {0.37, 1.234, 2.9}) {
      CHECK(dispersion_two_state(p, kappa, Band::Lower) ==
            doctest::Approx(dispersion_two_state(p, -kappa, Band::Lower)).epsilon(1e-14));
      CHECK(dispersion_two_state(p, kappa, Band::Lower) ==
            doctest::Approx(dispersion_two_state(p, kappa + 2 * kPi, Band::Lower))
                .epsilon(1e-14));
    }
  }
}

TEST_CASE("exact dispersion") {
  const ModelParams p = params(-2, 0);
  CHECK(dispersion_exact(p, 0) == doctest::Approx(-2.8284271247).epsilon(1e-9));
  CHECK(dispersion_exact(p, kPi) == doctest::Approx(-2.0).epsilon(1e-14));

  // finite-lattice oracle: quantized kappa on 11 sites
  const auto h = build_full_hamiltonian(p, PotentialProfile::none());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(h),
                                                         Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  std::vector<double> expected;
  for (int n = 0; n < 11; ++n) expected.push_back(dispersion_exact(p, 2.0 * kPi * n / 11.0));
  std::sort(expected.begin(), expected.end());
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(std::abs(ev[static_cast<int>(i)] - expected[i]) <= 1e-2);
}

TEST_CASE("bloch eigenproblem") {
  SUBCASE("zone edge assignment by diagonal energy") {
    const BlochPoint p = bloch_eigenproblem(params(-5, -3), kPi);
    CHECK(std::abs(p.C_minus[two_comp::onsite] - 1.0) <= 1e-14);
    CHECK(std::abs(p.C_minus[two_comp::adjacent]) <= 1e-14);
    CHECK(p.E_minus == doctest::Approx(-5.0));
    CHECK(p.E_plus == doctest::Approx(-3.0));
  }
  SUBCASE("degenerate diagonal splits by sqrt(2) J at the zone center") {
    const BlochPoint p = bloch_eigenproblem(params(-3, -3), 0);
    CHECK(p.E_minus == doctest::Approx(-3.0 - std::sqrt(2.0)).epsilon(1e-14));
    CHECK(p.E_plus == doctest::Approx(-3.0 + std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("eigenvalues match the dispersion everywhere") {
    const ModelParams p = params(-4, -2);
    for (double kappa : {0.1, 0.7, 1.3, 2.2, 2.9, kPi}) {
      const BlochPoint b = bloch_eigenproblem(p, kappa);
      CHECK(std::abs(b.E_minus - dispersion_two_state(p, kappa, Band::Lower)) <= 1e-12);
      CHECK(std::abs(b.E_plus - dispersion_two_state(p, kappa, Band::Upper)) <= 1e-12);
    }
  }
  SUBCASE("gauge: onsite component real and non-negative, unit norm") {
    const ModelParams p = params(-4, -2);
    for (double kappa : {0.3, 1.1, 2.7}) {
      const BlochPoint b = bloch_eigenproblem(p, kappa);
      CHECK(b.C_minus.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(b.C_minus[two_comp::onsite].imag() == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(b.C_minus[two_comp::onsite].real() >= 0.0);
    }
  }
  SUBCASE("lower-band eigenvector is continuous across the grid") {
    const ModelParams p = params(-4, -2);
    const BlochSolution band = solve_bloch_band(p, 512);
    double worst = 0;
    for (size_t i = 1; i < band.C_minus.size(); ++i)
      worst = std::max(worst, (band.C_minus[i] - band.C_minus[i - 1]).norm());
    CHECK(worst <= 0.05);  // ~ d|C|/dk * 2 pi / 512
  }
}

TEST_CASE("band structure over the Peierls phase") {
  const ModelParams p = params(-2, 0);
  SUBCASE("rejects open boundary") {
    ModelParams open = p;
    open.boundary = Boundary::Open;
    CHECK_THROWS_AS(band_structure_full(open, {0.0}), std::invalid_argument);
  }
  SUBCASE("bound band separated from the continuum and gauge-periodic") {
    std::vector<double> thetas;
    for (int i = 0; i < 21; ++i) thetas.push_back(2.0 * kPi / 11.0 * i / 20.0);
    const auto spectra = band_structure_full(p, thetas);
    double lowest_min = 1e300;
    for (const auto& ev : spectra) {
      CHECK(ev[10] < ev[11]);  // 11 bound states below the two-boson continuum
      lowest_min = std::min(lowest_min, ev[0]);
    }
    // sweeping theta samples the band continuously down to its bottom
    CHECK(lowest_min == doctest::Approx(-std::sqrt(4.0 + 4.0)).epsilon(1e-2 / 2.83));
    const Eigen::VectorXd diff = spectra.front() - spectra.back();
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-10);  // theta = 0 vs 2 pi / 11
  }
}

TEST_CASE("wannier states") {
  SUBCASE("amplitudes for U0 = -4, U1 = 0") {
    const WannierState w = wannier_states(params(-4, 0));
    CHECK(w.amplitude_at(0, two_comp::onsite) == doctest::Approx(0.975).epsilon(5e-3 / 0.975));
    CHECK(w.amplitude_at(0, two_comp::adjacent) == doctest::Approx(0.157).epsilon(5e-3 / 0.157));
    CHECK(w.amplitude_at(-1, two_comp::adjacent) == doctest::Approx(0.157).epsilon(5e-3 / 0.157));
  }
  SUBCASE("normalized") {
    const WannierState w = wannier_states(params(-4, -2));
    CHECK(w.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(w.aliasing_warning);
  }
  SUBCASE("onsite component mirror-symmetric about the center") {
    const WannierState w = wannier_states(params(-4, -2));
    for (int j = 1; j <= 8; ++j)
      CHECK(std::abs(w.amplitude_at(j, two_comp::onsite) -
                     w.amplitude_at(-j, two_comp::onsite)) <= 1e-8);
    // the adjacent component mirrors with the offset shifted by one
    for (int j = 1; j <= 8; ++j)
      CHECK(std::abs(w.amplitude_at(j, two_comp::adjacent) -
                     w.amplitude_at(-j - 1, two_comp::adjacent)) <= 1e-8);
  }
  SUBCASE("strong-gap decay: one order of magnitude per offset") {
    const WannierState w = wannier_states(params(-8, 0));
    auto mag = [&](int j) {
      return std::hypot(w.amplitude_at(j, two_comp::onsite),
                        w.amplitude_at(j, two_comp::adjacent));
    };
    for (int j = 1; j <= 4; ++j) CHECK(mag(j + 1) <= 0.1 * mag(j));
  }
}

TEST_CASE("hopping integrals") {
  SUBCASE("I_0 is minus the band average") {
    const ModelParams p = params(-4, -2);
    const EffectiveHoppings h = hopping_integrals(p, HoppingMethod::FittedFromBand, 8);
    double mean = 0;
    const int fine = 8192;
    for (int n = 0; n < fine; ++n)
      mean += dispersion_two_state(p, -kPi + 2 * kPi * (n + 1.0) / fine, Band::Lower);
    mean /= fine;
    CHECK(h.values[0] == doctest::Approx(-mean).epsilon(1e-10));
  }
  SUBCASE("dominant hopping near half the bandwidth at gap 2") {
    const EffectiveHoppings h =
        hopping_integrals(params(-4, -2), HoppingMethod::FittedFromBand, 8);
    CHECK(std::abs(h.values[1] - 0.36603) <= 0.15 * 0.36603);
  }
  SUBCASE("next-to-nearest hopping negligible at a large gap") {
    const EffectiveHoppings h =
        hopping_integrals(params(-40, 0), HoppingMethod::FittedFromBand, 6);
    CHECK(std::abs(h.values[2]) / std::abs(h.values[1]) < 0.05);
  }
  SUBCASE("the two computation routes agree") {
    for (auto [u0, u1] : {std::pair{-4.0, -2.0}, std::pair{-4.0, 0.0}, std::pair{-8.0, -6.0}}) {
      const ModelParams p = params(u0, u1);
      const EffectiveHoppings fitted = hopping_integrals(p, HoppingMethod::FittedFromBand, 6);
      const EffectiveHoppings wannier =
          hopping_integrals(p, HoppingMethod::WannierMatrixElements, 6);
      const size_t n = std::min(fitted.values.size(), wannier.values.size());
      for (size_t m = 0; m < n; ++m)
        CHECK(std::abs(fitted.values[m] - wannier.values[m]) <= 1e-8);
    }
  }
  SUBCASE("one-state spectrum synthesized from the integrals") {
    const ModelParams p = params(-4, -2);
    const EffectiveHoppings h = hopping_integrals(p, HoppingMethod::FittedFromBand, 10);
    const auto h1 = build_one_state_hamiltonian(h, PotentialProfile::none(), 96,
                                                Boundary::Periodic);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(h1),
                                                           Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = solver.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    std::vector<double> expected;
    for (int n = 0; n < 96; ++n) {
      const double kappa = 2.0 * kPi * n / 96.0;
      double e = -h.values[0];
      for (int m = 1; m <= h.m_max(); ++m)
        e -= h.values[static_cast<size_t>(m)] * std::cos(m * kappa);
      expected.push_back(e);
    }
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < ev.size(); ++i)
      CHECK(std::abs(ev[i] - expected[static_cast<size_t>(i)]) <= 1e-8);
  }
}

TEST_CASE("group velocity") {
  const ModelParams p = params(-2, 0);
  CHECK(group_velocity(p, 0, DispersionModel::Exact) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(group_velocity(p, kPi, DispersionModel::Exact) == doctest::Approx(0.0).epsilon(1e-9));
  for (double kappa : {0.4, 1.2, 2.4})
    CHECK(group_velocity(p, kappa, DispersionModel::Exact) > 0.0);
  // closed-form derivative of the exact dispersion
  const double kappa = 0.5 * kPi;
  const double expected =
      std::sin(kappa) / std::sqrt(4.0 + 2.0 * (1.0 + std::cos(kappa)));
  CHECK(group_velocity(p, kappa, DispersionModel::Exact) ==
        doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("bound-band admixture outside the truncated families stays small") {
  ModelParams p = params(-2, 0);  // |U0| = 2J, the edge of the validity domain
  p.num_sites = 11;
  const double admixture = bound_band_admixture(p);
  CHECK(admixture <= 0.055);
  CHECK(admixture > 0.0);
}

TEST_CASE("wannier matrix elements do not depend on the center site") {
  // real-space check of lattice translation invariance: embed the Wannier
  // state at two different ring sites and take the same matrix elements
  const ModelParams p = params(-4, -2);
  const int L = 128;
  const WannierState w = wannier_states(p, L);
  ModelParams ring = p;
  ring.num_sites = L;
  const SparseMatrixXc h = build_two_state_hamiltonian(ring, PotentialProfile::none());

  auto embed = [&](int center) {
    VectorXc v = VectorXc::Zero(2 * L);
    for (size_t i = 0; i < w.offsets.size(); ++i) {
      const int site = ((center + w.offsets[i]) % L + L) % L;
      v[site * 2 + two_comp::adjacent] = w.adjacent_amp[i];
      v[site * 2 + two_comp::onsite] = w.onsite_amp[i];
    }
    return v;
  };

  for (int m = 0; m <= 3; ++m) {
    const Complex at40 = embed(40 + m).dot(h * embed(40));
    const Complex at80 = embed(80 + m).dot(h * embed(80));
    CHECK(std::abs(at40 - at80) <= 1e-12);
  }
}
