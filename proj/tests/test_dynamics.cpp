#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pairtunnel/dynamics.hpp"
#include "pairtunnel/hamiltonian.hpp"
#include "pairtunnel/propagator.hpp"
#include "pairtunnel/spectral.hpp"

using namespace pairtunnel;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams open_lattice(double u0, double u1, int sites = 201) {
  ModelParams p;
  p.J = 1.0;
  p.U0 = u0;
  p.U1 = u1;
  p.num_sites = sites;
  p.boundary = Boundary::Open;
  return p;
}

WavePacketSpec default_packet() {
  WavePacketSpec s;
  s.kappa0 = 0.5 * kPi;
  s.center = -60;
  s.sigma = 10;
  return s;
}

}  // namespace

TEST_CASE("bessel array matches known values") {
  // reference values of J_k(2.0)
  const auto j = bessel_j_array(2.0, 4);
  CHECK(j[0] == doctest::Approx(0.22389077914123567).epsilon(1e-13));
  CHECK(j[1] == doctest::Approx(0.5767248077568734).epsilon(1e-13));
  CHECK(j[2] == doctest::Approx(0.3528340286156377).epsilon(1e-13));
  CHECK(j[3] == doctest::Approx(0.12894324947440205).epsilon(1e-12));
  // large argument: J_0(100)
  const auto big = bessel_j_array(100.0, 2);
  CHECK(big[0] == doctest::Approx(0.019985850304223122).epsilon(1e-10));
}

TEST_CASE("packet construction") {
  const PotentialProfile none = PotentialProfile::none();

  SUBCASE("normalized for every model") {
    const ModelParams p = open_lattice(-4, -2);
    for (Model model : {Model::OneState, Model::TwoState, Model::ThreeState, Model::Full}) {
      const VectorXc psi = make_packet(model, p, default_packet(), none);
      CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("centroid sits at the requested site") {
    const ModelParams p = open_lattice(-2, 0);
    const VectorXc one = make_packet(Model::OneState, p, default_packet(), none);
    double centroid = 0;
    for (int i = 0; i < p.num_sites; ++i)
      centroid += (i + p.min_site()) * std::norm(one[i]);
    CHECK(centroid == doctest::Approx(-60.0).epsilon(0.1 / 60.0));

    const VectorXc full = make_packet(Model::Full, p, default_packet(), none);
    const PairBasis basis(p.num_sites);
    double com = 0;
    for (int idx = 0; idx < basis.dim(); ++idx) {
      const auto [i, j] = basis.pair_at(idx);
      com += 0.5 * (i + j + 2 * p.min_site()) * std::norm(full[idx]);
    }
    CHECK(std::abs(com - (-60.0)) <= 0.1);
  }

  SUBCASE("full packet composition matches the Bloch picture") {
    const ModelParams p = open_lattice(-4, -2);
    const VectorXc psi = make_packet(Model::Full, p, default_packet(), none);
    const Eigen::Vector4d fams = family_masses_full(psi, p.num_sites);
    const BlochPoint b = bloch_eigenproblem(p, 0.5 * kPi);
    const double expected = std::norm(b.C_minus[two_comp::onsite]);
    CHECK(std::abs(fams[0] - expected) <= 0.02);
  }

  SUBCASE("margin violations are rejected") {
    const ModelParams p = open_lattice(-2, 0, 101);
    WavePacketSpec spec = default_packet();
    spec.center = -40;  // only 10 sites from the edge at 4 sigma = 40
    CHECK_THROWS_AS(make_packet(Model::OneState, p, spec, none), std::invalid_argument);

    WavePacketSpec narrow = default_packet();
    narrow.sigma = 3;
    CHECK_THROWS_AS(make_packet(Model::OneState, open_lattice(-2, 0), narrow, none),
                    std::invalid_argument);

    WavePacketSpec overlapping = default_packet();
    overlapping.center = -20;  // 4 sigma = 40 > distance to the support edge
    CHECK_THROWS_AS(make_packet(Model::OneState, open_lattice(-2, 0), overlapping,
                                PotentialProfile::gaussian(-2, 0.65, 0)),
                    std::invalid_argument);
  }
}

TEST_CASE("propagation basics") {
  SUBCASE("diagonal hamiltonian leaves probabilities static") {
    // hopping truncated to the offset term only: stationary states
    EffectiveHoppings diag_only;
    diag_only.values = {0.7};
    const auto h = build_one_state_hamiltonian(diag_only, PotentialProfile::impurity(0.9, 0),
                                               21, Boundary::Open);
    VectorXc psi = VectorXc::Zero(21);
    psi[3] = Complex(0.6, 0.0);
    psi[10] = Complex(0.0, 0.8);
    const VectorXc start = psi;
    const VectorXc end = propagate(h, psi, 50.0, 5.0);
    for (int i = 0; i < 21; ++i)
      CHECK(std::abs(std::norm(end[i]) - std::norm(start[i])) <= 1e-12);
  }

  SUBCASE("free full-model packet travels at the band group velocity") {
    const ModelParams p = open_lattice(-2, 0);
    const VectorXc psi = make_packet(Model::Full, p, default_packet(), PotentialProfile::none());
    const auto h = build_full_hamiltonian(p, PotentialProfile::none());

    const PairBasis basis(p.num_sites);
    auto centroid = [&](const VectorXc& state) {
      double c = 0;
      for (int idx = 0; idx < basis.dim(); ++idx) {
        const auto [i, j] = basis.pair_at(idx);
        c += 0.5 * (i + j + 2 * p.min_site()) * std::norm(state[idx]);
      }
      return c;
    };

    const double t_run = 60.0;
    VectorXc state = psi;
    const double c0 = centroid(state);
    state = propagate(h, std::move(state), t_run, t_run);
    const double measured = (centroid(state) - c0) / t_run;
    const double expected = group_velocity(p, 0.5 * kPi, DispersionModel::Exact);
    CHECK(std::abs(measured - expected) <= 0.02 * std::abs(expected));
  }

  SUBCASE("norm and energy stay put, backward propagation restores the state") {
    const ModelParams p = open_lattice(-4, -2, 101);
    WavePacketSpec spec = default_packet();
    spec.center = -25;
    spec.sigma = 6;
    const auto h = build_two_state_hamiltonian(p, PotentialProfile::none());
    const VectorXc psi = make_packet(Model::TwoState, p, spec, PotentialProfile::none());

    PropagationReport report;
    VectorXc forward = propagate(h, psi, 40.0, 1.0, {}, &report);
    CHECK(report.norm_drift_per_time <= 1e-10);
    CHECK(report.energy_drift_relative <= 1e-10);

    // reverse evolution: the propagator accepts a negative time step
    VectorXc back = propagate(SparseMatrixXc(-h), std::move(forward), 40.0, 1.0);
    const double fidelity = std::abs(back.dot(psi));
    CHECK(fidelity >= 1.0 - 1e-6);
  }
}

TEST_CASE("wave packet margins must also respect the spec sigma floor") {
  WavePacketSpec spec = default_packet();
  CHECK(spec.sigma >= 5.0);
}

TEST_CASE("occupation traces") {
  SUBCASE("deep-bound packet starts in the same-site family") {
    const ModelParams p = open_lattice(-4, -2);
    const PotentialProfile profile = PotentialProfile::gaussian(-2.2, 0.65, 0);
    ExperimentOptions opt;
    opt.t_final = 20.0;  // a short leg is enough for the initial composition
    const ExperimentResult r =
        run_scattering_experiment(Model::Full, p, profile, default_packet(), opt);
    const BlochPoint b = bloch_eigenproblem(p, 0.5 * kPi);
    CHECK(std::abs(r.traces.same_site.front() - std::norm(b.C_minus[two_comp::onsite])) <=
          0.02);
    CHECK(r.traces.separated.front() <= 0.01);
    const size_t n = r.traces.times.size();
    for (size_t i = 0; i < n; ++i) {
      const double total =
          r.traces.same_site[i] + r.traces.adjacent[i] + r.traces.separated[i];
      CHECK(std::abs(total - 1.0) <= 1e-10);
    }
  }

  SUBCASE("resonant transit shows a transient adjacent-family bump") {
    const ModelParams p = open_lattice(-4, -2);
    const PotentialProfile profile = PotentialProfile::gaussian(-2.2, 0.65, 0);
    const ExperimentResult r =
        run_scattering_experiment(Model::TwoState, p, profile, default_packet());
    const double base = r.traces.adjacent.front();
    double peak = 0;
    for (double v : r.traces.adjacent) peak = std::max(peak, v);
    CHECK(peak - base > 0.05);
  }
}

TEST_CASE("outcome classification") {
  SUBCASE("free propagation is all transmission") {
    const ModelParams p = open_lattice(-2, 0);
    const ExperimentResult r = run_scattering_experiment(
        Model::Full, p, PotentialProfile::none(), default_packet());
    // the bound pair has a small separation tail beyond bound_separation = 2,
    // which the region partition books as dissociated mass of a few 1e-3
    CHECK(r.outcomes.transmitted >= 1.0 - 5e-3);
    CHECK(r.outcomes.dissociated <= 5e-3);
    CHECK(r.outcomes.reflected <= 1e-6);
  }

  SUBCASE("partition is exact by construction") {
    const ModelParams p = open_lattice(-2, 0);
    const PotentialProfile profile = PotentialProfile::gaussian(-2.0, 0.65, 0);
    ExperimentOptions opt;
    opt.keep_final_state = true;
    const ExperimentResult r =
        run_scattering_experiment(Model::Full, p, profile, default_packet(), opt);
    const OutcomeProbs& o = r.outcomes;
    const double sum = o.transmitted + o.reflected + o.dissociated + o.unclassified;
    CHECK(std::abs(sum - r.final_state->squaredNorm()) <= 1e-12);
    CHECK(o.dissociated > 1e-2);  // the dissociation channel is open here
  }

  SUBCASE("energetically closed dissociation stays empty") {
    const ModelParams p = open_lattice(-8, -6);
    const PotentialProfile profile = PotentialProfile::gaussian(-0.5, 0.65, 0);
    double margin = 0;
    CHECK_FALSE(dissociation_channel_open(p, profile, 0.5 * kPi, &margin));
    CHECK(margin < 0);
    const ExperimentResult r =
        run_scattering_experiment(Model::Full, p, profile, default_packet());
    CHECK(r.outcomes.dissociated <= 1e-3);
  }

  SUBCASE("open dissociation detected for the reference configuration") {
    const ModelParams p = open_lattice(-2, 0);
    const PotentialProfile profile = PotentialProfile::gaussian(-2.0, 0.65, 0);
    double margin = 0;
    CHECK(dissociation_channel_open(p, profile, 0.5 * kPi, &margin));
    CHECK(margin > 0);
  }
}

TEST_CASE("two-state dynamics agrees with the transfer matrix") {
  const ModelParams p = open_lattice(-4, -2, 401);
  const PotentialProfile profile = PotentialProfile::gaussian(-1.0, 0.65, 0);
  WavePacketSpec spec = default_packet();
  spec.center = -100;
  spec.sigma = 14;
  const ExperimentResult dyn = run_scattering_experiment(Model::TwoState, p, profile, spec);
  const ScatterSolution tm = solve_scattering(Model::TwoState, p, profile, spec.kappa0);
  CHECK(std::abs(dyn.outcomes.transmitted - tm.P_t) <= 0.02);
}

TEST_CASE("three-state separated family stays a spectator") {
  const ModelParams p = open_lattice(-4, -2);
  const PotentialProfile profile = PotentialProfile::gaussian(-2.2, 0.65, 0);
  const ExperimentResult r =
      run_scattering_experiment(Model::ThreeState, p, profile, default_packet());
  double worst = 0;
  for (double v : r.traces.separated) worst = std::max(worst, v);
  CHECK(worst < 0.05);
}

TEST_CASE("bound band block diagonalization") {
  SUBCASE("matches the exact dispersion for U1 = 0") {
    ModelParams p;
    p.J = 1;
    p.U0 = -2;
    p.U1 = 0;
    for (double kappa : {0.3, 0.5 * kPi, 2.4})
      CHECK(bound_band_energy(p, kappa) ==
            doctest::Approx(dispersion_exact(p, kappa)).epsilon(1e-10));
  }
  SUBCASE("group velocity consistent with the dispersion derivative") {
    ModelParams p;
    p.J = 1;
    p.U0 = -2;
    p.U1 = 0;
    CHECK(bound_band_group_velocity(p, 0.5 * kPi) ==
          doctest::Approx(group_velocity(p, 0.5 * kPi, DispersionModel::Exact))
              .epsilon(1e-6));
  }
}
