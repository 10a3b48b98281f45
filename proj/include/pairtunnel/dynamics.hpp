#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pairtunnel/hamiltonian.hpp"
#include "pairtunnel/potential.hpp"
#include "pairtunnel/scattering.hpp"
#include "pairtunnel/states.hpp"

namespace pairtunnel {

/// Incoming wave packet riding the lower bound-pair band.
struct WavePacketSpec {
  double kappa0 = 1.5707963267948966;  // carrier quasimomentum
  int center = 0;                      // site l0
  double sigma = 10.0;                 // spatial amplitude width, >= 5 sites
};

/// Region partition used to classify the final state.
struct RegionParams {
  int bound_separation = 2;   // |l - m| <= this counts as a bound pair
  int barrier_halfwidth = 0;  // 0: ceil(6 sigma) + 2 for Gaussian profiles,
                              //    support extent + 2 otherwise
};

struct OutcomeProbs {
  double transmitted = 0;   // P_t
  double reflected = 0;     // P_r
  double dissociated = 0;   // P_d
  double unclassified = 0;
  int barrier_halfwidth = 0;
  int bound_separation = 2;
};

/// Per-sample probability in each Fock family.  For the full model the
/// separated family is additionally split into exactly-one-empty-site and
/// farther apart.
struct OccupationTraces {
  std::vector<double> times;
  std::vector<double> same_site;         // family 1
  std::vector<double> adjacent;          // family 2
  std::vector<double> separated;         // family 3 (any separation >= 2)
  std::vector<double> separated_by_one;  // full model only, separation == 2
};

struct PropagationReport {
  double norm_drift_per_time = 0;    // max |norm - 1| / elapsed
  double energy_drift_relative = 0;  // max |E(t) - E(0)| / max(|E(0)|, 1)
  double wall_seconds = 0;
};

/// Builds the normalized t = 0 packet for the given model.
///
/// One-state packets are a Gaussian envelope times a plane wave; two- and
/// three-state packets superpose lower-band Bloch states with Gaussian
/// quasimomentum weights (sigma_kappa = 1/sigma); full-model packets
/// superpose the exact bound-band eigenstates of the clean periodic lattice,
/// windowed onto the open scattering lattice.  Throws if the packet comes
/// closer than 4 sigma to a lattice edge or to the potential support.
VectorXc make_packet(Model model, const ModelParams& params, const WavePacketSpec& spec,
                     const PotentialProfile& profile,
                     const ScatterOptions& options = {});

using SampleObserver = std::function<void(double t, const VectorXc& state)>;

/// Solves i d/dt psi = H psi from t = 0 to t_final, calling the observer at
/// t = 0, every sample_every, and at t_final.  Throws if the norm drift
/// exceeds 1e-8 per unit time.  Returns the final state.
VectorXc propagate(const SparseMatrixXc& h, VectorXc state, double t_final,
                   double sample_every, const SampleObserver& observer = {},
                   PropagationReport* report = nullptr);

/// Family traces extracted during propagation (helper observer factory).
class FamilyTraceRecorder {
 public:
  FamilyTraceRecorder(Model model, int num_sites);
  SampleObserver observer();
  const OccupationTraces& traces() const { return traces_; }

 private:
  Model model_;
  int num_sites_;
  OccupationTraces traces_;
};

/// Classifies a final full-model state into transmitted / reflected /
/// dissociated / unclassified probability.  The partition over pairs (l, m):
/// a pair with exactly one boson inside the barrier region [-L_b, L_b] is
/// dissociated; otherwise a bound pair (|l-m| <= bound_separation) is
/// transmitted (min > L_b), reflected (max < -L_b) or unclassified; an
/// unbound pair is dissociated when both bosons are outside and unclassified
/// when both are inside.
OutcomeProbs classify_outcomes(const VectorXc& final_state, const ModelParams& params,
                               const PotentialProfile& profile,
                               const RegionParams& regions = {});

struct ExperimentOptions {
  double t_final = 0;       // 0: twice the barrier-arrival time 2 |l0 - c| / |v_g|
  double sample_every = 1.0;
  RegionParams regions;
  ScatterOptions scatter;   // one-state hopping convention
  bool keep_final_state = false;
};

struct ExperimentResult {
  OutcomeProbs outcomes;
  OccupationTraces traces;
  PropagationReport report;
  double t_final = 0;
  double group_velocity = 0;
  double initial_energy = 0;
  std::optional<VectorXc> final_state;
};

/// make_packet -> propagate -> classify.  For the truncated models the
/// dissociation channel does not exist and the classification reduces to the
/// transmitted/reflected mass of the site coordinate.
ExperimentResult run_scattering_experiment(Model model, const ModelParams& params,
                                           const PotentialProfile& profile,
                                           const WavePacketSpec& spec,
                                           const ExperimentOptions& options = {});

/// Energy of the exact bound band of the clean lattice at quasimomentum
/// kappa (relative-coordinate block diagonalization), and its derivative.
double bound_band_energy(const ModelParams& params, double kappa);
double bound_band_group_velocity(const ModelParams& params, double kappa);

/// Energy bookkeeping for the dissociation channel: the pair (energy from
/// the exact bound band at kappa0) breaks into one boson captured in a
/// single-particle level of the well plus one free boson on the [-J, J]
/// band, or into two free bosons.  Returns true when either arrangement
/// conserves energy; margin (if given) receives the distance to the nearest
/// band edge, negative when closed.
bool dissociation_channel_open(const ModelParams& params, const PotentialProfile& profile,
                               double kappa0, double* margin = nullptr);

}  // namespace pairtunnel
