#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pairtunnel {

enum class Boundary { Periodic, Open };

/// Which level of truncation of the two-boson problem a routine works on.
enum class Model { OneState, TwoState, ThreeState, Full };

std::string to_string(Model m);
std::string to_string(Boundary b);
Model model_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);

/// Couplings and lattice geometry of the two-boson chain.
///
/// Site coordinates are signed integers; site 0 is the middle site of the
/// chain, so a chain of num_sites L spans [-(L-1)/2, -(L-1)/2 + L - 1].
struct ModelParams {
  double J = 1.0;      // single-boson hopping energy, J > 0
  double U0 = 0.0;     // on-site interaction energy
  double U1 = 0.0;     // nearest-neighbor interaction energy
  double theta = 0.0;  // Peierls phase attached to rightward hops (full model only)
  int num_sites = 3;
  Boundary boundary = Boundary::Periodic;

  /// Band gap parameter of the truncated models, always derived.
  double gap() const { return std::abs(U0 - U1); }

  int min_site() const { return -(num_sites - 1) / 2; }
  int max_site() const { return min_site() + num_sites - 1; }
  bool contains_site(int l) const { return l >= min_site() && l <= max_site(); }

  /// Throws std::invalid_argument if J <= 0 or num_sites < 3.
  void validate() const;
};

}  // namespace pairtunnel
