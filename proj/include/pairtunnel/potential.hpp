#pragma once

#include <string>
#include <vector>

namespace pairtunnel {

/// Static scattering potential eps_l on the lattice.
///
/// Every profile carries a support cutoff: value(l) is exactly zero outside
/// [support_min(), support_max()].  For the Gaussian shape the cutoff is the
/// smallest radius at which |eps_l| < 1e-14 |V|, but at least ceil(6 sigma)+2.
class PotentialProfile {
 public:
  enum class Shape { None, Gaussian, Impurity, Box, Tabulated };

  static PotentialProfile none();
  static PotentialProfile gaussian(double amplitude, double sigma, int center = 0);
  static PotentialProfile impurity(double amplitude, int site = 0);
  static PotentialProfile box(double amplitude, int site_start, int site_end);
  static PotentialProfile tabulated(std::vector<double> values, int first_site);

  double value(int site) const;

  int support_min() const { return support_min_; }
  int support_max() const { return support_max_; }

  Shape shape() const { return shape_; }
  double amplitude() const { return amplitude_; }
  double sigma() const { return sigma_; }
  int center() const { return center_; }

  /// Same shape with a new amplitude; used by sweeps. Throws for Tabulated.
  PotentialProfile with_amplitude(double amplitude) const;

  std::string shape_name() const;

 private:
  PotentialProfile() = default;

  Shape shape_ = Shape::None;
  double amplitude_ = 0.0;
  double sigma_ = 0.0;
  int center_ = 0;
  int box_start_ = 0, box_end_ = 0;
  std::vector<double> values_;
  int first_site_ = 0;
  int support_min_ = 0, support_max_ = -1;  // empty support for None
};

inline double eval_potential(const PotentialProfile& profile, int site) {
  return profile.value(site);
}

}  // namespace pairtunnel
