#include "pairtunnel/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace pairtunnel {

namespace {

// Smallest integer radius with |V| exp(-r^2 / 2 sigma^2) < 1e-14 |V|.
// The conventional ceil(6 sigma) + 2 satisfies this only for narrow
// profiles, so take the max of the two.
int gaussian_cutoff(double sigma) {
  const double hard = sigma * std::sqrt(2.0 * 14.0 * std::log(10.0));
  const int by_invariant = static_cast<int>(std::floor(hard)) + 1;
  const int by_convention = static_cast<int>(std::ceil(6.0 * sigma)) + 2;
  return std::max(by_invariant, by_convention);
}

}  // namespace

PotentialProfile PotentialProfile::none() {
  PotentialProfile p;
  p.shape_ = Shape::None;
  return p;
}

PotentialProfile PotentialProfile::gaussian(double amplitude, double sigma, int center) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian potential: sigma must be > 0");
  PotentialProfile p;
  p.shape_ = Shape::Gaussian;
  p.amplitude_ = amplitude;
  p.sigma_ = sigma;
  p.center_ = center;
  const int cut = gaussian_cutoff(sigma);
  p.support_min_ = center - cut;
  p.support_max_ = center + cut;
  return p;
}

PotentialProfile PotentialProfile::impurity(double amplitude, int site) {
  PotentialProfile p;
  p.shape_ = Shape::Impurity;
  p.amplitude_ = amplitude;
  p.center_ = site;
  p.support_min_ = site;
  p.support_max_ = site;
  return p;
}

PotentialProfile PotentialProfile::box(double amplitude, int site_start, int site_end) {
  if (site_end < site_start)
    throw std::invalid_argument("box potential: site_end < site_start");
  PotentialProfile p;
  p.shape_ = Shape::Box;
  p.amplitude_ = amplitude;
  p.box_start_ = site_start;
  p.box_end_ = site_end;
  p.center_ = (site_start + site_end) / 2;
  p.support_min_ = site_start;
  p.support_max_ = site_end;
  return p;
}

PotentialProfile PotentialProfile::tabulated(std::vector<double> values, int first_site) {
  if (values.empty()) throw std::invalid_argument("tabulated potential: empty table");
  PotentialProfile p;
  p.shape_ = Shape::Tabulated;
  p.values_ = std::move(values);
  p.first_site_ = first_site;
  p.center_ = first_site + static_cast<int>(p.values_.size()) / 2;
  p.support_min_ = first_site;
  p.support_max_ = first_site + static_cast<int>(p.values_.size()) - 1;
  return p;
}

double PotentialProfile::value(int site) const {
  if (site < support_min_ || site > support_max_) return 0.0;
  switch (shape_) {
    case Shape::None:
      return 0.0;
    case Shape::Gaussian: {
      const double d = site - center_;
      return amplitude_ * std::exp(-d * d / (2.0 * sigma_ * sigma_));
    }
    case Shape::Impurity:
      return amplitude_;
    case Shape::Box:
      return amplitude_;
    case Shape::Tabulated:
      return values_[static_cast<size_t>(site - first_site_)];
  }
  return 0.0;
}

PotentialProfile PotentialProfile::with_amplitude(double amplitude) const {
  switch (shape_) {
    case Shape::None:
      if (amplitude == 0.0) return *this;
      throw std::invalid_argument("cannot set an amplitude on the empty potential");
    case Shape::Gaussian:
      return gaussian(amplitude, sigma_, center_);
    case Shape::Impurity:
      return impurity(amplitude, center_);
    case Shape::Box:
      return box(amplitude, box_start_, box_end_);
    case Shape::Tabulated:
      throw std::invalid_argument("amplitude sweeps need a parametric potential shape");
  }
  return *this;
}

std::string PotentialProfile::shape_name() const {
  switch (shape_) {
    case Shape::None: return "none";
    case Shape::Gaussian: return "gaussian";
    case Shape::Impurity: return "impurity";
    case Shape::Box: return "box";
    case Shape::Tabulated: return "tabulated";
  }
  return "none";
}

}  // namespace pairtunnel
