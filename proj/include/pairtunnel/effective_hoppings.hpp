#pragma once

#include <string>
#include <vector>

namespace pairtunnel {

/// Hopping integrals I_m of the point-particle picture of the bound pair.
/// values[m] holds I_m, m = 0..m_max; I_0 is the band-offset term.
struct EffectiveHoppings {
  enum class Provenance { FittedFromBand, WannierMatrixElements, User };

  std::vector<double> values;
  Provenance provenance = Provenance::User;

  int m_max() const { return static_cast<int>(values.size()) - 1; }
  double dominant() const;  // |I_1| when present, else largest |I_m|, m >= 1

  static std::string provenance_name(Provenance p);
};

}  // namespace pairtunnel
