#include "pairtunnel/model.hpp"

namespace pairtunnel {

std::string to_string(Model m) {
  switch (m) {
    case Model::OneState: return "one_state";
    case Model::TwoState: return "two_state";
    case Model::ThreeState: return "three_state";
    case Model::Full: return "full";
  }
  return "unknown";
}

std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "open";
}

Model model_from_string(const std::string& s) {
  if (s == "one_state") return Model::OneState;
  if (s == "two_state") return Model::TwoState;
  if (s == "three_state") return Model::ThreeState;
  if (s == "full") return Model::Full;
  throw std::invalid_argument("unknown model: " + s);
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "open") return Boundary::Open;
  throw std::invalid_argument("unknown boundary: " + s);
}

void ModelParams::validate() const {
  if (!(J > 0.0)) throw std::invalid_argument("ModelParams: J must be > 0");
  if (num_sites < 3) throw std::invalid_argument("ModelParams: num_sites must be >= 3");
  if (!std::isfinite(U0) || !std::isfinite(U1) || !std::isfinite(theta))
    throw std::invalid_argument("ModelParams: couplings must be finite");
}

}  // namespace pairtunnel
