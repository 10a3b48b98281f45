#include "pairtunnel/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace pairtunnel {

namespace {

// order above which J_k(x) is below ~1e-17
int chebyshev_order(double x) {
  const double ax = std::abs(x);
  return static_cast<int>(ax + 12.0 * std::cbrt(ax + 1.0) + 20.0);
}

}  // namespace

std::vector<double> bessel_j_array(double x, int n_max) {
  std::vector<double> out(static_cast<size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  // recur downward over the full decay range so the normalization sum is
  // complete even when the caller asks for few orders
  const int full = std::max(n_max, chebyshev_order(x));
  std::vector<double> j(static_cast<size_t>(full) + 1, 0.0);
  const int start = full + 16 + static_cast<int>(2.0 * std::sqrt(double(full) + std::abs(x)));
  double jp1 = 0.0;
  double jc = 1e-300;
  for (int k = start; k >= 1; --k) {
    const double jm1 = (2.0 * k / x) * jc - jp1;
    jp1 = jc;
    jc = jm1;
    if (k - 1 <= full) j[static_cast<size_t>(k - 1)] = jc;
    if (std::abs(jc) > 1e250) {  // rescale mid-recurrence
      jc *= 1e-250;
      jp1 *= 1e-250;
      for (auto& v : j) v *= 1e-250;
    }
  }
  double norm = j[0];  // J_0 + 2 J_2 + 2 J_4 + ... = 1
  for (int k = 2; k <= full; k += 2) norm += 2.0 * j[static_cast<size_t>(k)];
  if (norm == 0.0) throw std::runtime_error("bessel recurrence failed to normalize");
  for (int k = 0; k <= n_max; ++k) out[static_cast<size_t>(k)] = j[static_cast<size_t>(k)] / norm;
  return out;
}

ChebyshevPropagator::ChebyshevPropagator(const SparseMatrixXc& h) : h_(h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("propagator needs a square matrix");
  // Gershgorin bracket of the spectrum
  double lo = 0, hi = 0;
  bool first = true;
  for (int k = 0; k < h.outerSize(); ++k) {
    double center = 0, radius = 0;
    for (SparseMatrixXc::InnerIterator it(h, k); it; ++it) {
      if (it.row() == it.col())
        center = it.value().real();
      else
        radius += std::abs(it.value());
    }
    if (first) {
      lo = center - radius;
      hi = center + radius;
      first = false;
    } else {
      lo = std::min(lo, center - radius);
      hi = std::max(hi, center + radius);
    }
  }
  const double pad = 1e-9 + 1e-3 * (hi - lo);
  e_min_ = lo - pad;
  e_max_ = hi + pad;
  half_span_ = 0.5 * (e_max_ - e_min_);
  center_ = 0.5 * (e_max_ + e_min_);
  if (half_span_ <= 0) half_span_ = 1.0;
}

void ChebyshevPropagator::step(VectorXc& state, double dt) const {
  const double x = half_span_ * dt;
  const int order = std::max(4, chebyshev_order(x));
  const std::vector<double> bessel = bessel_j_array(x, order);

  // scaled operator application: y = (H v - center v) / half_span
  auto apply = [&](const VectorXc& v) -> VectorXc {
    VectorXc y = h_ * v;
    y.noalias() -= center_ * v;
    y /= half_span_;
    return y;
  };

  const Complex minus_i(0.0, -1.0);
  VectorXc t_prev = state;
  VectorXc t_curr = apply(state);
  VectorXc acc = bessel[0] * t_prev;
  Complex ik = minus_i;  // (-i)^k
  acc.noalias() += 2.0 * ik * bessel[1] * t_curr;
  for (int k = 2; k <= order; ++k) {
    ik *= minus_i;
    VectorXc t_next = 2.0 * apply(t_curr);
    t_next.noalias() -= t_prev;
    const double w = bessel[static_cast<size_t>(k)];
    if (w != 0.0) acc.noalias() += 2.0 * ik * w * t_next;
    t_prev = std::move(t_curr);
    t_curr = std::move(t_next);
    if (k > x + 10 && std::abs(w) < 1e-17) break;
  }
  state = std::exp(minus_i * center_ * dt) * acc;
}

double ChebyshevPropagator::energy(const VectorXc& state) const {
  return state.dot(h_ * state).real();
}

}  // namespace pairtunnel
