#include "pairtunnel/scattering.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pairtunnel/io_util.hpp"
#include "pairtunnel/spectral.hpp"
#include "pairtunnel/states.hpp"

namespace pairtunnel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kBandEdgeMargin = 1e-3;
constexpr double kResidualTol = 1e-8;
constexpr int kRenormEvery = 8;

using Eigen::Matrix3cd;
using Eigen::Vector2cd;
using Eigen::Vector3cd;

Complex phase(double x) { return std::exp(Complex(0.0, x)); }

// Free channel vectors in the transfer-vector layout of each model.
struct FreeChannels {
  double energy = 0;
  Eigen::VectorXcd right, left;  // eigenvalue e^{+i kappa} / e^{-i kappa}
  Eigen::VectorXcd null;         // eigenvalue 0, three-state only
};

FreeChannels free_channels(Model model, const ModelParams& params, double kappa,
                           double one_state_hopping) {
  FreeChannels ch;
  switch (model) {
    case Model::OneState: {
      ch.energy = -one_state_hopping * std::cos(kappa);
      ch.right = Eigen::Vector2cd(1.0, phase(-kappa));
      ch.left = Eigen::Vector2cd(1.0, phase(kappa));
      break;
    }
    case Model::TwoState: {
      const BlochPoint p = bloch_eigenproblem(params, kappa);
      ch.energy = p.E_minus;
      // transfer vector is (adjacent_l, onsite_l)
      ch.right = p.C_minus;
      ch.left = p.C_minus.conjugate();
      break;
    }
    case Model::ThreeState: {
      double e;
      Vector3cd c;
      three_state_lower_band(params, kappa, e, c);
      ch.energy = e;
      // transfer vector is (adjacent_l, onsite_l, separated_{l-1})
      Vector3cd v;
      v << c(three_comp::adjacent), c(three_comp::onsite),
          c(three_comp::separated) * phase(-kappa);
      ch.right = v;
      ch.left = v.conjugate();
      ch.null = Vector3cd(0.0, 1.0, -kSqrt2).normalized();
      break;
    }
    case Model::Full:
      throw std::invalid_argument("transfer-matrix scattering covers the truncated models only");
  }
  return ch;
}

}  // namespace

TransferStep tm_one_state(double E, double I, double eps_l, int site) {
  if (I == 0.0) throw std::invalid_argument("one-state transfer matrix needs I != 0");
  TransferStep step;
  step.model = Model::OneState;
  step.site = site;
  step.matrix = Eigen::Matrix2cd();
  step.matrix << Complex(2.0 * (2.0 * eps_l - E) / I, 0.0), Complex(-1.0, 0.0),
      Complex(1.0, 0.0), Complex(0.0, 0.0);
  return step;
}

TransferStep tm_two_state(const ModelParams& params, double E, double eps_l,
                          double eps_l_plus_1, int site) {
  if (params.J == 0.0) throw std::invalid_argument("two-state transfer matrix needs J != 0");
  // a and b keep the absolute energy zero of the Hamiltonians
  const double a = kSqrt2 * (params.U1 + eps_l + eps_l_plus_1 - E) / params.J;
  const double b = kSqrt2 * (params.U0 + 2.0 * eps_l_plus_1 - E) / params.J;
  TransferStep step;
  step.model = Model::TwoState;
  step.site = site;
  step.matrix = Eigen::Matrix2cd();
  step.matrix << Complex(a * b - 1.0, 0.0), Complex(-b, 0.0), Complex(a, 0.0),
      Complex(-1.0, 0.0);
  return step;
}

void three_state_blocks(const ModelParams& params, double E, double eps_l,
                        double eps_l_plus_1, double eps_l_plus_2, Matrix3cd& A,
                        Matrix3cd& B) {
  const double J = params.J;
  A.setZero();
  B.setZero();
  A(0, 0) = -1.0 / kSqrt2;
  A(0, 1) = (params.U0 + 2.0 * eps_l_plus_1 - E) / J;
  A(1, 0) = -0.5;
  A(1, 2) = (eps_l + eps_l_plus_2 - E) / J;
  A(2, 1) = -1.0 / kSqrt2;
  A(2, 2) = -0.5;
  B(0, 0) = 1.0 / kSqrt2;
  B(1, 0) = 0.5;
  B(2, 0) = (E - params.U1 - eps_l - eps_l_plus_1) / J;
  B(2, 1) = 1.0 / kSqrt2;
  B(2, 2) = 0.5;
}

TransferStep tm_three_state(const ModelParams& params, double E, double eps_l,
                            double eps_l_plus_1, double eps_l_plus_2, int site) {
  if (params.J == 0.0) throw std::invalid_argument("three-state transfer matrix needs J != 0");
  Matrix3cd A, B;
  three_state_blocks(params, E, eps_l, eps_l_plus_1, eps_l_plus_2, A, B);
  TransferStep step;
  step.model = Model::ThreeState;
  step.site = site;
  const double scale = A.norm();
  step.near_singular = std::abs(A.determinant()) < 1e-12 * scale * scale * scale;
  step.matrix = A.partialPivLu().solve(B);
  return step;
}

namespace {

struct Amplitudes {
  Complex alpha{0, 0}, beta{0, 0};  // left-side e^{+-i kappa l} coefficients
  double log_scale = 0;             // alpha,beta are exp(log_scale) too small
  double residual = 0;
  bool ok = false;
};

// Backward propagation of the unit right-going solution for the invertible
// one- and two-state steps. det T = 1, so the inverse is the adjugate.
Amplitudes backward_invertible(Model model, const ModelParams& params,
                               const PotentialProfile& profile, double kappa,
                               const FreeChannels& ch, double I, int l_lo, int l_hi) {
  Eigen::Vector2cd x = ch.right * phase(kappa * (l_hi + 1));
  double log_scale = 0;
  int steps = 0;
  for (int l = l_hi; l >= l_lo; --l) {
    Eigen::Matrix2cd t;
    if (model == Model::OneState)
      t = tm_one_state(ch.energy, I, profile.value(l), l).matrix;
    else
      t = tm_two_state(params, ch.energy, profile.value(l), profile.value(l + 1), l).matrix;
    Eigen::Matrix2cd inv;
    inv << t(1, 1), -t(0, 1), -t(1, 0), t(0, 0);  // adjugate, det = 1
    x = inv * x;
    if (++steps % kRenormEvery == 0) {
      const double s = x.cwiseAbs().maxCoeff();
      if (s > 0) {
        x /= s;
        log_scale += std::log(s);
      }
    }
  }
  Eigen::Matrix2cd basis;
  basis.col(0) = ch.right * phase(kappa * l_lo);
  basis.col(1) = ch.left * phase(-kappa * l_lo);
  const Eigen::Vector2cd coef = basis.partialPivLu().solve(x);
  Amplitudes out;
  out.alpha = coef(0);
  out.beta = coef(1);
  out.log_scale = log_scale;
  out.residual = (basis * coef - x).norm() / std::max(x.norm(), 1e-300);
  out.ok = true;
  return out;
}

// Backward propagation for the singular three-state step: minimum-norm least
// squares on B x_l = A x_{l+1} with residual monitoring.
Amplitudes backward_least_squares(const ModelParams& params, const PotentialProfile& profile,
                                  double kappa, const FreeChannels& ch, int l_lo, int l_hi) {
  Vector3cd x = ch.right * phase(kappa * (l_hi + 1));
  double log_scale = 0;
  double worst_residual = 0;
  int steps = 0;
  for (int l = l_hi; l >= l_lo; --l) {
    Matrix3cd A, B;
    three_state_blocks(params, ch.energy, profile.value(l), profile.value(l + 1),
                       profile.value(l + 2), A, B);
    const Vector3cd rhs = A * x;
    const Eigen::CompleteOrthogonalDecomposition<Matrix3cd> cod(B);
    const Vector3cd solved = cod.solve(rhs);
    worst_residual =
        std::max(worst_residual, (B * solved - rhs).norm() / std::max(rhs.norm(), 1e-300));
    x = solved;
    if (++steps % kRenormEvery == 0) {
      const double s = x.cwiseAbs().maxCoeff();
      if (s > 0) {
        x /= s;
        log_scale += std::log(s);
      }
    }
  }
  Amplitudes out;
  out.residual = worst_residual;
  if (worst_residual > kResidualTol) return out;  // ok stays false

  Matrix3cd basis;
  basis.col(0) = ch.right * phase(kappa * l_lo);
  basis.col(1) = ch.left * phase(-kappa * l_lo);
  basis.col(2) = ch.null;
  const Vector3cd coef = basis.partialPivLu().solve(x);
  const double null_weight = std::abs(coef(2)) / std::max(x.norm(), 1e-300);
  out.residual = std::max(worst_residual, null_weight);
  if (null_weight > kResidualTol) return out;
  out.alpha = coef(0);
  out.beta = coef(1);
  out.log_scale = log_scale;
  out.ok = true;
  return out;
}

// Forward propagation of the fundamental pair of left-side channel solutions,
// matched to a purely right-going wave past the support.
Amplitudes forward_matched(const ModelParams& params, const PotentialProfile& profile,
                           double kappa, const FreeChannels& ch, int l_lo, int l_hi,
                           bool& singular_step) {
  Eigen::Matrix<Complex, 3, 2> X;
  X.col(0) = ch.right * phase(kappa * l_lo);
  X.col(1) = ch.left * phase(-kappa * l_lo);
  double log_scale = 0;
  int steps = 0;
  singular_step = false;
  for (int l = l_lo; l <= l_hi; ++l) {
    Matrix3cd A, B;
    three_state_blocks(params, ch.energy, profile.value(l), profile.value(l + 1),
                       profile.value(l + 2), A, B);
    const double scale = A.norm();
    if (std::abs(A.determinant()) < 1e-12 * scale * scale * scale) {
      singular_step = true;
      return {};
    }
    X = A.partialPivLu().solve(B * X).eval();
    if (++steps % kRenormEvery == 0) {
      const double s = X.cwiseAbs().maxCoeff();
      if (s > 0) {
        X /= s;
        log_scale += std::log(s);
      }
    }
  }

  Matrix3cd basis;
  basis.col(0) = ch.right * phase(kappa * (l_hi + 1));
  basis.col(1) = ch.left * phase(-kappa * (l_hi + 1));
  basis.col(2) = ch.null;
  const Eigen::PartialPivLU<Matrix3cd> lu(basis);
  const Vector3cd c1 = lu.solve(X.col(0));
  const Vector3cd c2 = lu.solve(X.col(1));

  Amplitudes out;
  if (std::abs(c2(1)) < 1e-300) return out;
  // mix the columns so the left-going channel vanishes on the right
  const Complex mix = -c1(1) / c2(1);
  const Complex transmitted = c1(0) + mix * c2(0);
  const Complex null_leak = c1(2) + mix * c2(2);
  // the null channel dies on the free steps past the support; anything left
  // is roundoff of the propagated columns, so measure it against their scale
  const double column_scale =
      std::max({X.col(0).norm(), (mix.real() == 0 && mix.imag() == 0 ? 0.0 : std::abs(mix)) *
                                     X.col(1).norm(),
                1e-300});
  out.residual = std::abs(null_leak) / column_scale;
  if (out.residual > kResidualTol) return out;
  if (std::abs(transmitted) < 1e-300) return out;
  // Convert to the backward parametrization: unit transmitted amplitude,
  // left side alpha e^{i kappa l} + beta e^{-i kappa l}.
  out.alpha = 1.0 / transmitted;
  out.beta = mix / transmitted;
  out.log_scale = -log_scale;
  out.ok = true;
  return out;
}

}  // namespace

ScatterSolution solve_scattering(Model model, const ModelParams& params,
                                 const PotentialProfile& profile, double kappa,
                                 const ScatterOptions& options) {
  if (model == Model::Full)
    throw std::invalid_argument("transfer-matrix scattering covers the truncated models only");
  if (!(kappa > 0.0 && kappa < kPi))
    throw std::invalid_argument("kappa must lie in (0, pi)");
  params.validate();

  const double I = options.one_state_hopping != 0.0 ? options.one_state_hopping
                                                    : half_bandwidth(params);
  const FreeChannels ch = free_channels(model, params, kappa, I);

  ScatterSolution sol;
  sol.model = model;
  sol.kappa = kappa;
  sol.energy = ch.energy;

  int l_lo = -1, l_hi = 1;
  if (profile.shape() != PotentialProfile::Shape::None) {
    l_lo = profile.support_min() - 3;
    l_hi = profile.support_max() + 3;
  }
  sol.asymptotic_cutoff = std::max(std::abs(l_lo), std::abs(l_hi + 1));

  const double vg = (model == Model::OneState)
                        ? I * std::sin(kappa)
                        : group_velocity(params, kappa, DispersionModel::TwoState);
  if (kappa < kBandEdgeMargin || kPi - kappa < kBandEdgeMargin || std::abs(vg) < 1e-3)
    sol.flag = ScatterFlag::BandEdge;

  Amplitudes amp;
  if (model == Model::ThreeState) {
    amp = backward_least_squares(params, profile, kappa, ch, l_lo, l_hi);
    sol.method = ScatterMethod::Backward;
    if (!amp.ok) {
      bool singular = false;
      amp = forward_matched(params, profile, kappa, ch, l_lo, l_hi, singular);
      sol.method = ScatterMethod::ForwardMatched;
      if (singular) {
        sol.flag = ScatterFlag::SingularStep;
        return sol;
      }
    }
  } else {
    amp = backward_invertible(model, params, profile, kappa, ch, I, l_lo, l_hi);
    sol.method = ScatterMethod::Backward;
  }
  sol.residual = amp.residual;
  if (!amp.ok) {
    sol.flag = ScatterFlag::NonConvergent;
    return sol;
  }

  // physical amplitudes: t = 1/alpha, r = beta/alpha, with the deferred
  // rescaling folded in through logs to avoid overflow
  const double log_alpha = std::log(std::abs(amp.alpha)) + amp.log_scale;
  sol.t = std::polar(std::exp(-log_alpha), -std::arg(amp.alpha));
  sol.r = amp.beta / amp.alpha;
  sol.P_t = std::exp(-2.0 * log_alpha);
  sol.P_r = std::norm(sol.r);
  // S-matrix slot amplitudes of the scattering relation: t = 1/conj(amp_b)
  sol.amp_b = 1.0 / std::conj(sol.t);
  sol.amp_a = sol.r / std::conj(sol.t);
  return sol;
}

std::vector<SweepPoint> sweep_tunneling(Model model, const ModelParams& params,
                                        const PotentialProfile& profile_template,
                                        const std::vector<double>& kappa_grid,
                                        const std::vector<double>& V_grid,
                                        const ScatterOptions& options, int threads) {
  if (kappa_grid.empty() || V_grid.empty())
    throw std::invalid_argument("sweep grids must be non-empty");

  const int n = static_cast<int>(kappa_grid.size() * V_grid.size());
  std::vector<SweepPoint> table(static_cast<size_t>(n));
  parallel_for_indexed(n, threads, [&](int idx) {
    const size_t ik = static_cast<size_t>(idx) / V_grid.size();
    const size_t iv = static_cast<size_t>(idx) % V_grid.size();
    SweepPoint& point = table[static_cast<size_t>(idx)];
    point.model = model;
    point.kappa = kappa_grid[ik];
    point.V = V_grid[iv];
    try {
      const PotentialProfile p = profile_template.with_amplitude(V_grid[iv]);
      const ScatterSolution s = solve_scattering(model, params, p, kappa_grid[ik], options);
      point.P_t = s.P_t;
      point.P_r = s.P_r;
      point.flagged = s.flagged();
    } catch (const std::exception&) {
      point.P_t = std::numeric_limits<double>::quiet_NaN();
      point.P_r = std::numeric_limits<double>::quiet_NaN();
      point.flagged = true;
    }
  });
  return table;
}

}  // namespace pairtunnel
