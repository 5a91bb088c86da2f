#include "fibersqueeze/split_step.hpp"

#include <cmath>
#include <sstream>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

SplitStepModel::SplitStepModel(const Grid& grid, const FiberSpec& spec, FaultInjection fault)
    : grid_(grid), spec_(spec), fault_(fault) {
  validate(spec_);
  const int n = grid_.n_points();
  const auto& w = grid_.omega();
  const double w0 = grid_.carrier_frequency();
  if (spec_.has_raman()) kernel_ = raman_kernel(spec_.raman_model, grid_, spec_.raman_tau1, spec_.raman_tau2);
  dispersion_.resize(n);
  sigma_.resize(n);
  const double sign = fault_ == FaultInjection::FlipDispersionSign ? -1.0 : 1.0;
  for (int k = 0; k < n; ++k) {
    dispersion_[k] = sign * dispersion_operator(spec_, w[k]);
    sigma_[k] = spec_.self_steepening ? 1.0 + w[k] / w0 : 1.0;
  }
  photon_scale_ = fsq::photon_scale(grid_);
}

Eigen::VectorXd photon_scale(const Grid& grid) {
  const Eigen::VectorXd w = grid.absolute_omega();
  return (grid.d_omega() / (2.0 * units::pi * units::hbar) * w.cwiseInverse()).cwiseSqrt();
}

Eigen::VectorXcd SplitStepModel::half_dispersion(double dz) const {
  Eigen::VectorXcd m(dispersion_.size());
  for (int k = 0; k < m.size(); ++k) m[k] = std::polar(1.0, 0.5 * dz * dispersion_[k]);
  return m;
}

Eigen::VectorXd SplitStepModel::convolve(const Eigen::VectorXd& x, bool transpose) const {
  const auto& fft = grid_.fft();
  Eigen::VectorXcd spec = fft.exp_plus(Eigen::VectorXcd(x.cast<std::complex<double>>()));
  if (transpose)
    spec.array() *= kernel_.spectrum.conjugate().array();
  else
    spec.array() *= kernel_.spectrum.array();
  return (fft.exp_minus(spec).real() / grid_.n_points()).eval();
}

Eigen::VectorXd SplitStepModel::response_of(const Eigen::VectorXcd& field) const {
  Eigen::VectorXd intensity = field.cwiseAbs2();
  if (!spec_.has_raman()) return intensity;
  const double fr = spec_.raman_fraction;
  return (1.0 - fr) * intensity + fr * convolve(intensity, false);
}

Eigen::VectorXcd SplitStepModel::nonlinear_rhs(const Eigen::VectorXcd& spectrum, Eigen::VectorXcd* field,
                                               Eigen::VectorXd* response) const {
  Eigen::VectorXcd a = to_temporal(grid_, spectrum);
  Eigen::VectorXd r = response_of(a);
  Eigen::VectorXcd out = to_spectral(grid_, (a.array() * r.array()).matrix());
  out.array() *= (I * spec_.gamma) * sigma_.array();
  if (field) *field = std::move(a);
  if (response) *response = std::move(r);
  return out;
}

Eigen::VectorXcd SplitStepModel::step(const Eigen::VectorXcd& spectrum, double dz, double z,
                                      StepCheckpoint* checkpoint) const {
  const Eigen::VectorXcd half = half_dispersion(dz);
  const Eigen::VectorXcd start = spectrum.cwiseProduct(half);
  Eigen::VectorXcd mid = start;
  if (spec_.gamma != 0.0) {
    // Implicit midpoint: mid = start + dz/2 f(mid), end = 2 mid - start.
    double previous = INFINITY;
    bool converged = false;
    for (int it = 0; it < max_iterations_; ++it) {
      Eigen::VectorXcd next = start + 0.5 * dz * nonlinear_rhs(mid, nullptr, nullptr);
      const double scale = next.norm();
      const double change = scale > 0.0 ? (next - mid).norm() / scale : 0.0;
      mid = std::move(next);
      if (!std::isfinite(change)) break;
      if (change <= tolerance_ || (change < 1e-11 && change >= previous)) {
        converged = true;
        break;
      }
      previous = change;
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "nonlinear fixed point failed to converge (step " << dz << " m too large or field non-finite)";
      throw NumericalError("classical_propagator", "step", msg.str(), z);
    }
  }
  if (checkpoint) {
    checkpoint->z = z;
    checkpoint->dz = dz;
    checkpoint->field_mid = to_temporal(grid_, mid);
    checkpoint->response_mid = response_of(checkpoint->field_mid);
  }
  return (2.0 * mid - start).cwiseProduct(half);
}

// J v = i gamma sigma F[ R v_t + A H_c(2 Re(conj(A) v_t)) ], v_t = F^-1 v.
Eigen::VectorXcd SplitStepModel::apply_j(const Eigen::VectorXcd& v, const StepCheckpoint& cp) const {
  const Eigen::VectorXcd vt = to_temporal(grid_, v);
  const auto& a = cp.field_mid;
  Eigen::VectorXd di;
  if (fault_ == FaultInjection::DropNuConjugation)
    di = 2.0 * (a.array() * vt.array()).real();
  else
    di = 2.0 * (a.conjugate().array() * vt.array()).real();
  if (spec_.has_raman()) {
    const double fr = spec_.raman_fraction;
    di = (1.0 - fr) * di + fr * convolve(di, false);
  }
  Eigen::VectorXcd prod = (cp.response_mid.array() * vt.array() + a.array() * di.array()).matrix();
  Eigen::VectorXcd out = to_spectral(grid_, prod);
  out.array() *= (I * spec_.gamma) * sigma_.array();
  return out;
}

// Real adjoints of the pieces: F^T = n dt^2 F^-1, (F^-1)^T = F / (n dt^2).
Eigen::VectorXcd SplitStepModel::apply_jt(const Eigen::VectorXcd& u, const StepCheckpoint& cp) const {
  const int n = grid_.n_points();
  const double dt = grid_.dt();
  Eigen::VectorXcd y = u;
  y.array() *= (-I * spec_.gamma) * sigma_.array();
  const Eigen::VectorXcd z = to_temporal(grid_, y) * (n * dt * dt);
  const auto& a = cp.field_mid;
  Eigen::VectorXd r = (a.conjugate().array() * z.array()).real();
  if (spec_.has_raman()) {
    const double fr = spec_.raman_fraction;
    r = (1.0 - fr) * r + fr * convolve(r, true);
  }
  Eigen::VectorXcd prod;
  if (fault_ == FaultInjection::DropNuConjugation)
    prod = (cp.response_mid.array() * z.array() + 2.0 * a.conjugate().array() * r.array()).matrix();
  else
    prod = (cp.response_mid.array() * z.array() + 2.0 * a.array() * r.array()).matrix();
  return to_spectral(grid_, prod) / (n * dt * dt);
}

namespace {

// Solves x = b + c L x by fixed-point iteration; L is a contraction for any
// step the classical solver accepted.
template <typename Op>
Eigen::VectorXcd solve_fixed_point(const Eigen::VectorXcd& b, double c, Op&& op, int max_iterations,
                                   double z) {
  Eigen::VectorXcd x = b;
  const double scale0 = b.norm();
  if (scale0 == 0.0) return x;
  double previous = INFINITY;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXcd next = b + c * op(x);
    const double change = (next - x).norm() / next.norm();
    x = std::move(next);
    if (!std::isfinite(change)) break;
    if (change <= 1e-15 || (change < 1e-11 && change >= previous)) return x;
    previous = change;
  }
  throw NumericalError("quantum_linearized", "tangent_step",
                       "linearized fixed point did not converge or produced non-finite entries", z);
}

}  // namespace

void SplitStepModel::tangent_nonlinear(Eigen::Ref<Eigen::VectorXcd> v, const StepCheckpoint& cp) const {
  if (spec_.gamma == 0.0) return;
  const Eigen::VectorXcd start = v;
  const Eigen::VectorXcd mid = solve_fixed_point(
      start, 0.5 * cp.dz, [&](const Eigen::VectorXcd& x) { return apply_j(x, cp); }, max_iterations_, cp.z);
  v = 2.0 * mid - start;
}

void SplitStepModel::adjoint_nonlinear(Eigen::Ref<Eigen::VectorXcd> u, const StepCheckpoint& cp) const {
  if (spec_.gamma == 0.0) return;
  const Eigen::VectorXcd start = u;
  const Eigen::VectorXcd mid = solve_fixed_point(
      start, 0.5 * cp.dz, [&](const Eigen::VectorXcd& x) { return apply_jt(x, cp); }, max_iterations_, cp.z);
  u = 2.0 * mid - start;
}

void SplitStepModel::tangent_step(Eigen::Ref<Eigen::VectorXcd> v, const StepCheckpoint& cp,
                                  const Eigen::VectorXcd& half) const {
  v.array() *= half.array();
  tangent_nonlinear(v, cp);
  v.array() *= half.array();
}

void SplitStepModel::adjoint_step(Eigen::Ref<Eigen::VectorXcd> u, const StepCheckpoint& cp,
                                  const Eigen::VectorXcd& half) const {
  u.array() *= half.conjugate().array();
  adjoint_nonlinear(u, cp);
  u.array() *= half.conjugate().array();
}

// The reservoir increment w enters exactly like the Raman response, A R -> A (R + w).
// Preserving commutators fixes its commutator spectrum to
// (2 f_R / kappa) Im h~ dz with kappa = gamma dt / (hbar omega0); the
// symmetrized thermal covariance is |commutator| (n_th + 1/2).
Eigen::VectorXd SplitStepModel::reservoir_commutator(double dz) const {
  const int n = grid_.n_points();
  if (!spec_.has_raman() || spec_.gamma == 0.0) return Eigen::VectorXd::Zero(n);
  const double kappa = spec_.gamma * grid_.dt() / (units::hbar * grid_.carrier_frequency());
  return (2.0 * spec_.raman_fraction / kappa * dz) * kernel_.spectrum.imag();
}

Eigen::VectorXd SplitStepModel::reservoir_spectrum(double dz, double temperature_K) const {
  Eigen::VectorXd c = reservoir_commutator(dz).cwiseAbs();
  const auto& w = grid_.omega();
  for (int k = 0; k < c.size(); ++k) {
    double occupation = 0.0;
    if (temperature_K > 0.0 && w[k] != 0.0)
      occupation = 1.0 / std::expm1(units::hbar * std::abs(w[k]) / (units::boltzmann * temperature_K));
    c[k] *= occupation + 0.5;
  }
  return c;
}

Eigen::VectorXcd SplitStepModel::reservoir_kick(const StepCheckpoint& cp, const Eigen::VectorXd& w) const {
  Eigen::VectorXcd out = to_spectral(grid_, (cp.field_mid.array() * w.array()).matrix());
  out.array() *= (I * spec_.gamma) * sigma_.array();
  return out;
}

Eigen::VectorXd SplitStepModel::reservoir_projection(const StepCheckpoint& cp,
                                                     const Eigen::VectorXcd& lambda) const {
  const int n = grid_.n_points();
  const double dt = grid_.dt();
  Eigen::VectorXcd y = lambda;
  y.array() *= (-I * spec_.gamma) * sigma_.array();
  const Eigen::VectorXcd z = to_temporal(grid_, y) * (n * dt * dt);
  return (cp.field_mid.conjugate().array() * z.array()).real();
}

}  // namespace fsq
