#pragma once

#include <Eigen/Dense>

#include "fibersqueeze/fiber.hpp"
#include "fibersqueeze/grid.hpp"

namespace fsq {

/// s_k = sqrt(d_omega / (2 pi hbar omega_k)) per FFT bin.
Eigen::VectorXd photon_scale(const Grid& grid);

/// Deliberate defects used by the self-test to prove its checks have teeth.
enum class FaultInjection { None, FlipDispersionSign, DropNuConjugation };

/// Classical state retained for one step so the linearized and adjoint maps can
/// be replayed without re-solving the nonlinear fixed point.
struct StepCheckpoint {
  double z = 0.0;   // position at the start of the step [m]
  double dz = 0.0;  // step length [m]
  Eigen::VectorXcd field_mid;     // time-domain field at the nonlinear midpoint
  Eigen::VectorXd response_mid;   // (1-f_R)|A|^2 + f_R h*|A|^2 at the midpoint [W]
};

/// One symmetrized step is: half dispersion, implicit-midpoint nonlinear step,
/// half dispersion. The state is the physical spectrum A~ in FFT order.
///
/// The nonlinear vector field is f(A~) = i gamma sigma F[A R(A)], sigma = 1 +
/// omega/omega0 with self-steepening and 1 otherwise.
class SplitStepModel {
 public:
  SplitStepModel(const Grid& grid, const FiberSpec& spec,
                 FaultInjection fault = FaultInjection::None);

  const Grid& grid() const { return grid_; }
  const FiberSpec& spec() const { return spec_; }
  const RamanKernel& kernel() const { return kernel_; }

  /// exp(i D dz / 2), the half-step dispersion multiplier.
  Eigen::VectorXcd half_dispersion(double dz) const;

  /// Advances the spectrum by dz. When `checkpoint` is non-null it receives the
  /// midpoint data. Throws NumericalError if the fixed point does not converge.
  Eigen::VectorXcd step(const Eigen::VectorXcd& spectrum, double dz, double z,
                        StepCheckpoint* checkpoint = nullptr) const;

  /// Tangent map of `step` about the checkpointed trajectory; real-linear in v.
  void tangent_step(Eigen::Ref<Eigen::VectorXcd> v, const StepCheckpoint& cp,
                    const Eigen::VectorXcd& half) const;

  /// Transpose of tangent_step under the real inner product Re<u, v>.
  void adjoint_step(Eigen::Ref<Eigen::VectorXcd> u, const StepCheckpoint& cp,
                    const Eigen::VectorXcd& half) const;

  /// Nonlinear part only (no dispersion), exposed for dot-product tests.
  void tangent_nonlinear(Eigen::Ref<Eigen::VectorXcd> v, const StepCheckpoint& cp) const;
  void adjoint_nonlinear(Eigen::Ref<Eigen::VectorXcd> u, const StepCheckpoint& cp) const;

  /// s_k = sqrt(d_omega / (2 pi hbar omega_k)): multiplies A~ to give a
  /// bin amplitude whose modulus squared counts photons.
  const Eigen::VectorXd& photon_scale() const { return photon_scale_; }

  /// Eigenvalues (FFT order) of the symmetrized covariance of the real Raman
  /// reservoir increment w accumulated over dz at temperature T.
  Eigen::VectorXd reservoir_spectrum(double dz, double temperature_K) const;
  /// Same with the commutator spectrum (signed), used to check
  /// fluctuation-dissipation consistency.
  Eigen::VectorXd reservoir_commutator(double dz) const;

  /// xi = i gamma sigma F[A_mid w]: spectral kick produced by reservoir increment w.
  Eigen::VectorXcd reservoir_kick(const StepCheckpoint& cp, const Eigen::VectorXd& w) const;
  /// Transpose of reservoir_kick: u_j = Re(conj(A_j) z_j), z = F^T(-i gamma sigma lambda).
  Eigen::VectorXd reservoir_projection(const StepCheckpoint& cp, const Eigen::VectorXcd& lambda) const;

  int fixed_point_iterations() const { return max_iterations_; }

 private:
  Eigen::VectorXcd nonlinear_rhs(const Eigen::VectorXcd& spectrum, Eigen::VectorXcd* field,
                                 Eigen::VectorXd* response) const;
  Eigen::VectorXd response_of(const Eigen::VectorXcd& field) const;
  Eigen::VectorXd convolve(const Eigen::VectorXd& x, bool transpose) const;
  Eigen::VectorXcd apply_j(const Eigen::VectorXcd& v, const StepCheckpoint& cp) const;
  Eigen::VectorXcd apply_jt(const Eigen::VectorXcd& u, const StepCheckpoint& cp) const;

  Grid grid_;
  FiberSpec spec_;
  FaultInjection fault_;
  RamanKernel kernel_;
  Eigen::VectorXd dispersion_;  // sum beta_n omega^n / n!
  Eigen::VectorXd sigma_;
  Eigen::VectorXd photon_scale_;
  double tolerance_ = 1e-14;
  int max_iterations_ = 200;
};

}  // namespace fsq
