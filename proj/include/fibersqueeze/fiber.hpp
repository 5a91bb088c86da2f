#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>

#include "fibersqueeze/grid.hpp"

namespace fsq {

enum class RamanModel { None, SingleOscillator, MultiMode };

std::string to_string(RamanModel model);
RamanModel raman_model_from_string(const std::string& name);

/// Fiber description at the grid carrier. beta[0..3] hold beta2..beta5 in
/// ps^n/m; the convention is that beta2 < 0 is anomalous and supports solitons.
struct FiberSpec {
  double length = 0.3;                   // m
  double gamma = 0.0;                    // 1/(W m)
  std::array<double, 4> beta{};          // beta2..beta5
  double raman_fraction = 0.18;          // f_R
  RamanModel raman_model = RamanModel::SingleOscillator;
  bool self_steepening = true;
  double raman_tau1 = 12.2e-3;           // ps, single-oscillator period
  double raman_tau2 = 32.0e-3;           // ps, single-oscillator damping

  bool has_raman() const { return raman_model != RamanModel::None && raman_fraction > 0.0; }
};

/// Throws ConfigurationError listing the first violated invariant.
void validate(const FiberSpec& spec);

/// beta2 evaluated at detuning Omega from the carrier.
double beta2_at(const FiberSpec& spec, double detuning);

/// Sum_{n=2..5} beta_n omega^n / n! [1/m].
double dispersion_operator(const FiberSpec& spec, double detuning);

/// Per-bin multiplier exp(i dz sum beta_n omega^n / n!) in FFT order.
Eigen::VectorXcd dispersion_phase(const FiberSpec& spec, const Grid& grid, double dz);

/// Causal Raman response on the grid's lag axis together with its transform.
struct RamanKernel {
  RamanModel model = RamanModel::None;
  double dt = 0.0;
  /// h_R(m dt) for lags in FFT order; negative lags (m >= n/2) are zero.
  Eigen::VectorXd response;
  /// h~(omega_k) = dt sum_m h_m exp(i omega_k m dt); h~(0) = 1.
  Eigen::VectorXcd spectrum;

  /// Raman gain profile Im h~(omega_k).
  Eigen::VectorXd gain() const { return spectrum.imag(); }
};

RamanKernel raman_kernel(RamanModel model, const Grid& grid, double tau1_ps = 12.2e-3,
                         double tau2_ps = 32.0e-3);

/// Closed-form single-oscillator response ((t1^2+t2^2)/(t1 t2^2)) exp(-t/t2) sin(t/t1), zero for t < 0.
double single_oscillator_response(double t_ps, double tau1_ps, double tau2_ps);

/// Intermediate-broadening sum over the thirteen vibrational modes of fused
/// silica (unnormalized; t in ps).
double multimode_response(double t_ps);

/// Microstructure-fiber parameterization anchored at a zero-GVD wavelength.
struct MfConfig {
  double carrier_wavelength_nm = 810.0;
  double zero_gvd_wavelength_nm = 820.0;
  double beta3 = 1.05e-4;  // ps^3/m
  double beta4 = 3e-7;     // ps^4/m
  double beta5 = 0.0;      // ps^5/m
  double gamma = 0.042;    // 1/(W m)
  double length = 0.3;     // m
  double raman_fraction = 0.18;
  RamanModel raman_model = RamanModel::SingleOscillator;
  bool self_steepening = true;
};

/// Builds a FiberSpec whose beta2 at the carrier places the zero of
/// beta2(Omega) exactly at the configured zero-GVD wavelength.
FiberSpec make_mf_spec(const MfConfig& config);

/// N = sqrt(gamma P0 T0^2 / |beta2(Omega)|) for a sech pulse of the given
/// energy and FWHM evaluated at detuning Omega.
double soliton_number(const FiberSpec& spec, double energy_pJ, double fwhm_fs, double detuning);

}  // namespace fsq
