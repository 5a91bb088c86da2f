#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "fibersqueeze/fft.hpp"

namespace fsq {

/// Uniform time grid centred on t = 0 and its conjugate detuning axis in
/// standard FFT (wrap-around) order. The time axis is t_j = (j - n/2) dt.
class Grid {
 public:
  Grid() = default;

  int n_points() const { return n_; }
  double time_window() const { return window_; }
  double dt() const { return window_ / n_; }
  double d_omega() const;
  double nyquist() const;
  double carrier_wavelength() const { return carrier_nm_; }
  double carrier_frequency() const;

  const Eigen::VectorXd& time() const { return time_; }
  /// Detuning from the carrier [rad/ps], FFT order.
  const Eigen::VectorXd& omega() const { return omega_; }
  /// Absolute angular frequency carrier + omega [rad/ps], FFT order.
  Eigen::VectorXd absolute_omega() const;
  /// Vacuum wavelength of every frequency bin [nm], FFT order.
  Eigen::VectorXd wavelengths() const;
  /// Indices that sort the frequency bins into increasing wavelength.
  std::vector<int> wavelength_order() const;

  const FourierTransform& fft() const { return *fft_; }

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && window_ == other.window_ && carrier_nm_ == other.carrier_nm_;
  }

  friend Grid make_grid(int n_points, double time_window_ps, double carrier_wavelength_nm);

 private:
  int n_ = 0;
  double window_ = 0.0;
  double carrier_nm_ = 0.0;
  Eigen::VectorXd time_;
  Eigen::VectorXd omega_;
  std::shared_ptr<const FourierTransform> fft_;
};

/// Throws ConfigurationError unless n_points is a power of two >= 64 and the
/// remaining parameters are positive. The grid must not reach zero absolute
/// frequency.
Grid make_grid(int n_points, double time_window_ps, double carrier_wavelength_nm);

bool is_power_of_two(long n);

/// Physical spectrum A~(omega_k) = dt sum_j A_j exp(i omega_k t_j) [sqrt(W) ps].
Eigen::VectorXcd to_spectral(const Grid& grid, const Eigen::VectorXcd& samples);
/// Inverse of to_spectral.
Eigen::VectorXcd to_temporal(const Grid& grid, const Eigen::VectorXcd& spectrum);

/// Complex field envelope sampled on a grid, in sqrt(W).
struct Envelope {
  Grid grid;
  Eigen::VectorXcd samples;

  /// Sum |A_j|^2 dt [pJ].
  double energy() const;
  Eigen::VectorXcd spectral() const { return to_spectral(grid, samples); }
};

Envelope zero_envelope(const Grid& grid);

/// sqrt(P0) sech(t/T0) exp(-i Omega_c t) with T0 = fwhm / 1.763 and P0 = E / (2 T0).
Envelope sech_pulse(const Grid& grid, double energy_pJ, double fwhm_fs, double center_wavelength_nm);

/// Gaussian in intensity with the given FWHM, same centring conventions as sech_pulse.
Envelope gaussian_pulse(const Grid& grid, double energy_pJ, double fwhm_fs,
                        double center_wavelength_nm);

}  // namespace fsq
