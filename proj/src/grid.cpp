#include "fibersqueeze/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

double Grid::d_omega() const { return 2.0 * units::pi / window_; }
double Grid::nyquist() const { return units::pi / dt(); }
double Grid::carrier_frequency() const { return units::angular_frequency(carrier_nm_); }

Eigen::VectorXd Grid::absolute_omega() const {
  return (omega_.array() + carrier_frequency()).matrix();
}

Eigen::VectorXd Grid::wavelengths() const {
  return (2.0 * units::pi * units::speed_of_light / absolute_omega().array()).matrix();
}

std::vector<int> Grid::wavelength_order() const {
  // Increasing wavelength is decreasing detuning.
  std::vector<int> order(n_);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return omega_[a] > omega_[b]; });
  return order;
}

Grid make_grid(int n_points, double time_window_ps, double carrier_wavelength_nm) {
  if (!is_power_of_two(n_points) || n_points < 64) {
    std::ostringstream msg;
    msg << "n_points must be a power of two >= 64 (got " << n_points << ")";
    throw ConfigurationError("grid_units", "make_grid", msg.str());
  }
  if (!(time_window_ps > 0.0) || !std::isfinite(time_window_ps))
    throw ConfigurationError("grid_units", "make_grid", "time window must be positive");
  if (!(carrier_wavelength_nm > 0.0) || !std::isfinite(carrier_wavelength_nm))
    throw ConfigurationError("grid_units", "make_grid", "carrier wavelength must be positive");

  Grid g;
  g.n_ = n_points;
  g.window_ = time_window_ps;
  g.carrier_nm_ = carrier_wavelength_nm;
  if (g.nyquist() >= g.carrier_frequency())
    throw ConfigurationError("grid_units", "make_grid",
                             "grid bandwidth reaches zero absolute frequency; enlarge the time step");

  const double dt = g.dt();
  const double dw = g.d_omega();
  g.time_.resize(n_points);
  g.omega_.resize(n_points);
  for (int j = 0; j < n_points; ++j) {
    g.time_[j] = (j - n_points / 2) * dt;
    const int k = j < n_points / 2 ? j : j - n_points;
    g.omega_[j] = k * dw;
  }
  g.fft_ = shared_transform(n_points);
  return g;
}

// With t_j = (j - n/2) dt the kernel exp(i omega_k t_j) factors into the plain
// DFT times (-1)^k.
Eigen::VectorXcd to_spectral(const Grid& grid, const Eigen::VectorXcd& samples) {
  Eigen::VectorXcd out = grid.fft().exp_plus(samples);
  const double dt = grid.dt();
  for (int k = 0; k < out.size(); ++k) out[k] *= (k % 2 ? -dt : dt);
  return out;
}

Eigen::VectorXcd to_temporal(const Grid& grid, const Eigen::VectorXcd& spectrum) {
  Eigen::VectorXcd tmp(spectrum.size());
  for (int k = 0; k < spectrum.size(); ++k) tmp[k] = k % 2 ? -spectrum[k] : spectrum[k];
  Eigen::VectorXcd out = grid.fft().exp_minus(tmp);
  return out / (grid.n_points() * grid.dt());
}

double Envelope::energy() const { return samples.squaredNorm() * grid.dt(); }

Envelope zero_envelope(const Grid& grid) {
  return Envelope{grid, Eigen::VectorXcd::Zero(grid.n_points())};
}

namespace {

double center_detuning(const Grid& grid, double center_wavelength_nm, const char* op) {
  if (!(center_wavelength_nm > 0.0))
    throw DomainError("grid_units", op, "center wavelength must be positive");
  const double detuning =
      units::wavelength_to_detuning(center_wavelength_nm, grid.carrier_wavelength());
  if (std::abs(detuning) >= grid.nyquist()) {
    std::ostringstream msg;
    msg << "center wavelength " << center_wavelength_nm << " nm lies outside the grid's Nyquist band";
    throw DomainError("grid_units", op, msg.str());
  }
  return detuning;
}

Envelope shaped_pulse(const Grid& grid, double energy_pJ, double fwhm_fs, double center_nm,
                      const char* op, bool sech) {
  if (!(energy_pJ >= 0.0)) throw DomainError("grid_units", op, "energy must be non-negative");
  if (!(fwhm_fs > 0.0)) throw DomainError("grid_units", op, "fwhm must be positive");
  const double detuning = center_detuning(grid, center_nm, op);
  const double fwhm = fwhm_fs * 1e-3;
  Envelope env = zero_envelope(grid);
  if (energy_pJ == 0.0) return env;
  const auto& t = grid.time();
  if (sech) {
    const double t0 = fwhm / units::sech_fwhm_factor;
    for (int j = 0; j < t.size(); ++j)
      env.samples[j] = std::polar(1.0 / std::cosh(t[j] / t0), -detuning * t[j]);
  } else {
    const double t0 = fwhm / (2.0 * std::sqrt(std::log(2.0)));
    for (int j = 0; j < t.size(); ++j)
      env.samples[j] = std::polar(std::exp(-0.5 * t[j] * t[j] / (t0 * t0)), -detuning * t[j]);
  }
  // Normalize on the grid so the discrete energy is exact.
  env.samples *= std::sqrt(energy_pJ / env.energy());
  return env;
}

}  // namespace

Envelope sech_pulse(const Grid& grid, double energy_pJ, double fwhm_fs, double center_wavelength_nm) {
  return shaped_pulse(grid, energy_pJ, fwhm_fs, center_wavelength_nm, "sech_pulse", true);
}

Envelope gaussian_pulse(const Grid& grid, double energy_pJ, double fwhm_fs,
                        double center_wavelength_nm) {
  return shaped_pulse(grid, energy_pJ, fwhm_fs, center_wavelength_nm, "gaussian_pulse", false);
}

}  // namespace fsq
