#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fibersqueeze/grid.hpp"

namespace fsq {

/// Spectral energy density in increasing wavelength order. bin_width holds the
/// wavelength extent of each frequency bin so that sum(density * bin_width)
/// equals the pulse energy.
struct SpectralDensity {
  Eigen::VectorXd wavelength;   // nm
  Eigen::VectorXd density;      // pJ/nm
  Eigen::VectorXd bin_width;    // nm

  double integral() const { return density.dot(bin_width); }
};

SpectralDensity spectrum(const Envelope& env);

/// Photons per FFT bin, |A~_k|^2 d_omega / (2 pi hbar omega_k), FFT order.
Eigen::VectorXd photons_per_bin(const Envelope& env);

/// Groups of FFT-bin indices. Groups must be disjoint.
struct FrequencyBins {
  std::vector<std::vector<int>> members;

  int size() const { return static_cast<int>(members.size()); }
  /// 0/1 indicator matrix, one row per group, one column per FFT bin.
  Eigen::MatrixXd indicator(int n_points) const;
};

/// Group i gathers the bins with edges[i] <= lambda < edges[i+1]; edges must
/// increase.
FrequencyBins wavelength_bins(const Grid& grid, const std::vector<double>& edges_nm);

/// A single group containing every FFT bin.
FrequencyBins full_band(const Grid& grid);

/// Throws ConfigurationError if any FFT bin belongs to two groups or an index
/// is out of range.
void validate(const FrequencyBins& bins, int n_points);

Eigen::VectorXd photon_number_spectrum(const Envelope& env, const FrequencyBins& bins);

/// Full width between the outermost crossings of `level_db` below the peak,
/// linearly interpolated [nm].
double spectral_width(const SpectralDensity& s, double level_db);

/// Wavelength of the largest density within [lo, hi] nm.
double peak_wavelength(const SpectralDensity& s, double lo_nm, double hi_nm);

}  // namespace fsq
