#include "fibersqueeze/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

SpectralDensity spectrum(const Envelope& env) {
  const Grid& grid = env.grid;
  const int n = grid.n_points();
  const Eigen::VectorXcd spec = env.spectral();
  const Eigen::VectorXd wabs = grid.absolute_omega();
  const double dw = grid.d_omega();
  const auto order = grid.wavelength_order();
  SpectralDensity out;
  out.wavelength.resize(n);
  out.density.resize(n);
  out.bin_width.resize(n);
  for (int i = 0; i < n; ++i) {
    const int k = order[i];
    const double lam = units::wavelength(wabs[k]);
    // |d lambda / d omega| = lambda^2 / (2 pi c)
    const double width = dw * lam * lam / (2.0 * units::pi * units::speed_of_light);
    out.wavelength[i] = lam;
    out.bin_width[i] = width;
    out.density[i] = std::norm(spec[k]) * dw / (2.0 * units::pi) / width;
  }
  return out;
}

Eigen::VectorXd photons_per_bin(const Envelope& env) {
  const Eigen::VectorXcd spec = env.spectral();
  const Eigen::VectorXd wabs = env.grid.absolute_omega();
  const double dw = env.grid.d_omega();
  return (spec.cwiseAbs2().array() * dw / (2.0 * units::pi * units::hbar * wabs.array())).matrix();
}

Eigen::MatrixXd FrequencyBins::indicator(int n_points) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), n_points);
  for (int i = 0; i < size(); ++i)
    for (int k : members[i]) m(i, k) = 1.0;
  return m;
}

FrequencyBins wavelength_bins(const Grid& grid, const std::vector<double>& edges) {
  if (edges.size() < 2)
    throw ConfigurationError("classical_propagator", "wavelength_bins", "need at least two bin edges");
  for (size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw ConfigurationError("classical_propagator", "wavelength_bins", "bin edges must increase");
  FrequencyBins bins;
  bins.members.resize(edges.size() - 1);
  const Eigen::VectorXd lam = grid.wavelengths();
  for (int k = 0; k < lam.size(); ++k) {
    auto it = std::upper_bound(edges.begin(), edges.end(), lam[k]);
    if (it == edges.begin() || it == edges.end()) continue;
    bins.members[static_cast<size_t>(it - edges.begin()) - 1].push_back(k);
  }
  return bins;
}

FrequencyBins full_band(const Grid& grid) {
  FrequencyBins bins;
  bins.members.resize(1);
  for (int k = 0; k < grid.n_points(); ++k) bins.members[0].push_back(k);
  return bins;
}

void validate(const FrequencyBins& bins, int n_points) {
  std::vector<int> owner(n_points, -1);
  for (int i = 0; i < bins.size(); ++i) {
    for (int k : bins.members[i]) {
      if (k < 0 || k >= n_points)
        throw ConfigurationError("classical_propagator", "photon_number_spectrum",
                                 "bin index out of range");
      if (owner[k] >= 0) {
        std::ostringstream msg;
        msg << "frequency bin " << k << " belongs to groups " << owner[k] << " and " << i;
        throw ConfigurationError("classical_propagator", "photon_number_spectrum", msg.str());
      }
      owner[k] = i;
    }
  }
}

Eigen::VectorXd photon_number_spectrum(const Envelope& env, const FrequencyBins& bins) {
  validate(bins, env.grid.n_points());
  const Eigen::VectorXd n = photons_per_bin(env);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(bins.size());
  for (int i = 0; i < bins.size(); ++i)
    for (int k : bins.members[i]) out[i] += n[k];
  return out;
}

double spectral_width(const SpectralDensity& s, double level_db) {
  const double peak = s.density.maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  const double threshold = peak * units::from_db(-std::abs(level_db));
  const int n = static_cast<int>(s.density.size());
  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    if (s.density[i] >= threshold) {
      if (first < 0) first = i;
      last = i;
    }
  }
  // linear interpolation of the outermost crossings
  auto cross = [&](int inside, int outside) {
    const double a = s.density[inside], b = s.density[outside];
    const double f = (a - threshold) / (a - b);
    return s.wavelength[inside] + f * (s.wavelength[outside] - s.wavelength[inside]);
  };
  const double lo = first > 0 ? cross(first, first - 1) : s.wavelength[first];
  const double hi = last < n - 1 ? cross(last, last + 1) : s.wavelength[last];
  return hi - lo;
}

double peak_wavelength(const SpectralDensity& s, double lo, double hi) {
  double best = -1.0, where = NAN;
  for (int i = 0; i < s.density.size(); ++i) {
    if (s.wavelength[i] < lo || s.wavelength[i] > hi) continue;
    if (s.density[i] > best) {
      best = s.density[i];
      where = s.wavelength[i];
    }
  }
  return where;
}

}  // namespace fsq
