#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "fibersqueeze/errors.hpp"

namespace fsq {

enum class FilterKind { LowPass, HighPass, Band, Mask };

std::string to_string(FilterKind kind);
FilterKind filter_kind_from_string(const std::string& name);

/// Pass band over spectral bins. Each bin is located by a single wavelength
/// (its lower wavelength bound, or the bin wavelength for FFT bins).
///   LowPass(e):  lambda >= e       HighPass(e): lambda < e
///   Band(a, b):  a <= lambda < b   Mask:        explicit per-bin weights
/// so LowPass(e) and HighPass(e) partition any set of bins.
struct SpectralFilter {
  FilterKind kind = FilterKind::LowPass;
  double lo_nm = 0.0;
  double hi_nm = 0.0;
  Eigen::VectorXd weights;  // Mask only

  static SpectralFilter low_pass(double edge_nm);
  static SpectralFilter high_pass(double edge_nm);
  static SpectralFilter band(double lo_nm, double hi_nm);
  static SpectralFilter mask(Eigen::VectorXd weights);

  /// Realized per-bin transmission in [0, 1].
  Eigen::VectorXd transmission(const Eigen::VectorXd& bin_wavelength_nm) const;
};

/// F = f^T C f / f^T n. Throws DomainError when the filter passes no photons.
template <typename DerivedC, typename DerivedN, typename DerivedF>
double fano_factor(const Eigen::MatrixBase<DerivedC>& c, const Eigen::MatrixBase<DerivedN>& n,
                   const Eigen::MatrixBase<DerivedF>& f) {
  if (c.rows() != c.cols() || c.rows() != n.size() || n.size() != f.size())
    throw ContractViolation("measurement", "fano_factor", "covariance, photon numbers and filter differ in size");
  const double mean = f.dot(n);
  if (!(mean > 0.0)) throw DomainError("measurement", "fano_factor", "filter passes no photons");
  return f.dot(c * f) / mean;
}

struct SqueezePoint {
  double edge_nm = 0.0;
  double fano = 0.0;
  double fano_db = 0.0;
  bool defined = false;
  std::string gap;  // reason when undefined
};

struct SqueezeCurve {
  FilterKind kind = FilterKind::LowPass;
  std::vector<SqueezePoint> points;

  /// Index of the smallest defined Fano factor.
  std::optional<std::size_t> best() const;
};

/// Fano factor at every edge. `premask` (may be empty) multiplies every
/// filter, e.g. the detection band. Per-edge failures become gaps.
SqueezeCurve filter_sweep(const Eigen::MatrixXd& c, const Eigen::VectorXd& n, const Eigen::VectorXd& bin_wavelength_nm,
                          FilterKind kind, const std::vector<double>& edges_nm,
                          const Eigen::VectorXd& premask = Eigen::VectorXd());

struct CorrelationMap {
  std::vector<double> edges_nm;
  Eigen::MatrixXd rho;
  std::vector<bool> defined;

  int size() const { return static_cast<int>(rho.rows()); }
};

/// Uniform edges: count bins spanning [lo, hi].
std::vector<double> uniform_edges(double lo_nm, double hi_nm, int count);

/// Sums C within the coarse wavelength bins given by `edges_nm`, then
/// normalizes to rho_ij = C_ij / sqrt(C_ii C_jj). Bins without photons are
/// flagged undefined and hold zeros.
CorrelationMap correlation_map(const Eigen::MatrixXd& c, const Eigen::VectorXd& n,
                               const Eigen::VectorXd& bin_wavelength_nm, const std::vector<double>& edges_nm);

/// F_meas = eta F + (1 - eta).
double apply_detection_efficiency(double fano, double efficiency);
/// F = (F_meas - (1 - eta)) / eta; throws DomainError if the result is not positive.
double correct_detection_efficiency(double measured_fano, double efficiency);
/// eta that maps F_true onto F_meas.
double implied_efficiency(double measured_fano, double true_fano);

}  // namespace fsq
