#include "fibersqueeze/measurement.hpp"

#include <cmath>

#include "fibersqueeze/units.hpp"

namespace fsq {

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::LowPass: return "low_pass";
    case FilterKind::HighPass: return "high_pass";
    case FilterKind::Band: return "band";
    case FilterKind::Mask: return "mask";
  }
  return "unknown";
}

FilterKind filter_kind_from_string(const std::string& name) {
  if (name == "low_pass") return FilterKind::LowPass;
  if (name == "high_pass") return FilterKind::HighPass;
  if (name == "band") return FilterKind::Band;
  if (name == "mask") return FilterKind::Mask;
  throw ConfigurationError("measurement", "filter_kind", "unknown filter kind '" + name + "'");
}

SpectralFilter SpectralFilter::low_pass(double edge_nm) { return {FilterKind::LowPass, edge_nm, 0.0, {}}; }
SpectralFilter SpectralFilter::high_pass(double edge_nm) { return {FilterKind::HighPass, 0.0, edge_nm, {}}; }

SpectralFilter SpectralFilter::band(double lo_nm, double hi_nm) {
  if (!(hi_nm > lo_nm)) throw ConfigurationError("measurement", "band", "band edges must increase");
  return {FilterKind::Band, lo_nm, hi_nm, {}};
}

SpectralFilter SpectralFilter::mask(Eigen::VectorXd weights) {
  if (weights.size() > 0 && (weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0))
    throw ConfigurationError("measurement", "mask", "mask weights must lie in [0,1]");
  return {FilterKind::Mask, 0.0, 0.0, std::move(weights)};
}

Eigen::VectorXd SpectralFilter::transmission(const Eigen::VectorXd& lambda) const {
  const Eigen::Index n = lambda.size();
  Eigen::VectorXd f(n);
  switch (kind) {
    case FilterKind::LowPass:
      for (Eigen::Index i = 0; i < n; ++i) f[i] = lambda[i] >= lo_nm ? 1.0 : 0.0;
      break;
    case FilterKind::HighPass:
      for (Eigen::Index i = 0; i < n; ++i) f[i] = lambda[i] < hi_nm ? 1.0 : 0.0;
      break;
    case FilterKind::Band:
      for (Eigen::Index i = 0; i < n; ++i) f[i] = lambda[i] >= lo_nm && lambda[i] < hi_nm ? 1.0 : 0.0;
      break;
    case FilterKind::Mask:
      if (weights.size() != n)
        throw ContractViolation("measurement", "transmission", "mask size does not match the bins");
      f = weights;
      break;
  }
  return f;
}

std::optional<std::size_t> SqueezeCurve::best() const {
  std::optional<std::size_t> b;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].defined && (!b || points[i].fano < points[*b].fano)) b = i;
  return b;
}

SqueezeCurve filter_sweep(const Eigen::MatrixXd& c, const Eigen::VectorXd& n, const Eigen::VectorXd& lambda,
                          FilterKind kind, const std::vector<double>& edges, const Eigen::VectorXd& premask) {
  if (kind != FilterKind::LowPass && kind != FilterKind::HighPass)
    throw ConfigurationError("measurement", "filter_sweep", "sweeps take low_pass or high_pass filters");
  if (premask.size() != 0 && premask.size() != lambda.size())
    throw ContractViolation("measurement", "filter_sweep", "premask size does not match the bins");
  SqueezeCurve curve;
  curve.kind = kind;
  for (double e : edges) {
    SqueezePoint p;
    p.edge_nm = e;
    const SpectralFilter filter = kind == FilterKind::LowPass ? SpectralFilter::low_pass(e) : SpectralFilter::high_pass(e);
    Eigen::VectorXd f = filter.transmission(lambda);
    if (premask.size() != 0) f = f.cwiseProduct(premask);
    try {
      p.fano = fano_factor(c, n, f);
      if (!(p.fano > 0.0)) throw DomainError("measurement", "fano_factor", "non-positive Fano factor");
      p.fano_db = units::to_db(p.fano);
      p.defined = true;
    } catch (const DomainError& err) {
      p.gap = err.what();
    }
    curve.points.push_back(p);
  }
  return curve;
}

std::vector<double> uniform_edges(double lo, double hi, int count) {
  if (count < 2) throw ConfigurationError("measurement", "correlation_map", "coarse_bins must be at least 2");
  if (!(hi > lo)) throw ConfigurationError("measurement", "correlation_map", "map band edges must increase");
  std::vector<double> e(count + 1);
  for (int i = 0; i <= count; ++i) e[i] = lo + (hi - lo) * i / count;
  return e;
}

CorrelationMap correlation_map(const Eigen::MatrixXd& c, const Eigen::VectorXd& n, const Eigen::VectorXd& lambda,
                               const std::vector<double>& edges) {
  if (edges.size() < 3) throw ConfigurationError("measurement", "correlation_map", "coarse_bins must be at least 2");
  const int m = static_cast<int>(edges.size()) - 1;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, lambda.size());
  for (int i = 0; i < m; ++i) p.row(i) = SpectralFilter::band(edges[i], edges[i + 1]).transmission(lambda).transpose();
  const Eigen::MatrixXd coarse = p * c * p.transpose();
  const Eigen::VectorXd photons = p * n;
  CorrelationMap map;
  map.edges_nm = edges;
  map.rho = Eigen::MatrixXd::Zero(m, m);
  map.defined.assign(m, false);
  for (int i = 0; i < m; ++i) map.defined[i] = photons[i] > 0.0 && coarse(i, i) > 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (map.defined[i] && map.defined[j]) map.rho(i, j) = coarse(i, j) / std::sqrt(coarse(i, i) * coarse(j, j));
  for (int i = 0; i < m; ++i)
    if (map.defined[i]) map.rho(i, i) = 1.0;
  return map;
}

double apply_detection_efficiency(double fano, double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("measurement", "apply_detection_efficiency", "efficiency must lie in (0,1]");
  if (!(fano > 0.0)) throw DomainError("measurement", "apply_detection_efficiency", "Fano factor must be positive");
  return eta * fano + (1.0 - eta);
}

double correct_detection_efficiency(double measured, double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("measurement", "correct_detection_efficiency", "efficiency must lie in (0,1]");
  const double f = (measured - (1.0 - eta)) / eta;
  if (!(f > 0.0)) throw DomainError("measurement", "correct_detection_efficiency", "measured value inconsistent with η");
  return f;
}

double implied_efficiency(double measured, double true_fano) {
  if (true_fano == 1.0)
    throw DomainError("measurement", "implied_efficiency", "a shot-noise-limited state does not constrain η");
  const double eta = (1.0 - measured) / (1.0 - true_fano);
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("measurement", "implied_efficiency", "measured value inconsistent with η");
  return eta;
}

}  // namespace fsq
