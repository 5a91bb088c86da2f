#include "fibersqueeze/quantum.hpp"

#include <cmath>
#include <map>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

Eigen::MatrixXd GreenMatrix::real_form() const {
  const int n = size();
  Eigen::MatrixXd s(2 * n, 2 * n);
  const Eigen::MatrixXcd sum = mu + nu;
  const Eigen::MatrixXcd diff = mu - nu;
  s.topLeftCorner(n, n) = sum.real();
  s.topRightCorner(n, n) = -diff.imag();
  s.bottomLeftCorner(n, n) = sum.imag();
  s.bottomRightCorner(n, n) = diff.real();
  return s;
}

SymplecticResidual symplectic_residual(const GreenMatrix& g) {
  const int n = g.size();
  SymplecticResidual r;
  const Eigen::MatrixXcd u = g.mu * g.mu.adjoint() - g.nu * g.nu.adjoint() - Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd s = g.mu * g.nu.transpose() - g.nu * g.mu.transpose();
  r.unitarity = u.cwiseAbs().maxCoeff();
  r.symmetry = s.cwiseAbs().maxCoeff();
  return r;
}

double bose_occupation(double detuning, double temperature_K) {
  if (!(temperature_K > 0.0) || detuning == 0.0) return temperature_K > 0.0 && detuning == 0.0 ? INFINITY : 0.0;
  return 1.0 / std::expm1(units::hbar * std::abs(detuning) / (units::boltzmann * temperature_K));
}

double reservoir_weight(double shift, double temperature_K, NoiseOrdering ordering) {
  const double n = shift == 0.0 ? 0.0 : bose_occupation(shift, temperature_K);
  if (ordering == NoiseOrdering::Symmetric) return n + 0.5;
  return shift > 0.0 ? n + 1.0 : n;
}

LinearizedRun record_run(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts) {
  PropagationResult r = propagate(input, spec, opts, true);
  return LinearizedRun{spec, opts, input, std::move(r.output), std::move(r.checkpoints)};
}

namespace {

void check_run(const LinearizedRun& run, const char* op) {
  double covered = 0.0;
  for (const auto& cp : run.checkpoints) covered += cp.dz;
  if (run.checkpoints.empty() || std::abs(covered - run.spec.length) > 1e-9 * run.spec.length)
    throw ContractViolation("quantum_linearized", op,
                            "run is missing the stored linearization checkpoints");
}

// Half-step multipliers keyed by step length; fixed stepping reuses one entry.
class HalfStepCache {
 public:
  explicit HalfStepCache(const SplitStepModel& m) : model_(m) {}
  const Eigen::VectorXcd& operator()(double dz) {
    auto it = cache_.find(dz);
    if (it == cache_.end()) it = cache_.emplace(dz, model_.half_dispersion(dz)).first;
    return it->second;
  }

 private:
  const SplitStepModel& model_;
  std::map<double, Eigen::VectorXcd> cache_;
};

Eigen::VectorXcd to_complex(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index n = v.size() / 2;
  Eigen::VectorXcd c(n);
  c.real() = v.head(n);
  c.imag() = v.tail(n);
  return c;
}

void to_real(const Eigen::VectorXcd& c, Eigen::Ref<Eigen::VectorXd> v) {
  const Eigen::Index n = c.size();
  v.head(n) = c.real();
  v.tail(n) = c.imag();
}

// Applies a real-linear map given on photon-normalized complex vectors to every
// column of a real 2N x M matrix.
template <typename Map>
void apply_columns(Eigen::MatrixXd& m, const Eigen::VectorXd& scale, Map&& map) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::VectorXcd v = to_complex(m.col(c));
    v.array() /= scale.array();
    map(v);
    v.array() *= scale.array();
    to_real(v, m.col(c));
  }
}

template <typename Map>
void apply_two_sided(Eigen::MatrixXd& cov, const Eigen::VectorXd& scale, Map&& map) {
  apply_columns(cov, scale, map);
  cov.transposeInPlace();
  apply_columns(cov, scale, map);
  cov = (0.5 * (cov + cov.transpose())).eval();
}

}  // namespace

GreenMatrix green_matrix(const LinearizedRun& run) {
  const Grid& grid = run.input.grid;
  const int n = grid.n_points();
  GreenMatrix g;
  g.grid = grid;
  g.input = run.input;
  g.output = run.output;
  if (!run.checkpoints.empty()) check_run(run, "green_matrix");

  const SplitStepModel model(grid, run.spec, run.options.fault);
  HalfStepCache halves(model);
  // Columns 0..n-1 perturb Re A~_k, columns n..2n-1 perturb Im A~_k.
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(n, 2 * n);
  for (int k = 0; k < n; ++k) {
    cols(k, k) = 1.0;
    cols(k, n + k) = std::complex<double>(0.0, 1.0);
  }
  for (const auto& cp : run.checkpoints) {
    const Eigen::VectorXcd& half = halves(cp.dz);
    for (int c = 0; c < 2 * n; ++c) model.tangent_step(cols.col(c), cp, half);
  }
  // In spectral units: mu~ e_k = (R1 - i R2)/2, nu~ e_k = (R1 + i R2)/2. The
  // photon-normalized matrices are s_j m_jk / s_k.
  const Eigen::VectorXd& s = model.photon_scale();
  const std::complex<double> i{0.0, 1.0};
  g.mu.resize(n, n);
  g.nu.resize(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const std::complex<double> r1 = cols(j, k), r2 = cols(j, n + k);
      g.mu(j, k) = s[j] * (0.5 * (r1 - i * r2)) / s[k];
      g.nu(j, k) = s[j] * (0.5 * (r1 + i * r2)) / s[k];
    }
  }
  return g;
}

void raman_noise_step(NoiseLedger& ledger, const SplitStepModel& model, const StepCheckpoint& cp,
                      double temperature_K) {
  if (!ledger.enabled) return;
  const int n = model.grid().n_points();
  if (ledger.covariance.rows() != 2 * n) ledger.covariance = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const Eigen::VectorXd eig = model.reservoir_spectrum(cp.dz, temperature_K);
  if (eig.isZero(0.0)) return;
  // Symmetric circulant square root of the reservoir covariance: first column
  // is the inverse DFT of sqrt(eigenvalues).
  const Eigen::VectorXcd root = eig.cwiseSqrt().cast<std::complex<double>>();
  const Eigen::VectorXd first = model.grid().fft().exp_minus(root).real() / n;
  const Eigen::VectorXd& s = model.photon_scale();
  Eigen::MatrixXd factor(2 * n, n);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) w[m] = first[(m - j + n) % n];
    Eigen::VectorXcd kick = model.reservoir_kick(cp, w);
    kick.array() *= s.array();
    to_real(kick, factor.col(j));
  }
  ledger.covariance.noalias() += factor * factor.transpose();
}

NoiseLedger noise_ledger(const LinearizedRun& run, const QuantumOptions& quantum) {
  const Grid& grid = run.input.grid;
  const int n = grid.n_points();
  NoiseLedger ledger;
  ledger.enabled = quantum.raman_noise && run.spec.has_raman() && run.spec.gamma != 0.0;
  ledger.temperature_K = quantum.temperature_K;
  ledger.covariance = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  if (!ledger.enabled) return ledger;
  check_run(run, "noise_ledger");
  const SplitStepModel model(grid, run.spec, run.options.fault);
  HalfStepCache halves(model);
  const Eigen::VectorXd& s = model.photon_scale();
  for (const auto& cp : run.checkpoints) {
    const Eigen::VectorXcd& half = halves(cp.dz);
    apply_two_sided(ledger.covariance, s, [&](Eigen::VectorXcd& v) {
      v.array() *= half.array();
      model.tangent_nonlinear(v, cp);
    });
    raman_noise_step(ledger, model, cp, quantum.temperature_K);
    apply_two_sided(ledger.covariance, s, [&](Eigen::VectorXcd& v) { v.array() *= half.array(); });
  }
  return ledger;
}

LinearizedResult linearized_propagate(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts,
                                      const QuantumOptions& quantum) {
  LinearizedResult r;
  r.run = record_run(input, spec, opts);
  r.output = r.run.output;
  r.green = green_matrix(r.run);
  r.ledger = noise_ledger(r.run, quantum);
  for (Eigen::Index i = 0; i < r.green.mu.size(); ++i) {
    if (!std::isfinite(std::abs(r.green.mu(i))) || !std::isfinite(std::abs(r.green.nu(i))))
      throw NumericalError("quantum_linearized", "linearized_propagate",
                           "non-finite Green matrix entry", spec.length);
  }
  return r;
}

Eigen::MatrixXd photon_number_covariance(const GreenMatrix& g, const NoiseLedger& ledger, const Envelope& out) {
  if (!(out.grid == g.grid) || out.samples.size() != g.output.samples.size() ||
      out.samples != g.output.samples)
    throw ContractViolation("quantum_linearized", "photon_number_covariance",
                            "output envelope does not come from the run that produced the Green matrix");
  const int n = g.size();
  const Eigen::VectorXcd alpha = out.spectral().cwiseProduct(photon_scale(g.grid).cast<std::complex<double>>());
  const Eigen::MatrixXd s = g.real_form();
  // dn_k = 2 (Re a_k dx_k + Im a_k dy_k); vacuum has <dx^2> = <dy^2> = 1/4.
  Eigen::MatrixXd y(2 * n, n);
  for (int k = 0; k < n; ++k)
    y.col(k) = alpha[k].real() * s.row(k).transpose() + alpha[k].imag() * s.row(n + k).transpose();
  Eigen::MatrixXd c = y.transpose() * y;
  if (ledger.enabled && ledger.covariance.rows() == 2 * n) {
    Eigen::MatrixXd gn = Eigen::MatrixXd::Zero(2 * n, n);
    for (int k = 0; k < n; ++k) {
      gn(k, k) = alpha[k].real();
      gn(n + k, k) = alpha[k].imag();
    }
    c += 4.0 * gn.transpose() * ledger.covariance * gn;
  }
  return 0.5 * (c + c.transpose());
}

Eigen::MatrixXd backprop_covariance(const LinearizedRun& run, const Eigen::MatrixXd& weights,
                                    const QuantumOptions& quantum, Eigen::MatrixXd* reservoir_part) {
  const Grid& grid = run.input.grid;
  const int n = grid.n_points();
  if (weights.cols() != n)
    throw ContractViolation("quantum_linearized", "backprop_variance",
                            "measurement weights do not match the grid size");
  if (!(run.output.grid == grid))
    throw ContractViolation("quantum_linearized", "backprop_variance", "run input and output grids differ");
  const int k_obs = static_cast<int>(weights.rows());
  const SplitStepModel model(grid, run.spec, run.options.fault);
  const Eigen::VectorXd& s = model.photon_scale();
  const bool noise = quantum.raman_noise && run.spec.has_raman() && run.spec.gamma != 0.0;
  if (noise || !run.checkpoints.empty()) check_run(run, "backprop_variance");

  // Gradient of sum_k W_ak |s_k A~_k|^2 with respect to A~ under Re<.,.>.
  const Eigen::VectorXcd out = run.output.spectral();
  Eigen::MatrixXcd lambda(n, k_obs);
  for (int a = 0; a < k_obs; ++a)
    lambda.col(a) = (2.0 * weights.row(a).transpose().array() * s.array().square()).cast<std::complex<double>>() *
                    out.array();

  Eigen::MatrixXd added = Eigen::MatrixXd::Zero(k_obs, k_obs);
  HalfStepCache halves(model);
  const auto& fft = grid.fft();
  for (auto it = run.checkpoints.rbegin(); it != run.checkpoints.rend(); ++it) {
    const StepCheckpoint& cp = *it;
    const Eigen::VectorXcd conj_half = halves(cp.dz).conjugate();
    for (int a = 0; a < k_obs; ++a) lambda.col(a).array() *= conj_half.array();
    if (noise) {
      const Eigen::VectorXd eig = model.reservoir_spectrum(cp.dz, quantum.temperature_K);
      Eigen::MatrixXcd proj(n, k_obs);
      for (int a = 0; a < k_obs; ++a) {
        const Eigen::VectorXcd u = model.reservoir_projection(cp, lambda.col(a)).cast<std::complex<double>>();
        proj.col(a) = fft.exp_plus(u);
      }
      // u_a^T Sigma u_b = (1/n) sum_k conj(U_ka) eig_k U_kb
      const Eigen::MatrixXcd weighted = eig.asDiagonal() * proj;
      added += (proj.adjoint() * weighted).real() / n;
    }
    for (int a = 0; a < k_obs; ++a) {
      model.adjoint_nonlinear(lambda.col(a), cp);
      lambda.col(a).array() *= conj_half.array();
    }
  }
  // Back in photon-normalized input coordinates the vacuum contributes |lambda|^2 / 4.
  for (int a = 0; a < k_obs; ++a) lambda.col(a).array() /= s.cast<std::complex<double>>().array();
  added = (0.5 * (added + added.transpose())).eval();
  if (reservoir_part) *reservoir_part = added;
  Eigen::MatrixXd c = (lambda.adjoint() * lambda).real() / 4.0;
  return 0.5 * (c + c.transpose()) + added;
}

double backprop_variance(const LinearizedRun& run, const Eigen::VectorXd& transmission,
                         const QuantumOptions& quantum) {
  return backprop_covariance(run, transmission.transpose(), quantum)(0, 0);
}

double backprop_variance(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts,
                         const Eigen::VectorXd& transmission, const QuantumOptions& quantum) {
  return backprop_variance(record_run(input, spec, opts), transmission, quantum);
}

}  // namespace fsq
