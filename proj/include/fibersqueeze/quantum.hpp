#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fibersqueeze/fiber.hpp"
#include "fibersqueeze/grid.hpp"
#include "fibersqueeze/propagator.hpp"

namespace fsq {

struct QuantumOptions {
  bool raman_noise = false;
  double temperature_K = 300.0;
};

/// Fluctuation transfer in the frequency-bin basis of photon-normalized
/// amplitudes a_k = s_k A~_k:  da_out = mu da_in + nu conj(da_in).
struct GreenMatrix {
  Eigen::MatrixXcd mu;
  Eigen::MatrixXcd nu;
  Grid grid;
  Envelope input;
  Envelope output;

  int size() const { return static_cast<int>(mu.rows()); }
  /// Real 2N x 2N form acting on (Re da, Im da).
  Eigen::MatrixXd real_form() const;
};

/// max |mu mu^H - nu nu^H - I| and max |mu nu^T - nu mu^T|.
struct SymplecticResidual {
  double unitarity = 0.0;
  double symmetry = 0.0;
  double worst() const { return std::max(unitarity, symmetry); }
};
SymplecticResidual symplectic_residual(const GreenMatrix& g);

/// Added symmetrized covariance of (Re da, Im da) at the fiber output from the
/// distributed Raman reservoir. Zero and disabled when noise is off.
struct NoiseLedger {
  Eigen::MatrixXd covariance;  // 2N x 2N, symmetric PSD
  double temperature_K = 0.0;
  bool enabled = false;
};

/// Bose occupation 1 / (exp(hbar |Omega| / kT) - 1); zero at T = 0.
double bose_occupation(double detuning, double temperature_K);

enum class NoiseOrdering { Symmetric, Normal };

/// Relative reservoir weight at Raman shift Omega (Omega > 0 Stokes, < 0
/// anti-Stokes). Normal ordering gives n_th + 1 on the Stokes side and n_th on
/// the anti-Stokes side; symmetric ordering gives n_th + 1/2 on both.
double reservoir_weight(double shift, double temperature_K, NoiseOrdering ordering);

/// Classical run retained with per-step checkpoints for the tangent and adjoint maps.
struct LinearizedRun {
  FiberSpec spec;
  SolverOptions options;
  Envelope input;
  Envelope output;
  std::vector<StepCheckpoint> checkpoints;
};

LinearizedRun record_run(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts);

struct LinearizedResult {
  Envelope output;
  GreenMatrix green;
  NoiseLedger ledger;
  LinearizedRun run;
};

/// Co-propagates the 2N real basis perturbations through every tangent step
/// and, with noise enabled, transports the reservoir covariance to the output.
LinearizedResult linearized_propagate(const Envelope& input, const FiberSpec& spec,
                                      const SolverOptions& opts, const QuantumOptions& quantum = {});

GreenMatrix green_matrix(const LinearizedRun& run);
NoiseLedger noise_ledger(const LinearizedRun& run, const QuantumOptions& quantum);

/// Adds one step's reservoir contribution, injected at the nonlinear midpoint
/// of `cp`, to `ledger` (expressed in the coordinates right after the
/// nonlinear sub-step; the caller transports it onward).
void raman_noise_step(NoiseLedger& ledger, const SplitStepModel& model, const StepCheckpoint& cp,
                      double temperature_K);

/// Photon-number covariance C_ij = <dn_i dn_j> over FFT bins for vacuum input
/// transported through (mu, nu) plus the ledger. Throws ContractViolation if
/// `out` is not the output the Green matrix was built from.
Eigen::MatrixXd photon_number_covariance(const GreenMatrix& g, const NoiseLedger& ledger, const Envelope& out);

/// Covariance of the K observables M_a = sum_k W(a,k) n_k obtained by carrying
/// their gradients backwards through the adjoint steps. Reservoir sources are
/// added where they are injected; their share is also stored in
/// `reservoir_part` when given.
Eigen::MatrixXd backprop_covariance(const LinearizedRun& run, const Eigen::MatrixXd& weights,
                                    const QuantumOptions& quantum = {},
                                    Eigen::MatrixXd* reservoir_part = nullptr);

/// Variance of sum_k f_k n_k, f given per FFT bin.
double backprop_variance(const LinearizedRun& run, const Eigen::VectorXd& transmission,
                         const QuantumOptions& quantum = {});
double backprop_variance(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts,
                         const Eigen::VectorXd& transmission, const QuantumOptions& quantum = {});

}  // namespace fsq
