#pragma once

#include <vector>

#include "fibersqueeze/fiber.hpp"
#include "fibersqueeze/grid.hpp"
#include "fibersqueeze/split_step.hpp"

namespace fsq {

enum class StepScheme { FixedSymmetrized, AdaptiveLocalError };

struct SolverOptions {
  StepScheme scheme = StepScheme::FixedSymmetrized;
  int step_count = 1000;          // fixed scheme
  double initial_step = 0.0;      // adaptive scheme; 0 picks length / 1000
  double local_error_goal = 1e-6; // adaptive scheme, relative L2 error per step
  double record_interval = 0.0;   // m between snapshots; 0 disables them
  bool aliasing_guard = true;
  FaultInjection fault = FaultInjection::None;
};

void validate(const SolverOptions& opts, const FiberSpec& spec);

struct Snapshot {
  double z = 0.0;
  Envelope field;
};

struct PropagationResult {
  Envelope output;
  std::vector<double> step_sizes;
  std::vector<Snapshot> snapshots;
  /// Filled only when requested; one entry per executed step.
  std::vector<StepCheckpoint> checkpoints;
};

/// Fraction of the spectral energy held in the three bins on either side of the
/// Nyquist edge.
double edge_energy_fraction(const Eigen::VectorXcd& spectrum);

/// Symmetrized split-step integration over spec.length. Throws AliasingError
/// as soon as the edge fraction exceeds 1e-4.
PropagationResult propagate(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts,
                            bool keep_checkpoints = false);

}  // namespace fsq
