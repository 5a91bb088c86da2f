#include "fibersqueeze/propagator.hpp"

#include <cmath>
#include <sstream>

#include "fibersqueeze/errors.hpp"

namespace fsq {

void validate(const SolverOptions& opts, const FiberSpec& spec) {
  if (opts.scheme == StepScheme::FixedSymmetrized) {
    if (opts.step_count < 1)
      throw ConfigurationError("classical_propagator", "validate", "step count must be at least 1");
  } else {
    if (!(opts.local_error_goal > 0.0 && opts.local_error_goal <= 1e-2))
      throw ConfigurationError("classical_propagator", "validate",
                               "local error goal must lie in (0, 1e-2]");
    if (opts.initial_step < 0.0 || opts.initial_step > spec.length)
      throw ConfigurationError("classical_propagator", "validate",
                               "initial step must not exceed the fiber length");
  }
  if (opts.record_interval < 0.0)
    throw ConfigurationError("classical_propagator", "validate", "record interval must be non-negative");
}

double edge_energy_fraction(const Eigen::VectorXcd& spectrum) {
  const int n = static_cast<int>(spectrum.size());
  const double total = spectrum.squaredNorm();
  if (total == 0.0) return 0.0;
  double edge = 0.0;
  for (int k = n / 2 - 3; k < n / 2 + 3; ++k) edge += std::norm(spectrum[k]);
  return edge / total;
}

namespace {

constexpr double kAliasingLimit = 1e-4;

void check_aliasing(const SolverOptions& opts, const Grid& grid, const Eigen::VectorXcd& spectrum, double z) {
  if (!opts.aliasing_guard) return;
  const double fraction = edge_energy_fraction(spectrum);
  if (fraction > kAliasingLimit || !std::isfinite(fraction)) {
    std::ostringstream msg;
    msg << "spectral energy fraction " << fraction << " near the Nyquist edge exceeds " << kAliasingLimit
        << "; enlarge the grid to at least " << 2 * grid.n_points()
        << " points at the same time window";
    throw AliasingError("propagate", msg.str(), z, 2 * grid.n_points());
  }
}

double relative_difference(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double scale = a.norm();
  return scale > 0.0 ? (a - b).norm() / scale : (a - b).norm();
}

}  // namespace

PropagationResult propagate(const Envelope& input, const FiberSpec& spec, const SolverOptions& opts,
                            bool keep_checkpoints) {
  validate(spec);
  validate(opts, spec);
  const SplitStepModel model(input.grid, spec, opts.fault);
  const Grid& grid = input.grid;

  PropagationResult result;
  Eigen::VectorXcd state = input.spectral();
  double z = 0.0;
  double next_record = opts.record_interval > 0.0 ? 0.0 : INFINITY;
  auto maybe_record = [&](bool force) {
    if (force || z >= next_record - 1e-12 * spec.length) {
      result.snapshots.push_back({z, Envelope{grid, to_temporal(grid, state)}});
      if (opts.record_interval > 0.0)
        while (next_record <= z + 1e-12 * spec.length) next_record += opts.record_interval;
    }
  };
  if (opts.record_interval > 0.0) maybe_record(true);

  auto run_step = [&](double dz) {
    StepCheckpoint cp;
    state = model.step(state, dz, z, keep_checkpoints ? &cp : nullptr);
    if (keep_checkpoints) result.checkpoints.push_back(std::move(cp));
    result.step_sizes.push_back(dz);
    z += dz;
  };

  if (opts.scheme == StepScheme::FixedSymmetrized) {
    const double dz = spec.length / opts.step_count;
    for (int s = 0; s < opts.step_count; ++s) {
      run_step(dz);
      if (s + 1 == opts.step_count) z = spec.length;
      check_aliasing(opts, grid, state, z);
      if (opts.record_interval > 0.0) maybe_record(false);
    }
  } else {
    // Step doubling: compare one step of dz against two of dz/2 and keep the
    // finer result.
    double dz = opts.initial_step > 0.0 ? opts.initial_step : spec.length / 1000.0;
    const double min_step = spec.length * 1e-9;
    while (z < spec.length * (1.0 - 1e-14)) {
      double trial = std::min(dz, spec.length - z);
      if (opts.record_interval > 0.0 && next_record > z) trial = std::min(trial, next_record - z);
      const Eigen::VectorXcd coarse = model.step(state, trial, z);
      StepCheckpoint cp1, cp2;
      Eigen::VectorXcd fine = model.step(state, trial / 2, z, keep_checkpoints ? &cp1 : nullptr);
      fine = model.step(fine, trial / 2, z + trial / 2, keep_checkpoints ? &cp2 : nullptr);
      const double err = relative_difference(fine, coarse);
      if (err > opts.local_error_goal) {
        if (trial <= min_step)
          throw NumericalError("classical_propagator", "propagate",
                               "adaptive step size underflow", z);
        dz = trial * std::max(0.2, 0.9 * std::cbrt(opts.local_error_goal / err));
        continue;
      }
      state = std::move(fine);
      if (keep_checkpoints) {
        result.checkpoints.push_back(std::move(cp1));
        result.checkpoints.push_back(std::move(cp2));
      }
      result.step_sizes.push_back(trial / 2);
      result.step_sizes.push_back(trial / 2);
      z += trial;
      if (spec.length - z < min_step) z = spec.length;
      check_aliasing(opts, grid, state, z);
      if (opts.record_interval > 0.0) maybe_record(false);
      const double growth = err > 0.0 ? 0.9 * std::cbrt(opts.local_error_goal / err) : 2.0;
      dz = trial * std::clamp(growth, 0.5, 2.0);
    }
  }
  result.output = Envelope{grid, to_temporal(grid, state)};
  if (opts.record_interval > 0.0 && (result.snapshots.empty() || result.snapshots.back().z < z))
    maybe_record(true);
  return result;
}

}  // namespace fsq
