#pragma once

#include <Eigen/Dense>

#include <random>

#include "fibersqueeze/fiber.hpp"
#include "fibersqueeze/grid.hpp"
#include "fibersqueeze/propagator.hpp"
#include "fibersqueeze/split_step.hpp"

namespace fsq::test {

// 64 points over 0.375 ps: fine enough for the Raman kernel, wide enough for a 50 fs pulse.
struct Small {
  Grid grid;
  FiberSpec spec;
  SolverOptions opts;
  Envelope input;
};

inline Small small_fiber(bool raman, bool shock = true, int n_points = 64, double window_ps = 0.375) {
  Small s;
  s.grid = make_grid(n_points, window_ps, 810.0);
  s.spec.length = 0.02;
  s.spec.gamma = 0.1;
  s.spec.beta = {-0.01, 8e-5, 0.0, 0.0};
  s.spec.raman_fraction = raman ? 0.18 : 0.0;
  s.spec.raman_model = raman ? RamanModel::SingleOscillator : RamanModel::None;
  s.spec.self_steepening = shock;
  s.opts.step_count = 200;
  s.input = sech_pulse(s.grid, 40.0, 50.0, 810.0);
  return s;
}

inline Eigen::VectorXcd random_field(int n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {d(rng), d(rng)};
  return v;
}

inline double rel_l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a - b).norm() / b.norm(); }

}  // namespace fsq::test
