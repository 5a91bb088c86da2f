#include "fibersqueeze/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/measurement.hpp"
#include "fibersqueeze/quantum.hpp"
#include "fibersqueeze/spectrum.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

FaultInjection fault_from_string(const std::string& name) {
  if (name == "none") return FaultInjection::None;
  if (name == "flip-dispersion-sign") return FaultInjection::FlipDispersionSign;
  if (name == "drop-nu-conjugation") return FaultInjection::DropNuConjugation;
  throw ConfigurationError("scenarios_cli", "selftest",
                           "unknown mutation '" + name + "' (none, flip-dispersion-sign, drop-nu-conjugation)");
}

std::string to_string(FaultInjection fault) {
  switch (fault) {
    case FaultInjection::None: return "none";
    case FaultInjection::FlipDispersionSign: return "flip-dispersion-sign";
    case FaultInjection::DropNuConjugation: return "drop-nu-conjugation";
  }
  return "unknown";
}

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Short Kerr + steepening fiber on a 64-point, 0.375 ps grid at 810 nm.
struct SmallCase {
  Grid grid = make_grid(64, 0.375, 810.0);
  FiberSpec spec;
  SolverOptions opts;
  Envelope input;
};

SmallCase small_case(FaultInjection fault, bool raman) {
  SmallCase c;
  c.spec.length = 0.02;
  c.spec.gamma = 0.1;
  c.spec.beta = {-0.01, 8e-5, 0.0, 0.0};
  c.spec.raman_fraction = raman ? 0.18 : 0.0;
  c.spec.raman_model = raman ? RamanModel::SingleOscillator : RamanModel::None;
  c.spec.self_steepening = true;
  c.opts.step_count = 200;
  c.opts.fault = fault;
  c.input = sech_pulse(c.grid, 40.0, 50.0, 810.0);
  return c;
}

CheckResult timed(const std::string& name, double tol, const std::function<double(std::string&)>& body) {
  CheckResult r;
  r.name = name;
  r.tolerance = tol;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.value = body(r.detail);
    r.pass = std::isfinite(r.value) && r.value <= tol;
  } catch (const std::exception& e) {
    r.pass = false;
    r.value = NAN;
    r.detail = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

std::vector<CheckResult> run_selftest(FaultInjection fault) {
  std::vector<CheckResult> out;

  out.push_back(timed("symplectic", 1e-7, [&](std::string& detail) {
    const SmallCase c = small_case(fault, false);
    const LinearizedResult r = linearized_propagate(c.input, c.spec, c.opts);
    const SymplecticResidual s = symplectic_residual(r.green);
    detail = "max|mu mu^H - nu nu^H - I| = " + sci(s.unitarity) + ", max|mu nu^T - nu mu^T| = " + sci(s.symmetry);
    return s.worst();
  }));

  out.push_back(timed("coherent_fano", 1e-9, [&](std::string& detail) {
    SmallCase c = small_case(fault, false);
    c.spec.gamma = 0.0;
    const LinearizedResult r = linearized_propagate(c.input, c.spec, c.opts);
    const Eigen::MatrixXd cov = photon_number_covariance(r.green, r.ledger, r.output);
    const Eigen::VectorXd n = photons_per_bin(r.output);
    const Eigen::VectorXd lambda = r.output.grid.wavelengths();
    double worst = 0.0;
    for (double edge : {790.0, 810.0, 830.0}) {
      for (const auto& f : {SpectralFilter::low_pass(edge), SpectralFilter::high_pass(edge)})
        worst = std::max(worst, std::abs(fano_factor(cov, n, f.transmission(lambda)) - 1.0));
    }
    detail = "max |F - 1| over low/high-pass edges 790, 810, 830 nm";
    return worst;
  }));

  out.push_back(timed("forward_backprop_agreement", 1e-6, [&](std::string& detail) {
    const SmallCase c = small_case(fault, true);
    const QuantumOptions q{true, 300.0};
    const LinearizedResult r = linearized_propagate(c.input, c.spec, c.opts, q);
    const Eigen::MatrixXd cov = photon_number_covariance(r.green, r.ledger, r.output);
    const Eigen::VectorXd lambda = r.output.grid.wavelengths();
    const Eigen::VectorXd f = SpectralFilter::low_pass(815.0).transmission(lambda);
    const double fwd = f.dot(cov * f);
    const double back = backprop_variance(r.run, f, q);
    detail = "variance forward " + sci(fwd) + ", backprop " + sci(back) + " (Raman noise on)";
    return std::abs(back - fwd) / fwd;
  }));

  out.push_back(timed("soliton_invariance", 1e-3, [&](std::string& detail) {
    const Grid grid = make_grid(64, 20.0, 1550.0);
    FiberSpec spec;
    spec.beta = {-0.02, 0.0, 0.0, 0.0};
    spec.raman_fraction = 0.0;
    spec.raman_model = RamanModel::None;
    spec.self_steepening = false;
    const double t0 = 1.0;
    const double fwhm_fs = t0 * units::sech_fwhm_factor * 1e3;
    const double p0 = 1.0;
    spec.gamma = std::abs(spec.beta[0]) / (p0 * t0 * t0);
    spec.length = units::pi / 2.0 * t0 * t0 / std::abs(spec.beta[0]);
    SolverOptions opts;
    opts.step_count = 400;
    opts.fault = fault;
    const Envelope in = sech_pulse(grid, 2.0 * p0 * t0, fwhm_fs, 1550.0);
    const PropagationResult r = propagate(in, spec, opts);
    const Eigen::VectorXd i0 = in.samples.cwiseAbs2(), i1 = r.output.samples.cwiseAbs2();
    detail = "relative L2 error of |A|^2 after one soliton period, 64 points";
    return (i1 - i0).norm() / i0.norm();
  }));

  return out;
}

}  // namespace fsq
