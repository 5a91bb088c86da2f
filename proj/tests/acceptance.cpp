// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/measurement.hpp"
#include "fibersqueeze/quantum.hpp"
#include "fibersqueeze/scenario.hpp"
#include "fibersqueeze/selftest.hpp"
#include "fibersqueeze/spectrum.hpp"
#include "fibersqueeze/units.hpp"
#include "support.hpp"

using namespace fsq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0, double g = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e, g);
  return buf;
}

// ------------------------------------------------------------------ 1

Outcome jacobian_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const test::Small s = test::small_fiber(true);
  const Grid& g = s.grid;
  const int n = g.n_points();
  const LinearizedResult r = linearized_propagate(s.input, s.spec, s.opts);
  const Eigen::VectorXd sc = photon_scale(g);
  const Eigen::VectorXcd x0 = s.input.spectral();
  const double eps = 1e-6 * x0.cwiseAbs().maxCoeff();
  Eigen::MatrixXd fd(2 * n, 2 * n);
  for (int c = 0; c < 2 * n; ++c) {
    const int k = c % n;
    const std::complex<double> step = c < n ? std::complex<double>(eps, 0) : std::complex<double>(0, eps);
    Eigen::VectorXcd plus = x0, minus = x0;
    plus[k] += step;
    minus[k] -= step;
    const Eigen::VectorXcd op = propagate(Envelope{g, to_temporal(g, plus)}, s.spec, s.opts).output.spectral();
    const Eigen::VectorXcd om = propagate(Envelope{g, to_temporal(g, minus)}, s.spec, s.opts).output.spectral();
    Eigen::VectorXcd d = (op - om) / (2.0 * eps * sc[k]);
    d.array() *= sc.array();
    fd.col(c) << d.real(), d.imag();
  }
  const double err = (r.green.real_form() - fd).cwiseAbs().maxCoeff();
  const double tol = 1e-4 * r.green.mu.cwiseAbs().maxCoeff();
  const double t = seconds_since(t0);
  return {err <= tol && t < 30, fmt("max|J_lin - J_fd| = %.3e <= %.3e, %.1f s < 30 s", err, tol, t)};
}

// ------------------------------------------------------------------ 2

Outcome symplectic_mf() {
  const auto t0 = std::chrono::steady_clock::now();
  MfConfig mf = default_mf();
  mf.raman_fraction = 0.0;
  mf.raman_model = RamanModel::None;
  const FiberSpec spec = make_mf_spec(mf);
  const Grid g = make_grid(256, 1.0, 810.0);
  const Envelope in = sech_pulse(g, 118.0, 38.0, 810.0);
  SolverOptions opts;
  opts.step_count = 1000;
  opts.aliasing_guard = false;
  const LinearizedResult r = linearized_propagate(in, spec, opts);
  const SymplecticResidual res = symplectic_residual(r.green);
  const double t = seconds_since(t0);
  return {res.worst() <= 1e-7 && t < 300,
          fmt("|mu mu^H - nu nu^H - I| = %.3e, |mu nu^T - nu mu^T| = %.3e <= 1e-7 (f_R = 0), %.1f s < 300 s",
              res.unitarity, res.symmetry, t)};
}

// ------------------------------------------------------------------ 3

Outcome shot_noise_baselines() {
  ScenarioConfig lin = default_config();
  lin.fiber.gamma_per_W_m = 0.0;
  lin.measurement.coarse_bins = 0;
  const EnergyAnalysis a = analyze_energy(lin, 118.0);
  double worst_linear = 0.0;
  int edges = 0;
  for (const auto& curve : a.curves)
    for (const auto& p : curve.points) {
      if (!p.defined) return {false, "undefined filter point in the linear run"};
      worst_linear = std::max(worst_linear, std::abs(p.fano - 1.0));
      ++edges;
    }

  ScenarioConfig kerr = default_config();
  kerr.fiber.raman_fraction = 0.0;
  kerr.fiber.raman_model = RamanModel::None;
  kerr.fiber.self_steepening = true;
  const Envelope in = scenario_pulse(kerr, scenario_grid(kerr), 118.0);
  const LinearizedRun run = record_run(in, scenario_fiber(kerr), kerr.solver);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(in.grid.n_points());
  const double var = backprop_variance(run, ones, {false, 0.0});
  const double kerr_dev = std::abs(var / photons_per_bin(run.output).sum() - 1.0);
  return {worst_linear <= 1e-9 && kerr_dev <= 1e-4,
          fmt("gamma = 0: max|F - 1| = %.2e <= 1e-9 over %.0f edges; Kerr full band |F - 1| = %.2e <= 1e-4",
              worst_linear, edges, kerr_dev)};
}

// ------------------------------------------------------------------ 4

Outcome forward_vs_backprop() {
  double worst[2] = {0, 0};
  for (int noise = 0; noise < 2; ++noise) {
    const test::Small s = test::small_fiber(true, true, 128, 0.75);
    const QuantumOptions q{noise == 1, 300.0};
    const LinearizedResult r = linearized_propagate(s.input, s.spec, s.opts, q);
    const Eigen::MatrixXd c = photon_number_covariance(r.green, r.ledger, r.output);
    const Eigen::VectorXd n = photons_per_bin(r.output);
    const Eigen::VectorXd lambda = s.grid.wavelengths();
    std::vector<Eigen::VectorXd> filters;
    for (double e = 780; e <= 850; e += 10) {
      filters.push_back(SpectralFilter::low_pass(e).transmission(lambda));
      filters.push_back(SpectralFilter::high_pass(e).transmission(lambda));
    }
    Eigen::MatrixXd w(filters.size(), 128);
    for (std::size_t i = 0; i < filters.size(); ++i) w.row(i) = filters[i].transpose();
    const Eigen::MatrixXd back = backprop_covariance(r.run, w, q);
    for (std::size_t i = 0; i < filters.size(); ++i) {
      const double mean = filters[i].dot(n);
      if (!(mean > 0)) continue;
      const double f_fwd = fano_factor(c, n, filters[i]);
      const double f_back = back(i, i) / mean;
      worst[noise] = std::max(worst[noise], std::abs(f_back - f_fwd) / std::abs(f_fwd));
    }
  }
  return {worst[0] <= 1e-6 && worst[1] <= 1e-5,
          fmt("relative Fano difference %.2e <= 1e-6 (noise off), %.2e <= 1e-5 (noise on)", worst[0], worst[1])};
}

// ------------------------------------------------------------------ 5, 6, 9 share the default run

struct DefaultRun {
  EnergyAnalysis analysis;
  double seconds = 0;
};

const DefaultRun& default_run() {
  static const DefaultRun run = [] {
    const auto t0 = std::chrono::steady_clock::now();
    DefaultRun r{analyze_energy(default_config(), 118.0), 0};
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome squeezing_claim() {
  const DefaultRun& d = default_run();
  const auto& curves = d.analysis.curves;
  const SqueezeCurve* lp = nullptr;
  const SqueezeCurve* hp = nullptr;
  for (const auto& c : curves) (c.kind == FilterKind::LowPass ? lp : hp) = &c;
  if (!lp || !hp || !lp->best() || !hp->best()) return {false, "missing sweep"};
  const SqueezePoint& bl = lp->points[*lp->best()];
  const SqueezePoint& bh = hp->points[*hp->best()];
  const bool pass = bl.fano_db >= -3.5 && bl.fano_db <= -0.5 && bl.fano < 1 && bh.fano < 1 && d.seconds < 1800;
  return {pass, fmt("best low-pass %.2f dB at %.0f nm in [-3.5, -0.5]; best high-pass %.2f dB at %.0f nm < 0; %.0f s",
                    bl.fano_db, bl.edge_nm, bh.fano_db, bh.edge_nm, d.seconds)};
}

Outcome correlation_signs() {
  const DefaultRun& d = default_run();
  const EnergyAnalysis& a = d.analysis;
  if (!a.map) return {false, "no correlation map"};
  const CorrelationMap& m = *a.map;
  const SpectralDensity s = spectrum(a.output);
  const ScenarioConfig cfg = default_config();
  const double pk = raman_peak_wavelength(cfg, s);

  // Raman band: the contiguous region around the Raman peak within 10 dB of it.
  Eigen::Index ipk = 0;
  for (Eigen::Index i = 0; i < s.wavelength.size(); ++i)
    if (std::abs(s.wavelength[i] - pk) < std::abs(s.wavelength[ipk] - pk)) ipk = i;
  const double floor = 0.1 * s.density[ipk];
  double band_lo = pk, band_hi = pk;
  {
    std::vector<std::pair<double, double>> pts;
    for (Eigen::Index i = 0; i < s.wavelength.size(); ++i) pts.push_back({s.wavelength[i], s.density[i]});
    std::sort(pts.begin(), pts.end());
    std::size_t k = 0;
    while (k + 1 < pts.size() && pts[k].first < pk) ++k;
    std::size_t lo = k, hi = k;
    while (lo > 0 && pts[lo - 1].second >= floor) --lo;
    while (hi + 1 < pts.size() && pts[hi + 1].second >= floor) ++hi;
    band_lo = pts[lo].first;
    band_hi = pts[hi].first;
  }
  auto center = [&](int i) { return 0.5 * (m.edges_nm[i] + m.edges_nm[i + 1]); };
  std::vector<int> raman;
  for (int i = 0; i < m.size(); ++i)
    if (m.defined[i] && center(i) >= band_lo && center(i) <= band_hi) raman.push_back(i);
  double inside = 0;
  int pairs = 0;
  for (int i : raman)
    for (int j : raman)
      if (i != j) inside += m.rho(i, j), ++pairs;
  inside = pairs ? inside / pairs : NAN;

  double cross = INFINITY;
  for (int i : raman)
    for (int j = 0; j < m.size(); ++j)
      if (m.defined[j] && center(j) >= 750 && center(j) <= 810) cross = std::min(cross, m.rho(i, j));

  // anti-Stokes band: strongest density peak between the detection edge and the carrier
  const double as = peak_wavelength(s, 750.0, 805.0);
  double adjacent = INFINITY;
  for (int i = 0; i < m.size(); ++i) {
    if (!m.defined[i] || std::abs(center(i) - as) > 10) continue;
    for (int j = 0; j < m.size(); ++j) {
      const double dist = std::abs(center(j) - as);
      if (m.defined[j] && dist > 10 && dist <= 30) adjacent = std::min(adjacent, m.rho(i, j));
    }
  }
  const bool pass = pairs > 0 && inside > 0.1 && cross < -0.05 && adjacent < -0.05;
  return {pass, fmt("Raman band %.0f-%.0f nm: mean off-diagonal rho %.3f > 0.1; min rho vs 750-810 nm %.3f < -0.05; "
                    "min rho next to anti-Stokes band (%.0f nm) %.3f < -0.05",
                    band_lo, band_hi, inside, cross, as, adjacent)};
}

Outcome noise_monotonicity() {
  const DefaultRun& d = default_run();
  const EnergyAnalysis& a = d.analysis;
  double worst = INFINITY;
  int count = 0;
  for (const auto& curve : a.curves)
    for (const auto& p : curve.points) {
      if (!p.defined) continue;
      const Eigen::VectorXd f =
          (curve.kind == FilterKind::LowPass ? SpectralFilter::low_pass(p.edge_nm) : SpectralFilter::high_pass(p.edge_nm))
              .transmission(a.segment_lower_nm)
              .cwiseProduct(a.premask);
      const double mean = f.dot(a.photons);
      const double on = f.dot(a.covariance * f) / mean;
      const double off = f.dot((a.covariance - a.reservoir) * f) / mean;
      worst = std::min(worst, on - off);
      ++count;
    }

  // independent noise-off and noise-on runs on a small grid
  const test::Small s = test::small_fiber(true, true, 128, 0.75);
  const LinearizedRun run = record_run(s.input, s.spec, s.opts);
  const Eigen::VectorXd lambda = s.grid.wavelengths();
  std::vector<Eigen::VectorXd> filters;
  for (double e = 770; e <= 860; e += 5) {
    filters.push_back(SpectralFilter::low_pass(e).transmission(lambda));
    filters.push_back(SpectralFilter::high_pass(e).transmission(lambda));
  }
  Eigen::MatrixXd w(filters.size(), 128);
  for (std::size_t i = 0; i < filters.size(); ++i) w.row(i) = filters[i].transpose();
  const Eigen::MatrixXd on = backprop_covariance(run, w, {true, 300.0});
  const Eigen::MatrixXd off = backprop_covariance(run, w, {false, 300.0});
  const Eigen::VectorXd n = photons_per_bin(run.output);
  double worst_small = INFINITY;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const double mean = filters[i].dot(n);
    if (!(mean > 0)) continue;
    worst_small = std::min(worst_small, (on(i, i) - off(i, i)) / mean);
  }
  return {worst >= -1e-9 && worst_small >= -1e-9,
          fmt("min F_noise - F_clean = %.3e over %.0f default-scenario filters, %.3e on the 128-point check; >= -1e-9",
              worst, count, worst_small)};
}

// ------------------------------------------------------------------ 7

Outcome classical_fig1() {
  const ScenarioConfig cfg = builtin_scenario("fig1");
  const Grid g = scenario_grid(cfg);
  const FiberSpec spec = scenario_fiber(cfg);
  std::vector<double> widths, peaks;
  for (double e : cfg.pulse.energies_pJ) {
    const SpectralDensity s = spectrum(propagate(scenario_pulse(cfg, g, e), spec, cfg.solver).output);
    widths.push_back(spectral_width(s, -20.0));
    peaks.push_back(raman_peak_wavelength(cfg, s));
  }
  bool widths_ok = true, peaks_ok = true;
  for (std::size_t i = 1; i < widths.size(); ++i) {
    widths_ok = widths_ok && widths[i] >= widths[i - 1];
    peaks_ok = peaks_ok && peaks[i] > peaks[i - 1];
  }
  const double last = peaks.back();
  const bool in_window = last >= 880 && last <= 940;
  return {widths_ok && peaks_ok && in_window,
          fmt("-20 dB widths %.0f, %.0f, %.0f nm nondecreasing; Raman peaks %.1f, %.1f, %.1f nm increasing, last in "
              "[880, 940]",
              widths[0], widths[1], widths[2], peaks[0], peaks[1], peaks[2])};
}

// ------------------------------------------------------------------ 8

Outcome detection_arithmetic() {
  const double measured = std::pow(10.0, -0.46);
  const double intrinsic = std::pow(10.0, -1.03);
  const double eta = implied_efficiency(measured, intrinsic);
  const double corrected_db = units::to_db(correct_detection_efficiency(measured, 0.75));
  return {std::abs(eta - 0.720) <= 0.005 && std::abs(corrected_db + 8.9) <= 0.1,
          fmt("eta = %.4f (0.720 +- 0.005); -4.6 dB at eta = 0.75 corrects to %.2f dB (-8.9 +- 0.1)", eta,
              corrected_db)};
}

// ------------------------------------------------------------------ 10

Outcome selftest_and_mutations() {
  const auto t0 = std::chrono::steady_clock::now();
  bool clean = true;
  for (const auto& r : run_selftest()) clean = clean && r.pass;
  const double t = seconds_since(t0);
  int caught = 0;
  for (FaultInjection f : {FaultInjection::FlipDispersionSign, FaultInjection::DropNuConjugation}) {
    bool failed = false;
    for (const auto& r : run_selftest(f)) failed = failed || !r.pass;
    caught += failed ? 1 : 0;
  }
  return {clean && t < 60 && caught == 2,
          std::string("clean suite ") + (clean ? "passes" : "fails") +
              fmt(" in %.1f s < 60 s; %.0f of 2 mutations detected", t, caught)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"linearized map equals finite-difference Jacobian", jacobian_oracle},
      {"symplectic Green matrix", symplectic_mf},
      {"shot-noise baselines", shot_noise_baselines},
      {"forward and back-propagated Fano factors agree", forward_vs_backprop},
      {"squeezing for both filter directions", squeezing_claim},
      {"correlation sign structure", correlation_signs},
      {"classical spectra versus energy", classical_fig1},
      {"detection-loss arithmetic", detection_arithmetic},
      {"Raman noise never improves squeezing", noise_monotonicity},
      {"selftest and mutation checks", selftest_and_mutations},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria pass\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
