#include <doctest.h>

#include <cmath>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/fiber.hpp"
#include "fibersqueeze/propagator.hpp"
#include "fibersqueeze/units.hpp"
#include "support.hpp"

using namespace fsq;

TEST_CASE("dispersion multipliers have unit modulus") {
  const Grid g = make_grid(1024, 5.0, 810.0);
  FiberSpec spec;
  spec.beta = {0.013, 8.1e-5, -3e-7, 2e-9};
  for (double dz : {1e-4, 3e-3, 0.3}) {
    const Eigen::VectorXcd m = dispersion_phase(spec, g, dz);
    CHECK((m.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  spec.beta = {0, 0, 0, 0};
  CHECK(dispersion_phase(spec, g, 0.1).isApprox(Eigen::VectorXcd::Ones(1024), 0.0));
}

TEST_CASE("dispersion operator is the Taylor series") {
  FiberSpec spec;
  spec.beta = {0.01, 1e-4, 1e-6, 1e-8};
  const double w = -50.0;
  const double expect = 0.01 * w * w / 2 + 1e-4 * w * w * w / 6 + 1e-6 * std::pow(w, 4) / 24 + 1e-8 * std::pow(w, 5) / 120;
  CHECK(dispersion_operator(spec, w) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(beta2_at(spec, w) == doctest::Approx(0.01 + 1e-4 * w + 1e-6 * w * w / 2 + 1e-8 * w * w * w / 6));
}

TEST_CASE("gaussian pulse under pure GVD matches the analytic chirped gaussian") {
  const Grid g = make_grid(2048, 20.0, 810.0);
  const double fwhm_fs = 200.0;
  const double t0 = fwhm_fs * 1e-3 / (2.0 * std::sqrt(std::log(2.0)));
  FiberSpec spec;
  spec.gamma = 0.0;
  spec.raman_model = RamanModel::None;
  spec.beta = {0.02, 0, 0, 0};
  spec.length = 2.0 * t0 * t0 / spec.beta[0];  // two dispersion lengths
  SolverOptions opts;
  opts.step_count = 10;
  const Envelope in = gaussian_pulse(g, 5.0, fwhm_fs, 810.0);
  const Envelope out = propagate(in, spec, opts).output;
  const double p0 = in.samples.cwiseAbs2().maxCoeff();
  const std::complex<double> q(t0 * t0, -spec.beta[0] * spec.length);
  Eigen::VectorXcd exact(g.n_points());
  for (int j = 0; j < g.n_points(); ++j) {
    const double t = g.time()[j];
    exact[j] = std::sqrt(p0) * t0 / std::sqrt(q) * std::exp(-t * t / (2.0 * q));
  }
  CHECK(test::rel_l2(out.samples, exact) < 1e-4);
  // width grows as sqrt(1 + (z/L_D)^2)
  const double width0 = std::sqrt((in.samples.cwiseAbs2().array() * g.time().array().square()).sum() / in.samples.squaredNorm());
  const double width1 = std::sqrt((out.samples.cwiseAbs2().array() * g.time().array().square()).sum() / out.samples.squaredNorm());
  CHECK(width1 / width0 == doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
}

TEST_CASE("single oscillator response integrates to one") {
  // trapezoid on a fine lag axis, independent of the grid kernel
  const double h = 1e-5;
  double sum = 0.0;
  for (int i = 1; i * h < 3.0; ++i) sum += single_oscillator_response(i * h, 12.2e-3, 32e-3);
  CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(single_oscillator_response(-1e-3, 12.2e-3, 32e-3) == 0.0);
}

TEST_CASE("raman kernels are causal and normalized on the grid") {
  const Grid g = make_grid(4096, 20.0, 810.0);
  for (RamanModel m : {RamanModel::SingleOscillator, RamanModel::MultiMode}) {
    CAPTURE(to_string(m));
    const RamanKernel k = raman_kernel(m, g);
    CHECK(k.response.sum() * g.dt() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(k.response.tail(g.n_points() / 2).isZero(0.0));
    CHECK(k.spectrum[0].real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(k.spectrum[0].imag()) < 1e-15);
  }
  CHECK(multimode_response(-0.01) == 0.0);
}

TEST_CASE("raman gain peaks near 13.2 THz for fused silica") {
  const Grid g = make_grid(4096, 20.0, 810.0);
  for (RamanModel m : {RamanModel::SingleOscillator, RamanModel::MultiMode}) {
    CAPTURE(to_string(m));
    const RamanKernel k = raman_kernel(m, g);
    Eigen::Index arg;
    k.gain().maxCoeff(&arg);
    const double thz = g.omega()[arg] / (2 * units::pi);
    if (m == RamanModel::SingleOscillator) {
      CHECK(thz > 12.5);
      CHECK(thz < 14.5);
    } else {
      // the narrow 497 cm^-1 line rises about 6% above the broad maximum at 13.2 THz
      double broad = 0.0, broad_at = 0.0;
      for (int j = 0; j < g.n_points(); ++j) {
        const double f = g.omega()[j] / (2 * units::pi);
        if (f > 12.0 && f < 14.0 && k.gain()[j] > broad) broad = k.gain()[j], broad_at = f;
      }
      CHECK(broad_at == doctest::Approx(13.2).epsilon(0.02));
      CHECK(broad > 0.9 * k.gain().maxCoeff());
      CHECK(thz < 15.0);
    }
    // Stokes side of the probe sees gain, the opposite detuning loss
    CHECK(k.gain()[(g.n_points() - arg) % g.n_points()] < 0.0);
  }
}

TEST_CASE("raman kernel needs a grid that resolves the oscillation") {
  CHECK_THROWS_AS(raman_kernel(RamanModel::SingleOscillator, make_grid(64, 1.0, 810.0)), ConfigurationError);
  CHECK_THROWS_AS(raman_kernel(RamanModel::None, make_grid(1024, 1.0, 810.0)), ConfigurationError);
}

TEST_CASE("fiber spec invariants") {
  FiberSpec spec;
  spec.gamma = 0.1;
  CHECK_NOTHROW(validate(spec));
  spec.length = 0;
  CHECK_THROWS_AS(validate(spec), ConfigurationError);
  spec.length = 0.3;
  spec.gamma = -1;
  CHECK_THROWS_AS(validate(spec), ConfigurationError);
  spec.gamma = 0.1;
  spec.raman_fraction = 1.0;
  CHECK_THROWS_AS(validate(spec), ConfigurationError);
  CHECK(raman_model_from_string(to_string(RamanModel::MultiMode)) == RamanModel::MultiMode);
  CHECK_THROWS_AS(raman_model_from_string("quantum"), ConfigurationError);
}

TEST_CASE("MF spec places the zero of beta2 at the configured wavelength") {
  const MfConfig mf;
  const FiberSpec spec = make_mf_spec(mf);
  CHECK(spec.beta[0] > 0.0);  // normal at the 810 nm carrier
  CHECK(beta2_at(spec, units::wavelength_to_detuning(915.0, 810.0)) < 0.0);
  CHECK(std::abs(beta2_at(spec, units::wavelength_to_detuning(820.0, 810.0))) < 1e-15);

  MfConfig at_zero = mf;
  at_zero.carrier_wavelength_nm = 820.0;
  CHECK(make_mf_spec(at_zero).beta[0] == 0.0);

  MfConfig bad = mf;
  bad.zero_gvd_wavelength_nm = 1200.0;
  CHECK_THROWS_AS(make_mf_spec(bad), ConfigurationError);
  bad.zero_gvd_wavelength_nm = 590.0;
  CHECK_THROWS_AS(make_mf_spec(bad), ConfigurationError);
}

TEST_CASE("beta2 changes sign once in 700-1000 nm without quartic terms") {
  for (double zdw : {760.0, 820.0, 900.0}) {
    MfConfig mf;
    mf.beta4 = mf.beta5 = 0.0;
    mf.zero_gvd_wavelength_nm = zdw;
    const FiberSpec spec = make_mf_spec(mf);
    int flips = 0;
    double crossing = 0;
    double prev = beta2_at(spec, units::wavelength_to_detuning(700.0, 810.0));
    for (double lam = 700.5; lam <= 1000.0; lam += 0.5) {
      const double b = beta2_at(spec, units::wavelength_to_detuning(lam, 810.0));
      if ((b > 0) != (prev > 0)) {
        ++flips;
        crossing = lam;
      }
      prev = b;
    }
    CHECK(flips == 1);
    CHECK(crossing == doctest::Approx(zdw).epsilon(1e-3));
  }
}

TEST_CASE("default MF spec supports solitons in the anomalous region") {
  const FiberSpec spec = make_mf_spec(MfConfig{});
  const double n = soliton_number(spec, 118.0, 38.0, units::wavelength_to_detuning(900.0, 810.0));
  CHECK(n >= 1.0);
}
