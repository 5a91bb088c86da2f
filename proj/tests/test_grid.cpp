#include <doctest.h>

#include <cmath>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/grid.hpp"
#include "fibersqueeze/units.hpp"
#include "support.hpp"

using namespace fsq;

TEST_CASE("grid spacing follows the window") {
  const Grid g = make_grid(256, 4.0, 810.0);
  CHECK(g.dt() == doctest::Approx(0.015625).epsilon(1e-15));
  CHECK(g.d_omega() == doctest::Approx(1.5707963267948966).epsilon(1e-14));
  CHECK(g.dt() * g.n_points() == g.time_window());
  CHECK(g.omega()[0] == 0.0);
  CHECK(g.omega()[1] == doctest::Approx(g.d_omega()));
  CHECK(g.omega()[255] == doctest::Approx(-g.d_omega()));
  CHECK(g.time()[128] == 0.0);
  CHECK(g.time()[0] == doctest::Approx(-2.0));
}

TEST_CASE("nyquist detuning of a 64 point grid") {
  const Grid g = make_grid(64, 1.0, 810.0);
  CHECK(g.nyquist() == doctest::Approx(201.06).epsilon(1e-4));
  CHECK(g.omega().cwiseAbs().maxCoeff() == doctest::Approx(g.nyquist()));
}

TEST_CASE("default scenario grid covers 650-1000 nm") {
  const Grid g = make_grid(8192, 20.0, 810.0);
  // band edge wavelengths from the Nyquist detuning
  const double c = units::speed_of_light;
  const double short_edge = 1.0 / (1.0 / 810.0 + g.nyquist() / (2 * units::pi * c));
  const double long_edge = 1.0 / (1.0 / 810.0 - g.nyquist() / (2 * units::pi * c));
  CHECK(short_edge < 650.0);
  CHECK(long_edge > 1000.0);
  CHECK(std::abs(units::wavelength_to_detuning(650.0, 810.0)) < g.nyquist());
  CHECK(std::abs(units::wavelength_to_detuning(1000.0, 810.0)) < g.nyquist());
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(make_grid(100, 1.0, 810.0), ConfigurationError);
  CHECK_THROWS_AS(make_grid(32, 1.0, 810.0), ConfigurationError);
  CHECK_THROWS_AS(make_grid(64, 0.0, 810.0), ConfigurationError);
  CHECK_THROWS_AS(make_grid(64, 1.0, -1.0), ConfigurationError);
  // 0.01 ps over 64 points reaches beyond zero absolute frequency at 810 nm
  CHECK_THROWS_AS(make_grid(64, 0.01, 810.0), ConfigurationError);
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(1000));
}

TEST_CASE("wavelength to detuning") {
  CHECK(units::wavelength_to_detuning(810, 810) == 0.0);
  CHECK(units::wavelength_to_detuning(915, 810) == doctest::Approx(-266.9).epsilon(5e-4));
  // plugging the constants gives -109.43 rad/ps
  CHECK(units::wavelength_to_detuning(850, 810) == doctest::Approx(-109.43).epsilon(1e-4));
  CHECK(units::detuning_to_wavelength(units::wavelength_to_detuning(777.0, 810), 810) == doctest::Approx(777.0));
}

TEST_CASE("detuning is antisymmetric about the carrier in inverse wavelength") {
  for (double d : {1e-5, 5e-5, 2e-4}) {
    const double up = 1.0 / (1.0 / 810.0 + d), down = 1.0 / (1.0 / 810.0 - d);
    CHECK(units::wavelength_to_detuning(up, 810) == doctest::Approx(-units::wavelength_to_detuning(down, 810)));
  }
}

TEST_CASE("parseval holds for random envelopes") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Grid g = make_grid(128 << (seed % 3), 2.0, 810.0);
    Envelope e{g, test::random_field(g.n_points(), seed, 3.0)};
    const Eigen::VectorXcd s = e.spectral();
    const double freq = s.squaredNorm() * g.d_omega() / (2 * units::pi);
    CHECK(freq == doctest::Approx(e.energy()).epsilon(1e-10));
    CHECK(test::rel_l2(to_temporal(g, s), e.samples) < 1e-14);
  }
}

TEST_CASE("spectral transform uses the exp(+i omega t) convention") {
  // exp(-i W t) is a component at detuning +W
  const Grid g = make_grid(128, 2.0, 810.0);
  const int k = 5;
  Envelope e{g, Eigen::VectorXcd(g.n_points())};
  for (int j = 0; j < g.n_points(); ++j) e.samples[j] = std::polar(1.0, -g.omega()[k] * g.time()[j]);
  const Eigen::VectorXcd s = e.spectral();
  Eigen::Index arg;
  s.cwiseAbs().maxCoeff(&arg);
  CHECK(arg == k);
}

TEST_CASE("sech pulse peak power and energy") {
  const Grid g = make_grid(8192, 20.0, 810.0);
  const Envelope e = sech_pulse(g, 118.0, 38.0, 810.0);
  const double t0 = 38e-3 / units::sech_fwhm_factor;
  const double p0 = 118.0 / (2 * t0);
  CHECK(p0 == doctest::Approx(2737.3).epsilon(1e-3));
  CHECK(e.samples.cwiseAbs2().maxCoeff() == doctest::Approx(p0).epsilon(1e-3));
  CHECK(e.energy() == doctest::Approx(118.0).epsilon(1e-6));
}

TEST_CASE("sech pulse energy for any width of at least four samples") {
  const Grid g = make_grid(1024, 5.0, 810.0);
  for (double fwhm : {4 * g.dt() * 1e3, 20.0, 38.0, 150.0, 400.0})
    CHECK(sech_pulse(g, 50.0, fwhm, 800.0).energy() == doctest::Approx(50.0).epsilon(1e-6));
  CHECK(gaussian_pulse(g, 50.0, 38.0, 800.0).energy() == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("zero energy pulse is all zero") {
  const Grid g = make_grid(256, 4.0, 810.0);
  CHECK(sech_pulse(g, 0.0, 38.0, 810.0).samples.isZero(0.0));
}

TEST_CASE("pulse at the carrier is real and peaks at t = 0") {
  const Grid g = make_grid(256, 4.0, 810.0);
  const Envelope e = sech_pulse(g, 10.0, 100.0, 810.0);
  Eigen::Index arg;
  e.samples.cwiseAbs().maxCoeff(&arg);
  CHECK(arg == 128);
  CHECK(e.samples[arg].real() > 0.0);
  CHECK(e.samples.imag().isZero(0.0));
}

TEST_CASE("off-carrier pulse lands at its detuning") {
  const Grid g = make_grid(1024, 5.0, 810.0);
  const Envelope e = sech_pulse(g, 10.0, 100.0, 850.0);
  Eigen::Index arg;
  e.spectral().cwiseAbs().maxCoeff(&arg);
  CHECK(g.omega()[arg] == doctest::Approx(units::wavelength_to_detuning(850.0, 810.0)).epsilon(0.02));
}

TEST_CASE("pulse centre outside the band is a domain error") {
  const Grid g = make_grid(64, 1.0, 810.0);
  CHECK_THROWS_AS(sech_pulse(g, 1.0, 100.0, 400.0), DomainError);
  CHECK_THROWS_AS(sech_pulse(g, -1.0, 100.0, 810.0), DomainError);
}
