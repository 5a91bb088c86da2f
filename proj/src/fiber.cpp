#include "fibersqueeze/fiber.hpp"

#include <cmath>
#include <sstream>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

std::string to_string(RamanModel model) {
  switch (model) {
    case RamanModel::None: return "none";
    case RamanModel::SingleOscillator: return "single_oscillator";
    case RamanModel::MultiMode: return "multimode";
  }
  return "none";
}

RamanModel raman_model_from_string(const std::string& name) {
  if (name == "none") return RamanModel::None;
  if (name == "single_oscillator") return RamanModel::SingleOscillator;
  if (name == "multimode") return RamanModel::MultiMode;
  throw ConfigurationError("fiber_model", "raman_model", "unknown Raman model '" + name + "'");
}

void validate(const FiberSpec& spec) {
  auto fail = [](const std::string& what) {
    throw ConfigurationError("fiber_model", "validate", what);
  };
  if (!(spec.length > 0.0)) fail("fiber length must be positive");
  if (!(spec.gamma >= 0.0)) fail("nonlinear coefficient gamma must be non-negative");
  if (!(spec.raman_fraction >= 0.0 && spec.raman_fraction < 1.0))
    fail("Raman fraction must lie in [0, 1)");
  for (double b : spec.beta)
    if (!std::isfinite(b)) fail("dispersion coefficients must be finite");
  if (!(spec.raman_tau1 > 0.0 && spec.raman_tau2 > 0.0)) fail("Raman time constants must be positive");
}

double beta2_at(const FiberSpec& spec, double w) {
  const auto& b = spec.beta;
  return b[0] + b[1] * w + b[2] * w * w / 2.0 + b[3] * w * w * w / 6.0;
}

double dispersion_operator(const FiberSpec& spec, double w) {
  const auto& b = spec.beta;
  const double w2 = w * w;
  return b[0] * w2 / 2.0 + b[1] * w2 * w / 6.0 + b[2] * w2 * w2 / 24.0 + b[3] * w2 * w2 * w / 120.0;
}

Eigen::VectorXcd dispersion_phase(const FiberSpec& spec, const Grid& grid, double dz) {
  const auto& w = grid.omega();
  Eigen::VectorXcd m(w.size());
  for (int k = 0; k < w.size(); ++k) m[k] = std::polar(1.0, dz * dispersion_operator(spec, w[k]));
  return m;
}

double single_oscillator_response(double t, double tau1, double tau2) {
  if (t < 0.0) return 0.0;
  return (tau1 * tau1 + tau2 * tau2) / (tau1 * tau2 * tau2) * std::exp(-t / tau2) * std::sin(t / tau1);
}

namespace {

// Mode table for fused silica: centre [cm^-1], peak intensity, Gaussian FWHM
// [cm^-1], Lorentzian FWHM [cm^-1].
struct VibrationalMode {
  double position, intensity, gaussian_fwhm, lorentzian_fwhm;
};

constexpr VibrationalMode kSilicaModes[] = {
    {56.25, 1.00, 52.10, 17.37},   {100.00, 11.40, 110.42, 38.81}, {231.25, 36.67, 175.00, 58.33},
    {362.50, 67.67, 162.50, 54.17}, {463.00, 74.00, 135.33, 45.11}, {497.00, 4.50, 24.50, 8.17},
    {611.50, 6.80, 41.50, 13.83},   {691.67, 4.60, 155.00, 51.67},  {793.67, 4.20, 59.50, 19.83},
    {835.50, 4.50, 64.30, 21.43},   {930.00, 2.70, 150.00, 50.00},  {1080.00, 3.10, 91.00, 30.33},
    {1215.00, 3.00, 160.00, 53.33},
};

// cm^-1 -> rad/ps
constexpr double kWavenumberToAngular = 2.0 * units::pi * units::speed_of_light * 1e-7;

}  // namespace

double multimode_response(double t) {
  if (t < 0.0) return 0.0;
  constexpr double c_cm_per_ps = units::speed_of_light * 1e-7;
  double h = 0.0;
  for (const auto& m : kSilicaModes) {
    const double wv = m.position * kWavenumberToAngular;
    const double lorentz = units::pi * c_cm_per_ps * m.lorentzian_fwhm;
    const double gauss = units::pi * c_cm_per_ps * m.gaussian_fwhm;
    h += m.intensity * wv * std::exp(-lorentz * t) * std::exp(-gauss * gauss * t * t / 4.0) *
         std::sin(wv * t);
  }
  return h;
}

RamanKernel raman_kernel(RamanModel model, const Grid& grid, double tau1, double tau2) {
  if (model == RamanModel::None)
    throw ConfigurationError("fiber_model", "raman_kernel", "no kernel exists for Raman model 'none'");
  const double dt = grid.dt();
  // Resolution is judged against the dominant ~13 THz oscillation for both models.
  const double resolve = model == RamanModel::SingleOscillator ? tau1 : 12.2e-3;
  if (dt > resolve / 2.0) {
    std::ostringstream msg;
    msg << "grid step " << dt * 1e3 << " fs is too coarse to resolve the Raman response (need <= "
        << resolve * 500.0 << " fs)";
    throw ConfigurationError("fiber_model", "raman_kernel", msg.str());
  }
  const int n = grid.n_points();
  RamanKernel k;
  k.model = model;
  k.dt = dt;
  k.response = Eigen::VectorXd::Zero(n);
  for (int m = 0; m < n / 2; ++m) {
    const double t = m * dt;
    k.response[m] = model == RamanModel::SingleOscillator ? single_oscillator_response(t, tau1, tau2)
                                                          : multimode_response(t);
  }
  k.response /= k.response.sum() * dt;
  const Eigen::VectorXcd lagged = k.response.cast<std::complex<double>>() * dt;
  k.spectrum = grid.fft().exp_plus(lagged);
  return k;
}

FiberSpec make_mf_spec(const MfConfig& c) {
  if (!(c.zero_gvd_wavelength_nm >= 600.0 && c.zero_gvd_wavelength_nm <= 1100.0))
    throw ConfigurationError("fiber_model", "make_mf_spec",
                             "zero-GVD wavelength must lie within 600-1100 nm");
  if (!(c.carrier_wavelength_nm > 0.0))
    throw ConfigurationError("fiber_model", "make_mf_spec", "carrier wavelength must be positive");
  const double wz = units::wavelength_to_detuning(c.zero_gvd_wavelength_nm, c.carrier_wavelength_nm);
  FiberSpec spec;
  spec.length = c.length;
  spec.gamma = c.gamma;
  spec.beta = {-(c.beta3 * wz + c.beta4 * wz * wz / 2.0 + c.beta5 * wz * wz * wz / 6.0), c.beta3,
               c.beta4, c.beta5};
  spec.raman_fraction = c.raman_fraction;
  spec.raman_model = c.raman_model;
  spec.self_steepening = c.self_steepening;
  validate(spec);
  return spec;
}

double soliton_number(const FiberSpec& spec, double energy_pJ, double fwhm_fs, double detuning) {
  const double t0 = fwhm_fs * 1e-3 / units::sech_fwhm_factor;
  const double p0 = energy_pJ / (2.0 * t0);
  return std::sqrt(spec.gamma * p0 * t0 * t0 / std::abs(beta2_at(spec, detuning)));
}

}  // namespace fsq
