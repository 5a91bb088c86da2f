#pragma once

#include <cmath>
#include <numbers>

// Unit system used throughout: time ps, angular frequency rad/ps, wavelength nm,
// fiber length m, power W, energy pJ (= W*ps), temperature K.
namespace fsq::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792.458;  // nm/ps
inline constexpr double hbar = 1.054571817e-10;       // pJ*ps
inline constexpr double boltzmann = 1.380649e-11;     // pJ/K
inline constexpr double sech_fwhm_factor = 1.7627471740390860;  // 2*acosh(sqrt 2)

/// Absolute angular frequency of a vacuum wavelength.
inline double angular_frequency(double wavelength_nm) {
  return 2.0 * pi * speed_of_light / wavelength_nm;
}

inline double wavelength(double angular_frequency_rad_per_ps) {
  return 2.0 * pi * speed_of_light / angular_frequency_rad_per_ps;
}

/// Detuning of `wavelength_nm` from `carrier_nm`, Omega = 2 pi c (1/lambda - 1/lambda0).
inline double wavelength_to_detuning(double wavelength_nm, double carrier_nm) {
  return 2.0 * pi * speed_of_light * (1.0 / wavelength_nm - 1.0 / carrier_nm);
}

inline double detuning_to_wavelength(double detuning, double carrier_nm) {
  return wavelength(angular_frequency(carrier_nm) + detuning);
}

inline double photon_energy(double angular_frequency_rad_per_ps) {
  return hbar * angular_frequency_rad_per_ps;
}

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace fsq::units
