#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace srpt {

// SI base constants (exact since the 2019 redefinition).
inline constexpr double planck = 6.62607015e-34;            // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double boltzmann = 1.380649e-23;             // J / K
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);  // Wb
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// 2*pi/Phi0, the factor turning a branch flux into a junction phase.
inline constexpr double phase_per_flux = two_pi / flux_quantum;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace units {

inline constexpr double nH = 1e-9;
inline constexpr double pH = 1e-12;
inline constexpr double fF = 1e-15;
inline constexpr double GHz = 1e9;

/// Energy from a frequency in GHz (E = h f).
constexpr double energy_from_GHz(double f_GHz) { return planck * f_GHz * GHz; }
constexpr double GHz_from_energy(double e) { return e / planck / GHz; }

/// omega/(2 pi) in GHz.
constexpr double GHz_from_angular(double omega) { return omega / two_pi / GHz; }
constexpr double angular_from_GHz(double f_GHz) { return two_pi * f_GHz * GHz; }

/// Temperature in kelvin from kB*T/h given in GHz.
constexpr double kelvin_from_GHz(double kT_over_h_GHz) {
  return planck * kT_over_h_GHz * GHz / boltzmann;
}
constexpr double GHz_from_kelvin(double T) { return boltzmann * T / planck / GHz; }

/// Josephson energy <-> Josephson inductance, E_J = [Phi0/(2 pi)]^2 / L_J.
constexpr double josephson_energy(double L_J) {
  return (flux_quantum / two_pi) * (flux_quantum / two_pi) / L_J;
}
constexpr double josephson_inductance(double E_J) {
  return (flux_quantum / two_pi) * (flux_quantum / two_pi) / E_J;
}

}  // namespace units

namespace literals {

constexpr double operator""_nH(long double v) { return static_cast<double>(v) * units::nH; }
constexpr double operator""_nH(unsigned long long v) { return static_cast<double>(v) * units::nH; }
constexpr double operator""_fF(long double v) { return static_cast<double>(v) * units::fF; }
constexpr double operator""_fF(unsigned long long v) { return static_cast<double>(v) * units::fF; }

}  // namespace literals

}  // namespace srpt
