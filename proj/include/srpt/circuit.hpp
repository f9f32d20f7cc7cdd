#pragma once

// Lumped-element model of the resonator + N junction branches biased at half a
// flux quantum: derived linear-circuit quantities, the classical inductive
// energy landscape, and the bosonized two-mode (polariton) spectrum.

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "srpt/optimize.hpp"
#include "srpt/units.hpp"

namespace srpt {

/// Physical circuit inputs in SI units. L_R0 and C_R0 are the N-independent
/// resonator elements (L_R = L_R0/N, C_R = N*C_R0). L_J and L_R0 may be +inf
/// (vanishing Josephson energy, open resonator inductor).
struct CircuitParams {
  double L_J = 0.75e-9;
  double L_g = 0.45e-9;
  double C_J = 24e-15;
  double C_R0 = 2e-15;
  double L_R0 = 0.45e-9;
  int N = 1;

  static CircuitParams from_josephson_energy(double E_J, double L_g, double C_J, double C_R0,
                                             double L_R0, int N = 1) {
    return {units::josephson_inductance(E_J), L_g, C_J, C_R0, L_R0, N};
  }

  double E_J() const { return std::isinf(L_J) ? 0.0 : units::josephson_energy(L_J); }
  double L_R() const { return L_R0 / N; }
  double C_R() const { return C_R0 * N; }

  CircuitParams with_L_R0(double value) const {
    CircuitParams p = *this;
    p.L_R0 = value;
    return p;
  }

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && !std::isnan(v); };
    if (!positive(L_J) || !positive(L_g) || !positive(C_J) || !positive(C_R0) || !positive(L_R0))
      throw ConfigError("circuit elements must be strictly positive");
    if (!std::isfinite(L_g) || !std::isfinite(C_J) || !std::isfinite(C_R0))
      throw ConfigError("L_g, C_J and C_R0 must be finite");
    if (!(L_g < L_J))
      throw ConfigError("L_g must be smaller than L_J (otherwise the atom frequency is imaginary)");
    if (N < 1) throw ConfigError("N must be a positive number of junction branches");
  }
};

/// Linearized quantities. Frequencies are angular (rad/s).
struct DerivedLinear {
  double omega_c = 0.0;
  double omega_a = 0.0;
  double Z_c0 = 0.0;
  double Z_a = 0.0;
  double g = 0.0;
  double E_J = 0.0;
};

inline DerivedLinear derive_linear(const CircuitParams& p) {
  p.validate();
  DerivedLinear d;
  const double k_res = 1.0 / p.L_g + 1.0 / p.L_R0;
  const double k_atom = 1.0 / p.L_g - 1.0 / p.L_J;
  d.omega_c = std::sqrt(k_res / p.C_R0);
  d.Z_c0 = std::sqrt(1.0 / k_res / p.C_R0);
  d.omega_a = std::sqrt(k_atom / p.C_J);
  d.Z_a = std::sqrt(1.0 / k_atom / p.C_J);
  d.g = std::sqrt(d.Z_c0 * d.Z_a) / (2.0 * p.L_g);
  d.E_J = p.E_J();
  return d;
}

/// Resonator frequency written with explicit N-dependent elements,
/// sqrt((N/L_g + 1/L_R)/C_R).
inline double resonator_frequency(double L_R, double C_R, double L_g, int N) {
  return std::sqrt((N / L_g + 1.0 / L_R) / C_R);
}

/// Inductive energy U(phi, {psi_j}) of the full circuit with L_R = L_R0/N.
inline double inductive_energy(double phi, std::span<const double> psis, const CircuitParams& p) {
  if (static_cast<int>(psis.size()) != p.N)
    throw ConfigError("inductive_energy: expected " + std::to_string(p.N) + " branch fluxes");
  const double E_J = p.E_J();
  double u = phi * phi / (2.0 * p.L_R());
  for (double psi : psis) {
    const double d = psi - phi;
    u += d * d / (2.0 * p.L_g) + E_J * std::cos(phase_per_flux * psi);
  }
  return u;
}

/// psi on the constraint line dU/dphi = 0, psi = (1 + L_g/L_R0) phi.
inline double constrained_branch_flux(double phi, const CircuitParams& p) {
  return (1.0 + p.L_g / p.L_R0) * phi;
}

/// U/N on the constraint line. Independent of N.
inline double constrained_potential(double phi, const CircuitParams& p) {
  const double psi = constrained_branch_flux(phi, p);
  const double d = psi - phi;
  return phi * phi / (2.0 * p.L_R0) + d * d / (2.0 * p.L_g) +
         p.E_J() * std::cos(phase_per_flux * psi);
}

/// U/(N E_J) on the constraint line.
inline double constrained_potential_normalized(double phi, const CircuitParams& p) {
  return constrained_potential(phi, p) / p.E_J();
}

inline double classical_critical_inductance(const CircuitParams& p) { return p.L_J - p.L_g; }

struct ClassicalMinimum {
  double phi0 = 0.0;
  double psi0 = 0.0;
  double energy_per_atom = 0.0;
  bool superradiant = false;
};

/// Largest photonic flux worth searching: the constraint maps |2 pi psi/Phi0| <= 2 pi
/// back onto phi.
inline double classical_search_bound(const CircuitParams& p) {
  return flux_quantum / (1.0 + p.L_g / p.L_R0);
}

inline ClassicalMinimum classical_minimum(const CircuitParams& p) {
  p.validate();
  ClassicalMinimum m;
  m.superradiant = p.L_R0 > classical_critical_inductance(p);
  if (!m.superradiant) {
    m.energy_per_atom = constrained_potential(0.0, p);
    return m;
  }
  auto u = [&](double phi) { return constrained_potential(phi, p); };
  const auto scan = optimize::grid_scan(u, 0.0, classical_search_bound(p), 4096);
  const std::size_t i = scan.best;
  const double lo = scan.x[i == 0 ? 0 : i - 1];
  const double hi = scan.x[std::min(i + 1, scan.x.size() - 1)];
  const auto best = optimize::golden_section(u, lo, hi, 1e-10, 1e-6 * flux_quantum);
  m.phi0 = best.x;
  m.psi0 = constrained_branch_flux(m.phi0, p);
  m.energy_per_atom = best.value;
  return m;
}

/// Bogoliubov frequencies of the bosonized Hamiltonian. The lower branch is
/// returned as a signed square; a negative value marks an unstable normal state.
struct PolaritonFrequencies {
  double omega_plus = 0.0;
  double omega_plus_sq = 0.0;
  double omega_minus_sq = 0.0;

  /// sqrt(omega_minus_sq) when non-negative, NaN otherwise.
  double omega_minus() const {
    return omega_minus_sq >= 0.0 ? std::sqrt(omega_minus_sq) : std::numeric_limits<double>::quiet_NaN();
  }
};

inline PolaritonFrequencies polariton_frequencies(double omega_c, double omega_a, double g) {
  const double c2 = omega_c * omega_c;
  const double a2 = omega_a * omega_a;
  const double diff = c2 - a2;
  const double disc = std::sqrt(diff * diff + 16.0 * g * g * omega_c * omega_a);
  PolaritonFrequencies f;
  f.omega_plus_sq = 0.5 * (c2 + a2 + disc);
  // Lower root through the product of roots; avoids cancellation near the instability.
  const double product = omega_c * omega_a * (omega_c * omega_a - 4.0 * g * g);
  f.omega_minus_sq = product / f.omega_plus_sq;
  f.omega_plus = std::sqrt(f.omega_plus_sq);
  return f;
}

inline bool bosonic_srpt_condition(const DerivedLinear& d) {
  return 4.0 * d.g * d.g > d.omega_c * d.omega_a;
}

}  // namespace srpt
