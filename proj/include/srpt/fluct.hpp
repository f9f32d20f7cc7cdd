#pragma once

// Quadratic fluctuations around the T = 0 mean-field state. The expanded
// Hamiltonian has the bosonized form with the Josephson energy replaced by its
// ground-state average, so the spectrum follows from the polariton formula with
// renormalized atom parameters.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "srpt/circuit.hpp"
#include "srpt/fock.hpp"
#include "srpt/meanfield.hpp"
#include "srpt/parallel.hpp"
#include "srpt/units.hpp"

namespace srpt::fluct {

struct RenormalizedParams {
  double EJ_bar = 0.0;
  double LJ_bar = 0.0;  // +inf when EJ_bar = 0
  double omega_a_bar = 0.0;
  double Za_bar = 0.0;
  double g_bar = 0.0;
  double phi_th = 0.0;
  double psi_th = 0.0;
  double mean_sin = 0.0;  // <sin(2 pi psi/Phi0)> in the same state
};

namespace detail {

struct GroundState {
  double mean_cos = 0.0;
  double mean_sin = 0.0;
  double mean_psi = 0.0;
};

inline GroundState ground_state_averages(const meanfield::Solver& solver, double phi) {
  const auto& ops = solver.operators();
  const auto s = fock::atom_spectrum(fock::effective_hamiltonian(solver.atom_hamiltonian(), ops, solver.atom().L_g, phi));
  GroundState g;
  g.mean_cos = fock::thermal_expectation(s, ops.cos_op, 0.0);
  g.mean_sin = fock::thermal_expectation(s, ops.sin_op, 0.0);
  g.mean_psi = fock::thermal_expectation(s, ops.psi_op, 0.0);
  return g;
}

}  // namespace detail

/// Renormalization from ground-state averages at the given T = 0 solution.
/// Throws ConvergenceError when the recomputed <psi> disagrees with
/// solution.psi_th by more than 1e-8 relative, ConfigError when 1/L_g <= 1/LJ_bar.
inline RenormalizedParams renormalize(const meanfield::Solver& solver, const CircuitParams& p,
                                      const meanfield::MeanFieldSolution& solution) {
  if (solution.T != 0.0) throw ConfigError("renormalization needs a zero-temperature solution");
  const auto gs = detail::ground_state_averages(solver, solution.phi_th);
  // Zero-point spread of psi sets the scale when psi_th vanishes by parity.
  const double spread = std::sqrt(hbar * solver.operators().Z_a / 2.0);
  const double scale = std::max(std::abs(solution.psi_th), spread);
  if (std::abs(gs.mean_psi - solution.psi_th) > 1e-8 * scale)
    throw ConvergenceError("mean-field psi_th is not reproduced by the effective ground state");

  RenormalizedParams r;
  r.phi_th = solution.phi_th;
  r.psi_th = gs.mean_psi;
  r.mean_sin = gs.mean_sin;
  r.EJ_bar = p.E_J() * gs.mean_cos;
  const double inv_LJ_bar = r.EJ_bar * phase_per_flux * phase_per_flux;
  r.LJ_bar = r.EJ_bar == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_LJ_bar;
  const double k_atom = 1.0 / p.L_g - inv_LJ_bar;
  if (!(k_atom > 0.0)) throw ConfigError("renormalized atom frequency is imaginary (1/L_g <= 1/LJ_bar)");
  r.omega_a_bar = std::sqrt(k_atom / p.C_J);
  r.Za_bar = std::sqrt(1.0 / k_atom / p.C_J);
  r.g_bar = std::sqrt(derive_linear(p).Z_c0 * r.Za_bar) / (2.0 * p.L_g);
  return r;
}

struct StationarityResiduals {
  double photon = 0.0;  // [(1/L_R0 + 1/L_g) phi - psi/L_g] / (Phi0/L_J)
  double atom = 0.0;    // [(psi - phi)/L_g - (2 pi/Phi0) E_J <sin>] / (Phi0/L_J)
};

inline StationarityResiduals stationarity_check(const meanfield::Solver& solver, const CircuitParams& p,
                                                const meanfield::MeanFieldSolution& solution) {
  const auto gs = detail::ground_state_averages(solver, solution.phi_th);
  const double unit = flux_quantum / p.L_J;
  const double phi = solution.phi_th;
  const double psi = solution.psi_th;
  StationarityResiduals r;
  r.photon = ((1.0 / p.L_R0 + 1.0 / p.L_g) * phi - psi / p.L_g) / unit;
  r.atom = ((psi - phi) / p.L_g - phase_per_flux * p.E_J() * gs.mean_sin) / unit;
  return r;
}

struct FluctuationSpectrum {
  double omega_bar_plus = 0.0;
  double omega_bar_minus = 0.0;
  double omega_bar_minus_sq = 0.0;
};

inline FluctuationSpectrum fluctuation_spectrum(const RenormalizedParams& r, const DerivedLinear& d) {
  const auto f = polariton_frequencies(d.omega_c, r.omega_a_bar, r.g_bar);
  const double floor = -1e-8 * d.omega_c * d.omega_c;
  if (f.omega_minus_sq < floor)
    throw ConvergenceError("lower fluctuation frequency is imaginary; input is not an equilibrium state");
  FluctuationSpectrum s;
  s.omega_bar_plus = f.omega_plus;
  s.omega_bar_minus_sq = f.omega_minus_sq;
  s.omega_bar_minus = std::sqrt(std::max(f.omega_minus_sq, 0.0));
  return s;
}

/// phi^2/(2 L_R0) + (phi - psi)^2/(2 L_g) + EJ_bar - E_J, per atom.
inline double zero_point_shift(const CircuitParams& p, const RenormalizedParams& r) {
  const double d = r.phi_th - r.psi_th;
  return r.phi_th * r.phi_th / (2.0 * p.L_R0) + d * d / (2.0 * p.L_g) + r.EJ_bar - p.E_J();
}

/// Large-N limit of the exact ground energy per atom, measured like the finite-N
/// shift (E_g - hbar omega_c/2)/N - eps_a0: the minimum of the mean-field action
/// without the photon zero point. Differs from zero_point_shift by the atomic
/// fluctuation energy, which the expanded Hamiltonian carries separately.
inline double energy_shift_limit(const meanfield::Solver& solver, const CircuitParams& p, double eps_a0) {
  const auto sol = solver.solve(p, 0.0);
  if (sol.status != meanfield::Status::converged) throw ConvergenceError("mean-field solve failed: " + sol.message);
  return sol.action_per_atom - 0.5 * hbar * derive_linear(p).omega_c / p.N - eps_a0;
}

struct SpectrumPoint {
  double L_R0 = 0.0;
  double omega_c = 0.0;
  double omega_bar_a = 0.0;
  double g_bar = 0.0;
  double g_crit = 0.0;  // sqrt(omega_bar_a omega_c)/2
  double omega_bar_plus = 0.0;
  double omega_bar_minus = 0.0;
  double omega_bar_minus_sq = 0.0;
  double delta_eps = 0.0;
  double EJ_bar = 0.0;
  double phi_th = 0.0;
  double psi_th = 0.0;
  StationarityResiduals residuals;
  bool superradiant = false;
  bool ok = true;
  std::string message;
};

inline SpectrumPoint spectrum_point(const meanfield::Solver& solver, double L_R0) {
  const CircuitParams p = solver.atom().with_L_R0(L_R0);
  SpectrumPoint pt;
  pt.L_R0 = L_R0;
  const auto sol = solver.solve(p, 0.0);
  if (sol.status != meanfield::Status::converged) {
    pt.ok = false;
    pt.message = sol.message;
    return pt;
  }
  try {
    const DerivedLinear d = derive_linear(p);
    const auto r = renormalize(solver, p, sol);
    const auto s = fluctuation_spectrum(r, d);
    pt.omega_c = d.omega_c;
    pt.omega_bar_a = r.omega_a_bar;
    pt.g_bar = r.g_bar;
    pt.g_crit = 0.5 * std::sqrt(r.omega_a_bar * d.omega_c);
    pt.omega_bar_plus = s.omega_bar_plus;
    pt.omega_bar_minus = s.omega_bar_minus;
    pt.omega_bar_minus_sq = s.omega_bar_minus_sq;
    pt.delta_eps = zero_point_shift(p, r);
    pt.EJ_bar = r.EJ_bar;
    pt.phi_th = sol.phi_th;
    pt.psi_th = sol.psi_th;
    pt.residuals = stationarity_check(solver, p, sol);
    pt.superradiant = sol.superradiant;
  } catch (const std::exception& e) {
    pt.ok = false;
    pt.message = e.what();
  }
  return pt;
}

inline std::vector<SpectrumPoint> spectrum_scan(const meanfield::Solver& solver, const std::vector<double>& lr0_axis,
                                                unsigned threads = 1) {
  std::vector<SpectrumPoint> out(lr0_axis.size());
  parallel_for(lr0_axis.size(), threads, [&](std::size_t i) { out[i] = spectrum_point(solver, lr0_axis[i]); });
  return out;
}

/// Evenly spaced axis with `points` entries on [lo, hi].
inline std::vector<double> linear_axis(double lo, double hi, std::size_t points) {
  if (points == 0 || hi < lo) throw ConfigError("axis must be non-empty and ascending");
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i)
    x[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return x;
}

struct CuspAnalysis {
  std::size_t cusp_index = 0;      // grid minimum of omega_bar_minus
  std::size_t crossing_index = 0;  // grid minimum of g_crit - g_bar
  std::size_t onset_index = 0;     // first superradiant point (size() if none)
  double min_omega_bar_minus = 0.0;
  double min_gap = 0.0;
  bool all_positive = true;
};

/// Locates the cusp of omega_bar_minus and the point where g_bar comes closest to
/// the critical line. The exact quadratic expansion keeps g_bar at or just
/// below the critical value, so "crossing" is taken as the minimal gap.
inline CuspAnalysis analyze_cusp(const std::vector<SpectrumPoint>& pts) {
  CuspAnalysis c;
  c.onset_index = pts.size();
  c.min_omega_bar_minus = std::numeric_limits<double>::infinity();
  c.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (!p.ok) {
      c.all_positive = false;
      continue;
    }
    if (!(p.omega_bar_minus > 0.0)) c.all_positive = false;
    if (p.omega_bar_minus < c.min_omega_bar_minus) {
      c.min_omega_bar_minus = p.omega_bar_minus;
      c.cusp_index = i;
    }
    const double gap = p.g_crit - p.g_bar;
    if (gap < c.min_gap) {
      c.min_gap = gap;
      c.crossing_index = i;
    }
    if (p.superradiant && c.onset_index == pts.size()) c.onset_index = i;
  }
  return c;
}

}  // namespace srpt::fluct
