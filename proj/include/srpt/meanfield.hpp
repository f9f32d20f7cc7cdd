#pragma once

// Thermodynamic-limit (N -> infinity) treatment: the photon mode is replaced by
// a coherent amplitude, each atom sees a static flux phi, and the equilibrium
// amplitude minimizes the per-atom action
//
//   S/N = (1/L_R0 + 1/L_g) phi^2 / 2 + hbar omega_c/(2N) - kT ln Tr e^{-H_eff(phi)/kT}.
//
// The photon term is hbar omega_c |alpha|^2/N rewritten with
// phi = sqrt(2 hbar Z_c0) alpha / sqrt(N). Only phi >= 0 is searched; the
// physical solution set is {+phi_th, -phi_th}.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "srpt/circuit.hpp"
#include "srpt/fock.hpp"
#include "srpt/optimize.hpp"
#include "srpt/parallel.hpp"
#include "srpt/units.hpp"

namespace srpt::meanfield {

struct Options {
  int M = fock::default_dimension;
  fock::AtomModel model = fock::AtomModel::full_cosine;
  int scan_points = 256;
  double rel_tol = 1e-10;
  int max_evaluations = 2000;
  /// phi_th below this fraction of Phi0 is reported as exactly zero.
  double order_parameter_floor = 1e-6;
};

enum class Status { converged, failed };

struct MeanFieldSolution {
  double L_R0 = 0.0;
  double T = 0.0;
  double phi_th = 0.0;
  double psi_th = 0.0;
  double alpha_over_sqrtN = 0.0;
  double action_per_atom = 0.0;
  bool superradiant = false;
  bool at_search_boundary = false;
  Status status = Status::converged;
  int evaluations = 0;
  std::string message;
};

/// Free energy and mean branch flux of one atom in the static flux phi.
struct AtomResponse {
  double free_energy = 0.0;
  double mean_psi = 0.0;
};

/// Mean-field evaluator for one atom type. The operator set and bare atom
/// Hamiltonian do not depend on L_R0, so one solver serves a whole L_R0 scan and
/// may be shared read-only between threads.
class Solver {
 public:
  explicit Solver(const CircuitParams& atom, Options options = {})
      : atom_(atom), options_(options) {
    atom_.validate();
    ops_ = std::make_shared<const fock::FockOperatorSet>(fock::build_operators(derive_linear(atom_), options_.M));
    h_atom_ = fock::atom_hamiltonian(*ops_, atom_, options_.model);
  }

  const Options& options() const { return options_; }
  const CircuitParams& atom() const { return atom_; }
  const fock::FockOperatorSet& operators() const { return *ops_; }
  const Eigen::MatrixXd& atom_hamiltonian() const { return h_atom_; }

  AtomResponse respond(double phi, double T) const {
    const Eigen::MatrixXd h = fock::effective_hamiltonian(h_atom_, *ops_, atom_.L_g, phi);
    const fock::AtomSpectrum s = fock::atom_spectrum(h);
    AtomResponse r;
    r.free_energy = T > 0.0 ? fock::partition_free_energy(s.energies, T) : s.energies(0);
    r.mean_psi = fock::thermal_expectation(s, ops_->psi_op, T);
    return r;
  }

  /// (1/L_R0 + 1/L_g) phi - <psi>_T / L_g. Equals d(action)/d(phi).
  double residual(double phi, double T, const CircuitParams& p) const {
    check(p);
    return stiffness(p) * phi - respond(phi, T).mean_psi / p.L_g;
  }

  double action(double phi, double T, const CircuitParams& p) const {
    check(p);
    return action_from(phi, respond(phi, T), p);
  }

  MeanFieldSolution solve(const CircuitParams& p, double T) const;

  /// Largest photonic flux searched: 1.5 (Phi0/2) / (1 + L_g/L_R0).
  static double search_bound(const CircuitParams& p) { return 1.5 * 0.5 * flux_quantum / (1.0 + p.L_g / p.L_R0); }

 private:
  static double stiffness(const CircuitParams& p) { return 1.0 / p.L_R0 + 1.0 / p.L_g; }

  static double photon_zero_point_per_atom(const CircuitParams& p) {
    return 0.5 * hbar * std::sqrt(stiffness(p) / p.C_R0) / p.N;
  }

  static double action_from(double phi, const AtomResponse& r, const CircuitParams& p) {
    return 0.5 * stiffness(p) * phi * phi + photon_zero_point_per_atom(p) + r.free_energy;
  }

  void check(const CircuitParams& p) const {
    if (p.L_J != atom_.L_J || p.L_g != atom_.L_g || p.C_J != atom_.C_J)
      throw ConfigError("mean-field solver was built for a different atom");
    p.validate();
  }

  CircuitParams atom_;
  Options options_;
  std::shared_ptr<const fock::FockOperatorSet> ops_;
  Eigen::MatrixXd h_atom_;
};

inline MeanFieldSolution Solver::solve(const CircuitParams& p, double T) const {
  check(p);
  if (T < 0.0 || std::isnan(T)) throw ConfigError("temperature must be non-negative");
  MeanFieldSolution sol;
  sol.L_R0 = p.L_R0;
  sol.T = T;

  int evaluations = 0;
  auto act = [&](double phi) {
    ++evaluations;
    return action(phi, T, p);
  };
  auto res = [&](double phi) {
    ++evaluations;
    return residual(phi, T, p);
  };

  const double bound = search_bound(p);
  const double floor = options_.order_parameter_floor * flux_quantum;
  const auto scan = optimize::grid_scan(act, 0.0, bound, static_cast<std::size_t>(options_.scan_points));
  const std::size_t i = scan.best;
  const std::size_t last = scan.x.size() - 1;
  const double lo = scan.x[i == 0 ? 0 : i - 1];
  const double hi = scan.x[std::min(i + 1, last)];
  const auto golden = optimize::golden_section(act, lo, hi, options_.rel_tol, floor);
  double phi = golden.x;
  double value = golden.value;
  if (scan.value[i] < value) {
    phi = scan.x[i];
    value = scan.value[i];
  }
  bool ok = golden.converged;
  sol.at_search_boundary = i == last && phi >= bound * (1.0 - 1e-6);

  // Polish on the stationarity condition; golden section alone resolves phi only
  // to about sqrt(machine epsilon) because the action is flat at its minimum.
  if (ok && phi > floor && !sol.at_search_boundary) {
    double delta = 1e-6 * phi;
    double a = phi - delta, b = phi + delta;
    double ra = res(a), rb = res(b);
    int expansions = 0;
    while (!(ra < 0.0 && rb > 0.0) && expansions < 40) {
      delta *= 4.0;
      if (ra >= 0.0) {
        a = std::max(phi - delta, 0.5 * a);
        ra = res(a);
      }
      if (rb <= 0.0) {
        b = std::min(phi + delta, bound);
        rb = res(b);
      }
      ++expansions;
    }
    if (ra < 0.0 && rb > 0.0) {
      const auto root = optimize::bisect(res, a, b, ra, 1e-15 * phi, 200);
      const double polished_value = act(root.x);
      if (root.converged && polished_value <= value + 1e-12 * std::abs(value)) {
        phi = root.x;
        value = polished_value;
      }
    } else if (act(0.0) <= value + 64 * std::numeric_limits<double>::epsilon() * std::abs(value)) {
      // Flat normal phase near criticality: golden section stopped short of
      // zero, and both the residual and the action gap there are round-off.
      phi = 0.0;
      value = act(0.0);
    } else {
      ok = false;
      sol.message = "no sign change of the stationarity residual around the minimum";
    }
  }
  if (!ok && sol.message.empty()) sol.message = "golden-section search did not converge";
  if (evaluations > options_.max_evaluations) {
    ok = false;
    sol.message = "evaluation budget exhausted";
  }

  if (phi < floor) {
    phi = 0.0;
    value = action(0.0, T, p);
  }
  sol.phi_th = phi;
  sol.superradiant = phi > 0.0;
  sol.psi_th = phi > 0.0 ? respond(phi, T).mean_psi : 0.0;
  sol.action_per_atom = value;
  const double Z_c0 = derive_linear(p).Z_c0;
  sol.alpha_over_sqrtN = phi / std::sqrt(2.0 * hbar * Z_c0);
  sol.status = ok ? Status::converged : Status::failed;
  sol.evaluations = evaluations;
  return sol;
}

// Free-function forms; each builds its own solver.

inline double selfconsistency_residual(double phi, double T, const CircuitParams& p, Options o = {}) {
  return Solver(p, o).residual(phi, T, p);
}

inline double action_per_atom(double phi, double T, const CircuitParams& p, Options o = {}) {
  return Solver(p, o).action(phi, T, p);
}

inline MeanFieldSolution solve(const CircuitParams& p, double T, Options o = {}) { return Solver(p, o).solve(p, T); }

/// Bisection on L_R0 for the T = 0 onset of a nonzero photonic amplitude.
inline double critical_inductance_at_zero_T(const Solver& solver, double lo, double hi,
                                            double tol = 1e-3 * units::nH) {
  const CircuitParams base = solver.atom();
  auto superradiant = [&](double L) {
    const auto s = solver.solve(base.with_L_R0(L), 0.0);
    if (s.status != Status::converged)
      throw ConvergenceError("mean-field solve failed at L_R0 = " + std::to_string(L) + ": " + s.message);
    return s.superradiant;
  };
  if (!(lo < hi)) throw ConfigError("critical inductance bracket must satisfy lo < hi");
  if (superradiant(lo)) throw ConvergenceError("critical inductance bracket: lower end is already superradiant");
  if (!superradiant(hi)) throw ConvergenceError("critical inductance bracket: upper end is still normal");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (superradiant(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double critical_inductance_at_zero_T(const CircuitParams& p, Options o = {}) {
  const double classical = classical_critical_inductance(p);
  return critical_inductance_at_zero_T(Solver(p, o), 0.5 * classical, 4.0 * classical);
}

struct BoundaryPoint {
  double L_R0 = 0.0;
  double T_c = 0.0;          // kelvin; +inf when the column never turns normal
  bool above_axis = false;  // no normal cell in the column
};

struct PhaseDiagramGrid {
  std::vector<double> lr0_axis;   // henry
  std::vector<double> temp_axis;  // kelvin
  std::vector<MeanFieldSolution> cells;  // index it * lr0_axis.size() + il

  const MeanFieldSolution& cell(std::size_t il, std::size_t it) const { return cells[it * lr0_axis.size() + il]; }
  double amplitude(std::size_t il, std::size_t it) const { return cell(il, it).alpha_over_sqrtN; }
  std::vector<BoundaryPoint> boundary;
  std::size_t failures = 0;
};

namespace detail {

/// First temperature at which a column's amplitude vanishes. The squared
/// amplitude is interpolated linearly through the last two superradiant cells
/// and clamped between the last superradiant and first normal grid point.
inline BoundaryPoint column_boundary(const PhaseDiagramGrid& g, std::size_t il) {
  BoundaryPoint b;
  b.L_R0 = g.lr0_axis[il];
  const std::size_t nt = g.temp_axis.size();
  std::size_t first_zero = nt;
  for (std::size_t it = 0; it < nt; ++it)
    if (g.amplitude(il, it) == 0.0) {
      first_zero = it;
      break;
    }
  if (first_zero == nt) {
    b.T_c = std::numeric_limits<double>::infinity();
    b.above_axis = true;
    return b;
  }
  if (first_zero == 0) return b;
  const double t1 = g.temp_axis[first_zero - 1];
  const double t2 = g.temp_axis[first_zero];
  if (first_zero >= 2) {
    const double t0 = g.temp_axis[first_zero - 2];
    const double a0 = std::pow(g.amplitude(il, first_zero - 2), 2);
    const double a1 = std::pow(g.amplitude(il, first_zero - 1), 2);
    if (a0 > a1) {
      const double tc = t1 + a1 * (t1 - t0) / (a0 - a1);
      b.T_c = std::clamp(tc, t1, t2);
      return b;
    }
  }
  b.T_c = 0.5 * (t1 + t2);
  return b;
}

}  // namespace detail

/// Solves every (L_R0, T) cell, one L_R0 column per task. Failed cells are kept
/// in the grid with status `failed` and counted; they never abort the scan.
/// `on_column(il)` runs after column il is complete (from a worker thread).
inline PhaseDiagramGrid phase_boundary(const Solver& solver, const std::vector<double>& lr0_axis,
                                       const std::vector<double>& temp_axis, unsigned threads = 1,
                                       const std::function<void(const PhaseDiagramGrid&, std::size_t)>& on_column = {}) {
  if (lr0_axis.empty() || temp_axis.empty()) throw ConfigError("phase diagram axes must be non-empty");
  if (!std::is_sorted(lr0_axis.begin(), lr0_axis.end()) || !std::is_sorted(temp_axis.begin(), temp_axis.end()))
    throw ConfigError("phase diagram axes must be ascending");
  PhaseDiagramGrid g;
  g.lr0_axis = lr0_axis;
  g.temp_axis = temp_axis;
  g.cells.resize(lr0_axis.size() * temp_axis.size());
  const CircuitParams base = solver.atom();
  parallel_for(lr0_axis.size(), threads, [&](std::size_t il) {
    for (std::size_t it = 0; it < temp_axis.size(); ++it) {
      const std::size_t k = it * lr0_axis.size() + il;
      try {
        g.cells[k] = solver.solve(base.with_L_R0(lr0_axis[il]), temp_axis[it]);
      } catch (const std::exception& e) {
        MeanFieldSolution s;
        s.L_R0 = lr0_axis[il];
        s.T = temp_axis[it];
        s.status = Status::failed;
        s.message = e.what();
        g.cells[k] = s;
      }
    }
    if (on_column) on_column(g, il);
  });
  for (const auto& c : g.cells) g.failures += c.status == Status::failed;
  for (std::size_t il = 0; il < lr0_axis.size(); ++il) g.boundary.push_back(detail::column_boundary(g, il));
  return g;
}

struct ConvergenceReport {
  std::vector<int> M;
  std::vector<double> free_energy;  // per atom, joule
  std::vector<double> increments;   // |F(M_k+1) - F(M_k)|
  bool passed = false;
};

/// Per-atom free energy -kT ln Z_atom(phi) for increasing truncations. Passes
/// when the increments shrink monotonically and the last one is below
/// 1e-8 E_J; increments below 1e-12 E_J count as converged round-off.
inline ConvergenceReport free_energy_convergence_check(const CircuitParams& p, double phi, double T,
                                                       const std::vector<int>& M_list,
                                                       fock::AtomModel model = fock::AtomModel::full_cosine) {
  if (!(T > 0.0)) throw ConfigError("free-energy convergence check needs T > 0");
  if (M_list.empty() || !std::is_sorted(M_list.begin(), M_list.end()))
    throw ConfigError("truncation list must be non-empty and ascending");
  ConvergenceReport r;
  const DerivedLinear d = derive_linear(p);
  for (int M : M_list) {
    const auto ops = fock::build_operators(d, M);
    r.M.push_back(M);
    r.free_energy.push_back(fock::atom_partition_free_energy(ops, p, phi, T, model));
  }
  const double E_J = p.E_J();
  const double noise = 1e-12 * E_J;
  bool shrinking = true;
  for (std::size_t k = 1; k < r.free_energy.size(); ++k) {
    r.increments.push_back(std::abs(r.free_energy[k] - r.free_energy[k - 1]));
    const std::size_t n = r.increments.size();
    if (n >= 2 && r.increments[n - 1] > r.increments[n - 2] && r.increments[n - 1] > noise) shrinking = false;
  }
  const double last = r.increments.empty() ? 0.0 : r.increments.back();
  r.passed = shrinking && last < 1e-8 * E_J;
  return r;
}

}  // namespace srpt::meanfield
