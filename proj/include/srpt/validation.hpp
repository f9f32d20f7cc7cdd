#pragma once

// Self-checks run by `srpt validate`. Each check is named; a fault can be
// injected into any single check to confirm that the check is able to fail.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "srpt/circuit.hpp"
#include "srpt/ed.hpp"
#include "srpt/fluct.hpp"
#include "srpt/fock.hpp"
#include "srpt/lanczos.hpp"
#include "srpt/meanfield.hpp"
#include "srpt/units.hpp"

namespace srpt::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::set<std::string> only;  // empty = all
  std::string inject_fault;    // name of the check to sabotage
  std::uint64_t seed = 12345;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

/// Reports `value <= limit`; an injected fault inflates the value.
inline CheckResult bound(std::string name, double value, double limit, bool fault, const std::string& what) {
  if (fault) value = std::abs(value) * 10.0 + limit * 10.0;
  CheckResult r;
  r.name = std::move(name);
  r.passed = value <= limit;
  r.detail = what + " = " + fmt(value) + " (limit " + fmt(limit) + ")";
  return r;
}

}  // namespace detail

inline CheckResult check_bosonic_equivalence(const CircuitParams&, bool fault, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0, tested = 0;
  for (int i = 0; i < 10000; ++i) {
    CircuitParams p;
    p.L_J = (0.1 + 2.0 * u(rng)) * units::nH;
    p.L_g = p.L_J * (0.05 + 0.9 * u(rng));
    p.C_J = (1.0 + 100.0 * u(rng)) * units::fF;
    p.C_R0 = (0.1 + 20.0 * u(rng)) * units::fF;
    p.L_R0 = (0.01 + 3.0 * u(rng)) * units::nH;
    const double threshold = classical_critical_inductance(p);
    if (std::abs(p.L_R0 - threshold) <= 1e-9 * threshold) continue;
    ++tested;
    const bool bosonic = bosonic_srpt_condition(derive_linear(p));
    if (bosonic != (p.L_R0 > threshold)) ++disagreements;
  }
  return detail::bound("bosonic_equivalence", disagreements, 0.0, fault,
                       "disagreements over " + std::to_string(tested) + " sets");
}

/// Bifurcation of the constrained potential at L_g = 0.6 L_J, located by
/// bisection on whether phi = 0 is a local maximum.
inline CircuitParams classical_reference(const CircuitParams& base) {
  CircuitParams p = base;
  p.L_g = 0.6 * p.L_J;
  return p;
}

inline CheckResult check_classical_bifurcation(const CircuitParams& base, bool fault) {
  const CircuitParams p = classical_reference(base);
  auto double_welled = [&](double ratio) {
    const CircuitParams q = p.with_L_R0(ratio * p.L_J);
    const double h = 1e-4 * flux_quantum;
    return constrained_potential(h, q) < constrained_potential(0.0, q);
  };
  double lo = 0.2, hi = 0.6;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (double_welled(mid) ? hi : lo) = mid;
  }
  const double located = 0.5 * (lo + hi);
  const double error = std::abs(located - 0.4) / 0.4;
  return detail::bound("classical_bifurcation", error, 0.01, fault,
                       "relative offset of bifurcation from 0.4 L_J (located " + detail::fmt(located) + ")");
}

inline CheckResult check_gaussian_cosine(const CircuitParams& p, bool fault) {
  const DerivedLinear d = derive_linear(p);
  const auto ops = fock::build_operators(d, fock::default_dimension);
  const double x2 = phase_per_flux * phase_per_flux * hbar * d.Z_a / 2.0;
  const double err = std::abs(ops.cos_op(0, 0) - std::exp(-x2 / 2.0));
  return detail::bound("gaussian_cosine", err, 1e-8, fault, "|<0|cos|0> - exp(-<x^2>/2)|");
}

inline CheckResult check_assembly_equivalence(const CircuitParams& p, bool fault) {
  const auto ops = fock::build_operators(derive_linear(p), fock::default_dimension);
  const auto a = fock::atom_spectrum(fock::atom_hamiltonian(ops, p, fock::AtomModel::full_cosine,
                                                            fock::AtomAssembly::number_basis)).energies;
  const auto b = fock::atom_spectrum(fock::atom_hamiltonian(ops, p, fock::AtomModel::full_cosine,
                                                            fock::AtomAssembly::charge_flux)).energies;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) worst = std::max(worst, std::abs(a(k) - b(k)) / p.E_J());
  return detail::bound("assembly_equivalence", worst, 1e-9, fault,
                       "max |E_k(number) - E_k(charge-flux)| / E_J, k < 10");
}

inline CheckResult check_atom_anharmonicity(const CircuitParams& p, bool fault) {
  const auto ops = fock::build_operators(derive_linear(p), fock::default_dimension);
  const auto e = fock::atom_spectrum(fock::atom_hamiltonian(ops, p)).energies;
  const double w01 = e(1) - e(0), w12 = e(2) - e(1);
  const double anh = (w12 - w01) / w01;
  return detail::bound("atom_anharmonicity", std::abs(std::abs(anh) - 0.03), 0.01, fault,
                       "| |anharmonicity| - 3% | (anharmonicity " + detail::fmt(anh) + ")");
}

inline CheckResult check_dense_vs_lanczos(const CircuitParams& p, bool fault) {
  double worst = 0.0;
  for (auto parity : {ed::Parity::even, ed::Parity::odd}) {
    ed::EdConfig c;
    c.N = 1;
    c.per_mode_cutoff = 8;
    c.total_cutoff = 16;
    c.parity = parity;
    const auto basis = ed::build_basis(c);
    const auto h = ed::build_hamiltonian(c, basis, p);
    const auto sparse = lanczos::lowest_eigenpairs(h, 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense{Eigen::MatrixXd(h), Eigen::EigenvaluesOnly};
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst, std::abs(sparse.values(k) - dense.eigenvalues()(k)) / std::abs(dense.eigenvalues()(k)));
  }
  return detail::bound("dense_vs_lanczos", worst, 1e-10, fault, "max relative eigenvalue difference");
}

inline CheckResult check_ed_structure(const CircuitParams& base, bool fault) {
  CircuitParams p = base;
  p.N = 2;
  ed::EdConfig c;
  c.N = 2;
  c.per_mode_cutoff = 6;
  c.total_cutoff = 10;
  double asym = 0.0;
  for (auto parity : {ed::Parity::even, ed::Parity::odd}) {
    c.parity = parity;
    const auto basis = ed::build_basis(c);
    const auto h = ed::build_hamiltonian(c, basis, p);
    const lanczos::SparseMatrix ht = h.transpose();
    asym = std::max(asym, (h - ht).norm());
  }
  return detail::bound("ed_symmetry", asym, 0.0, fault, "||H - H^T||");
}

inline CheckResult check_free_energy_convergence(const CircuitParams& p, bool fault) {
  const auto r = meanfield::free_energy_convergence_check(p, 0.0, units::kelvin_from_GHz(20.0),
                                                          {10, 20, 30, 40, 50, 60, 70, 80});
  const double last = r.increments.back() / p.E_J();
  auto c = detail::bound("free_energy_convergence", last, 1e-8, fault, "final increment / E_J");
  if (!fault && !r.passed) {
    c.passed = false;
    c.detail += "; increments do not shrink monotonically";
  }
  return c;
}

inline CheckResult check_critical_inductance(const CircuitParams& p, bool fault) {
  const meanfield::Solver solver(p);
  const double Lc = meanfield::critical_inductance_at_zero_T(solver, 0.2 * units::nH, 0.6 * units::nH,
                                                             1e-4 * units::nH);
  double offset = std::abs(Lc - 0.34 * units::nH) / units::nH;
  if (!(Lc > classical_critical_inductance(p))) offset = 1.0;
  return detail::bound("meanfield_critical_inductance", offset, 0.02, fault,
                       "|L_R0c - 0.34 nH| in nH (L_R0c = " + detail::fmt(Lc / units::nH) + " nH)");
}

inline CheckResult check_stationarity(const CircuitParams& p, bool fault) {
  const meanfield::Solver solver(p);
  double worst = 0.0;
  int superradiant = 0;
  for (double L : {0.36, 0.4, 0.5, 0.6, 0.8, 1.0}) {
    const CircuitParams q = p.with_L_R0(L * units::nH);
    const auto sol = solver.solve(q, 0.0);
    if (sol.status != meanfield::Status::converged || !sol.superradiant) continue;
    ++superradiant;
    const auto r = fluct::stationarity_check(solver, q, sol);
    worst = std::max({worst, std::abs(r.photon), std::abs(r.atom)});
  }
  if (superradiant == 0) worst = 1.0;
  return detail::bound("stationarity", worst, 1e-8, fault,
                       "max residual over " + std::to_string(superradiant) + " superradiant points");
}

inline CheckResult check_truncation_study(const CircuitParams& p, bool fault) {
  const auto t = ed::atomic_truncation_study(p, 16, 8);
  return detail::bound("truncation_study", t.max_relative_difference, 0.03, fault,
                       "max relative difference of the lowest 8 atomic transitions, quartic vs cosine");
}

struct NamedCheck {
  std::string name;
  std::function<CheckResult(const CircuitParams&, bool, std::uint64_t)> run;
};

inline std::vector<NamedCheck> all_checks() {
  return {
      {"bosonic_equivalence", check_bosonic_equivalence},
      {"classical_bifurcation", [](const CircuitParams& p, bool f, std::uint64_t) { return check_classical_bifurcation(p, f); }},
      {"gaussian_cosine", [](const CircuitParams& p, bool f, std::uint64_t) { return check_gaussian_cosine(p, f); }},
      {"assembly_equivalence", [](const CircuitParams& p, bool f, std::uint64_t) { return check_assembly_equivalence(p, f); }},
      {"atom_anharmonicity", [](const CircuitParams& p, bool f, std::uint64_t) { return check_atom_anharmonicity(p, f); }},
      {"dense_vs_lanczos", [](const CircuitParams& p, bool f, std::uint64_t) { return check_dense_vs_lanczos(p, f); }},
      {"ed_symmetry", [](const CircuitParams& p, bool f, std::uint64_t) { return check_ed_structure(p, f); }},
      {"free_energy_convergence", [](const CircuitParams& p, bool f, std::uint64_t) { return check_free_energy_convergence(p, f); }},
      {"meanfield_critical_inductance", [](const CircuitParams& p, bool f, std::uint64_t) { return check_critical_inductance(p, f); }},
      {"stationarity", [](const CircuitParams& p, bool f, std::uint64_t) { return check_stationarity(p, f); }},
      {"truncation_study", [](const CircuitParams& p, bool f, std::uint64_t) { return check_truncation_study(p, f); }},
  };
}

inline std::vector<std::string> check_names() {
  std::vector<std::string> n;
  for (const auto& c : all_checks()) n.push_back(c.name);
  return n;
}

/// Runs the selected checks; `report` is called after each one.
inline std::vector<CheckResult> run(const CircuitParams& p, const Options& o,
                                    const std::function<void(const CheckResult&)>& report = {}) {
  const auto checks = all_checks();
  for (const auto& name : o.only) {
    bool known = false;
    for (const auto& c : checks) known = known || c.name == name;
    if (!known) throw ConfigError("unknown check '" + name + "'");
  }
  if (!o.inject_fault.empty()) {
    bool known = false;
    for (const auto& c : checks) known = known || c.name == o.inject_fault;
    if (!known) throw ConfigError("unknown check '" + o.inject_fault + "' for fault injection");
  }
  std::vector<CheckResult> out;
  for (const auto& c : checks) {
    if (!o.only.empty() && !o.only.count(c.name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.run(p, c.name == o.inject_fault, o.seed);
    } catch (const std::exception& e) {
      r.name = c.name;
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) report(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace srpt::validation
