#pragma once

// Subcommand bodies for the `srpt` executable. Tables go to `out`, human
// summaries to `log`. Each returns the process exit code (0 success, 1
// numerical non-convergence); configuration errors propagate as ConfigError.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "srpt/circuit.hpp"
#include "srpt/config.hpp"
#include "srpt/ed.hpp"
#include "srpt/fluct.hpp"
#include "srpt/meanfield.hpp"
#include "srpt/parallel.hpp"
#include "srpt/table.hpp"
#include "srpt/units.hpp"
#include "srpt/validation.hpp"

namespace srpt::commands {

using table::Cell;
using Rows = std::vector<std::vector<Cell>>;

/// Options that only some subcommands understand.
struct Extras {
  bool compare_meanfield = false;    // ed
  std::string export_matrix_dir;     // ed
  std::string boundary_out;          // meanfield
  std::vector<std::string> only;     // validate
  std::string inject_fault;          // validate
};

namespace detail {

inline double nH(double L) { return L / units::nH; }
inline double GHz(double omega) { return units::GHz_from_angular(omega); }
inline double GHz_energy(double e) { return units::GHz_from_energy(e); }
inline Cell flag(bool b) { return static_cast<long long>(b ? 1 : 0); }

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::vector<double> lr0_axis(const config::RunConfig& c, config::Range fallback) {
  return (c.lr0 ? *c.lr0 : fallback).values();
}

}  // namespace detail

inline int run_classical(const config::RunConfig& c, std::ostream& out, std::ostream& log) {
  c.validate();
  table::Writer w(out, c.format, "classical", {"L_R0_over_L_J", "L_R0_nH", "phase_rad", "U_over_NEJ"});
  const auto phases = c.phase.values();
  nlohmann::json minima = nlohmann::json::array();
  for (double ratio : c.lr0_ratios) {
    const CircuitParams p = c.circuit().with_L_R0(ratio * c.L_J);
    p.validate();
    for (double x : phases) {
      const double phi = x / phase_per_flux;
      w.row({ratio, detail::nH(p.L_R0), x, constrained_potential_normalized(phi, p)});
    }
    const auto m = classical_minimum(p);
    const double x0 = phase_per_flux * m.phi0;
    log << "L_R0/L_J = " << ratio << ": " << (m.superradiant ? "double well, minima at 2 pi phi/Phi0 = +-" : "single well at 0")
        << (m.superradiant ? detail::fixed(x0) : "") << '\n';
    minima.push_back({{"L_R0_over_L_J", ratio}, {"double_welled", m.superradiant}, {"phase_min_rad", x0}});
  }
  log << "classical threshold L_J - L_g = " << detail::nH(classical_critical_inductance(c.circuit())) << " nH\n";
  w.extra("minima", minima);
  w.finish();
  return 0;
}

inline int run_linear(const config::RunConfig& c, std::ostream& out, std::ostream& log) {
  c.validate();
  const auto axis = detail::lr0_axis(c, {0.1 * units::nH, 1.0 * units::nH, 91});
  table::Writer w(out, c.format, "linear",
                  {"L_R0_nH", "omega_c_GHz", "omega_a_GHz", "g_GHz", "omega_plus_GHz", "omega_minus_sq_GHz2",
                   "omega_minus_GHz", "unstable"});
  double prev_L = 0.0;
  bool prev_unstable = false;
  bool first = true;
  nlohmann::json changes = nlohmann::json::array();
  for (double L : axis) {
    const CircuitParams p = c.circuit().with_L_R0(L);
    DerivedLinear d = derive_linear(p);
    if (!c.coupling) d.g = 0.0;
    const auto f = polariton_frequencies(d.omega_c, d.omega_a, d.g);
    const bool unstable = f.omega_minus_sq < 0.0;
    const double to_GHz2 = 1.0 / (two_pi * two_pi * units::GHz * units::GHz);
    w.row({detail::nH(L), detail::GHz(d.omega_c), detail::GHz(d.omega_a), detail::GHz(d.g), detail::GHz(f.omega_plus),
           f.omega_minus_sq * to_GHz2, unstable ? std::numeric_limits<double>::quiet_NaN() : detail::GHz(f.omega_minus()),
           detail::flag(unstable)});
    if (!first && unstable != prev_unstable) {
      log << "omega_minus^2 changes sign between " << detail::nH(prev_L) << " and " << detail::nH(L) << " nH\n";
      changes.push_back({{"L_R0_lo_nH", detail::nH(prev_L)}, {"L_R0_hi_nH", detail::nH(L)}});
    }
    first = false;
    prev_L = L;
    prev_unstable = unstable;
  }
  if (c.coupling)
    log << "classical threshold L_J - L_g = " << detail::nH(classical_critical_inductance(c.circuit())) << " nH\n";
  else
    log << "coupling disabled: omega_plus/minus equal the bare mode frequencies\n";
  w.extra("sign_changes", changes);
  w.finish();
  return 0;
}

inline int run_meanfield(const config::RunConfig& c, const Extras& x, std::ostream& out, std::ostream& log) {
  c.validate();
  const auto axis = detail::lr0_axis(c, {0.30 * units::nH, 1.0 * units::nH, 20});
  const auto t_axis_Hz = (c.temperature ? *c.temperature : config::Range{0.0, 200e9, 20}).values();
  std::vector<double> t_axis;
  for (double f : t_axis_Hz) t_axis.push_back(units::kelvin_from_GHz(f / units::GHz));

  meanfield::Options o;
  o.M = c.M;
  const meanfield::Solver solver(c.circuit(), o);
  table::Writer w(out, c.format, "meanfield",
                  {"L_R0_nH", "kBT_over_h_GHz", "alpha_over_sqrtN", "phi_th_Wb", "superradiant", "converged"});
  table::OrderedRows rows(w, axis.size());
  auto emit = [&](const meanfield::PhaseDiagramGrid& g, std::size_t il) {
    Rows r;
    for (std::size_t it = 0; it < t_axis.size(); ++it) {
      const auto& s = g.cell(il, it);
      r.push_back({detail::nH(axis[il]), t_axis_Hz[it] / units::GHz, s.alpha_over_sqrtN, s.phi_th,
                   detail::flag(s.superradiant), detail::flag(s.status == meanfield::Status::converged)});
    }
    rows.put(il, std::move(r));
  };
  const auto grid = meanfield::phase_boundary(solver, axis, t_axis, c.threads, emit);

  nlohmann::json boundary = nlohmann::json::array();
  std::ofstream bfile;
  if (!x.boundary_out.empty()) {
    bfile.open(x.boundary_out);
    if (!bfile) throw ConfigError("cannot open " + x.boundary_out + " for writing");
    bfile << "L_R0_nH,Tc_kBT_over_h_GHz\n";
  }
  log << "phase boundary (kB T_c / h):\n";
  for (const auto& b : grid.boundary) {
    const double tc = b.above_axis ? std::numeric_limits<double>::infinity() : units::GHz_from_kelvin(b.T_c);
    boundary.push_back({{"L_R0_nH", detail::nH(b.L_R0)}, {"Tc_kBT_over_h_GHz", table::to_json(tc)}});
    if (bfile) bfile << table::format_double(detail::nH(b.L_R0)) << ',' << table::format_double(tc) << '\n';
    log << "  L_R0 = " << detail::fixed(detail::nH(b.L_R0)) << " nH: "
        << (b.above_axis ? std::string("superradiant over the whole axis") : detail::fixed(tc, 3) + " GHz") << '\n';
  }
  w.extra("boundary", boundary);
  w.finish();
  if (grid.failures) {
    log << grid.failures << " cell(s) did not converge\n";
    return 1;
  }
  return 0;
}

inline int run_fluct(const config::RunConfig& c, std::ostream& out, std::ostream& log) {
  c.validate();
  const auto axis = detail::lr0_axis(c, {0.1 * units::nH, 1.0 * units::nH, 500});
  meanfield::Options o;
  o.M = c.M;
  const meanfield::Solver solver(c.circuit(), o);
  table::Writer w(out, c.format, "fluct",
                  {"L_R0_nH", "omega_c_GHz", "omega_bar_a_GHz", "g_bar_GHz", "g_crit_GHz", "omega_bar_minus_GHz",
                   "omega_bar_plus_GHz", "delta_eps_over_h_GHz", "phase"});
  table::OrderedRows rows(w, axis.size());
  std::vector<fluct::SpectrumPoint> pts(axis.size());
  parallel_for(axis.size(), c.threads, [&](std::size_t i) {
    pts[i] = fluct::spectrum_point(solver, axis[i]);
    const auto& p = pts[i];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!p.ok) {
      rows.put(i, {{detail::nH(axis[i]), nan, nan, nan, nan, nan, nan, nan, std::string("failed")}});
      return;
    }
    rows.put(i, {{detail::nH(axis[i]), detail::GHz(p.omega_c), detail::GHz(p.omega_bar_a), detail::GHz(p.g_bar),
                  detail::GHz(p.g_crit), detail::GHz(p.omega_bar_minus), detail::GHz(p.omega_bar_plus),
                  detail::GHz_energy(p.delta_eps), std::string(p.superradiant ? "superradiant" : "normal")}});
  });

  std::size_t failures = 0;
  for (const auto& p : pts) failures += !p.ok;
  const auto cusp = fluct::analyze_cusp(pts);
  nlohmann::json summary;
  if (failures < pts.size()) {
    summary["cusp_L_R0_nH"] = detail::nH(axis[cusp.cusp_index]);
    summary["closest_approach_L_R0_nH"] = detail::nH(axis[cusp.crossing_index]);
    summary["min_omega_bar_minus_GHz"] = detail::GHz(cusp.min_omega_bar_minus);
    summary["omega_bar_minus_positive"] = cusp.all_positive;
    log << "omega_bar_minus cusp at L_R0 = " << detail::fixed(detail::nH(axis[cusp.cusp_index])) << " nH, minimum "
        << detail::fixed(detail::GHz(cusp.min_omega_bar_minus), 4) << " GHz\n";
    log << "g_bar closest to sqrt(omega_bar_a omega_c)/2 at L_R0 = "
        << detail::fixed(detail::nH(axis[cusp.crossing_index])) << " nH\n";
    if (cusp.onset_index < axis.size())
      log << "first superradiant grid point: " << detail::fixed(detail::nH(axis[cusp.onset_index])) << " nH\n";
  }
  w.extra("summary", summary);
  w.finish();
  if (failures) {
    log << failures << " point(s) failed\n";
    return 1;
  }
  return 0;
}

inline int run_ed(const config::RunConfig& c, const Extras& x, std::ostream& out, std::ostream& log) {
  c.validate();
  const auto axis = detail::lr0_axis(c, {0.1 * units::nH, 1.0 * units::nH, 19});
  std::vector<std::string> columns{"N", "L_R0_nH", "sector_dims", "E_g_over_h_GHz", "photons_per_atom",
                                   "transition_even_GHz", "transition_odd_GHz", "delta_eps_over_h_GHz",
                                   "ground_in_odd_sector"};
  if (x.compare_meanfield) {
    columns.insert(columns.end(), {"mf_photons_per_atom", "mf_omega_bar_minus_GHz", "mf_delta_eps_over_h_GHz",
                                    "mf_energy_shift_limit_GHz"});
  }
  for (int N : c.N_list)
    if (N >= 4)
      log << "warning: N = " << N << " with cutoffs " << c.per_mode_cutoff << "/" << c.total_cutoff
          << " needs large memory and time\n";

  const double eps_a0 = fock::atomic_zero_point_energy(c.circuit());
  // The renormalized spectrum uses the full cosine; the energy limit uses the
  // same atom model as the diagonalization so the two are comparable.
  std::optional<meanfield::Solver> solver, limit_solver;
  if (x.compare_meanfield) {
    meanfield::Options o;
    o.M = c.M;
    solver.emplace(c.circuit(), o);
    if (c.quartic) o.model = fock::AtomModel::quartic;
    limit_solver.emplace(c.circuit(), o);
  }
  if (!x.export_matrix_dir.empty()) std::filesystem::create_directories(x.export_matrix_dir);

  table::Writer w(out, c.format, "ed", columns);
  struct Job {
    int N;
    double L;
  };
  std::vector<Job> jobs;
  for (int N : c.N_list)
    for (double L : axis) jobs.push_back({N, L});
  table::OrderedRows rows(w, jobs.size());
  std::vector<double> even_min(c.N_list.size(), std::numeric_limits<double>::infinity());
  std::vector<double> even_min_L(c.N_list.size(), 0.0);
  std::vector<int> ground_odd(jobs.size(), 0);
  std::vector<std::string> errors(jobs.size());
  std::mutex dip_mutex;

  parallel_for(jobs.size(), c.threads, [&](std::size_t j) {
    const auto [N, L] = jobs[j];
    ed::Settings s;
    s.N = N;
    s.per_mode_cutoff = c.per_mode_cutoff;
    s.total_cutoff = c.total_cutoff;
    s.quartic = c.quartic;
    s.coupling = c.coupling;
    s.n_even = c.n_even;
    s.max_dimension = c.max_dimension;
    s.lanczos.seed = c.seed;
    CircuitParams p = c.circuit().with_L_R0(L);
    p.N = N;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      if (!x.export_matrix_dir.empty()) {
        for (auto parity : {ed::Parity::even, ed::Parity::odd}) {
          const auto cfg = ed::sector_config(s, parity);
          const auto basis = ed::build_basis(cfg);
          std::ostringstream name;
          name << "H_N" << N << "_L" << detail::fixed(detail::nH(L)) << "nH_" << ed::to_string(parity) << ".mtx";
          ed::write_matrix_market(ed::build_hamiltonian(cfg, basis, p),
                                  (std::filesystem::path(x.export_matrix_dir) / name.str()).string());
        }
      }
      const auto r = ed::solve_point(p, s, eps_a0);
      ground_odd[j] = r.ground_in_odd_sector;
      std::vector<Cell> row{static_cast<long long>(N), detail::nH(L),
                            std::to_string(r.even_dimension) + "/" + std::to_string(r.odd_dimension),
                            detail::GHz_energy(r.ground_energy), r.photon_number_per_atom,
                            detail::GHz_energy(r.transition_even), detail::GHz_energy(r.transition_odd),
                            detail::GHz_energy(r.delta_eps), detail::flag(r.ground_in_odd_sector)};
      if (solver) {
        const auto pt = fluct::spectrum_point(*solver, L);
        const double a = pt.ok ? pt.phi_th / std::sqrt(2.0 * hbar * derive_linear(p).Z_c0) : nan;
        row.insert(row.end(), {pt.ok ? a * a : nan, pt.ok ? detail::GHz(pt.omega_bar_minus) : nan,
                               pt.ok ? detail::GHz_energy(pt.delta_eps) : nan,
                               detail::GHz_energy(fluct::energy_shift_limit(*limit_solver, p, eps_a0))});
      }
      const std::size_t ni = static_cast<std::size_t>(std::find(c.N_list.begin(), c.N_list.end(), N) - c.N_list.begin());
      {
        std::lock_guard lock(dip_mutex);
        if (r.transition_even < even_min[ni]) {
          even_min[ni] = r.transition_even;
          even_min_L[ni] = L;
        }
      }
      rows.put(j, {row});
    } catch (const ConvergenceError& e) {
      errors[j] = e.what();
      std::vector<Cell> row{static_cast<long long>(N), detail::nH(L), std::string("failed"), nan, nan, nan, nan, nan,
                            detail::flag(false)};
      if (solver) row.insert(row.end(), {nan, nan, nan, nan});
      rows.put(j, {row});
    }
  });

  nlohmann::json dips = nlohmann::json::array();
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    if (!std::isfinite(even_min[i])) continue;
    log << "N = " << c.N_list[i] << ": lowest even transition " << detail::fixed(detail::GHz_energy(even_min[i]), 4)
        << " GHz at L_R0 = " << detail::fixed(detail::nH(even_min_L[i])) << " nH\n";
    dips.push_back({{"N", c.N_list[i]},
                    {"L_R0_nH", detail::nH(even_min_L[i])},
                    {"transition_even_GHz", detail::GHz_energy(even_min[i])}});
  }
  w.extra("dips", dips);
  w.finish();
  int failed = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (ground_odd[j])
      log << "note: odd-sector level below the even ground state at N = " << jobs[j].N
          << ", L_R0 = " << detail::nH(jobs[j].L) << " nH\n";
    if (!errors[j].empty()) {
      ++failed;
      log << "error at N = " << jobs[j].N << ", L_R0 = " << detail::nH(jobs[j].L) << " nH: " << errors[j] << '\n';
    }
  }
  return failed ? 1 : 0;
}

inline int run_validate(const config::RunConfig& c, const Extras& x, std::ostream& out, std::ostream& log) {
  c.validate();
  validation::Options o;
  o.only.insert(x.only.begin(), x.only.end());
  o.inject_fault = x.inject_fault;
  o.seed = c.seed;
  table::Writer w(out, c.format, "validate", {"check", "passed", "detail", "runtime_s"});
  int failures = 0;
  validation::run(c.circuit(), o, [&](const validation::CheckResult& r) {
    failures += !r.passed;
    log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    w.row({r.name, detail::flag(r.passed), r.detail, r.seconds});
  });
  w.finish();
  log << (failures ? std::to_string(failures) + " check(s) failed\n" : std::string("all checks passed\n"));
  return failures ? 1 : 0;
}

}  // namespace srpt::commands
