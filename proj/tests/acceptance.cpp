// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (0 = all passed). Tolerances are fixed here, not read from
// any config.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "srpt/circuit.hpp"
#include "srpt/ed.hpp"
#include "srpt/fluct.hpp"
#include "srpt/fock.hpp"
#include "srpt/lanczos.hpp"
#include "srpt/meanfield.hpp"
#include "srpt/units.hpp"

using namespace srpt;

namespace {

// Pinned tolerances and limits.
constexpr int kRandomSets = 10000;
constexpr double kEqualityBand = 1e-9;
constexpr double kBifurcationRatio = 0.4;
constexpr double kBifurcationRelTol = 0.01;
constexpr double kLcTarget_nH = 0.34;
constexpr double kLcBand_nH = 0.02;
constexpr double kClassicalLc_nH = 0.30;
constexpr double kLcBisectionTol_nH = 1e-4;
constexpr double kAmplitudeSlack = 1e-9;  // solver tolerance on alpha/sqrt(N)
constexpr double kAnharmonicity = 0.03;
constexpr double kAnharmonicityBand = 0.01;
constexpr double kCuspStep_nH = 2e-3;
constexpr double kEdNoiseFloor_GHz = 1e-5;  // Lanczos eigenvalue precision at 24/48
constexpr double kDipWindowLo_nH = 0.30;
constexpr double kDipWindowHi_nH = 0.60;
constexpr double kTruncationBand = 0.03;
constexpr double kDenseLanczosRel = 1e-10;
constexpr double kGaussianCosine = 1e-8;
constexpr double kStationarity = 1e-8;
constexpr double kFreeEnergyIncrement = 1e-8;  // in units of E_J

int failures = 0;

void report(int id, bool passed, double seconds, double limit_s, const std::string& detail) {
  const bool in_time = seconds <= limit_s;
  const bool ok = passed && in_time;
  failures += !ok;
  std::printf("criterion %2d: %s  %s; runtime %.2f s (limit %.0f s)\n", id, ok ? "PASS" : "FAIL", detail.c_str(),
              seconds, limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double nH(double L) { return L * units::nH; }
double GHz(double E) { return units::GHz_from_energy(E); }

std::vector<double> grid(double lo, double step, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + step * i;
  return x;
}

// 1. Photon-picture threshold versus the inductance threshold.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0, skipped = 0;
  for (int i = 0; i < kRandomSets; ++i) {
    CircuitParams p;
    p.L_J = nH(0.1 + 3.0 * u(rng));
    p.L_g = p.L_J * (0.02 + 0.96 * u(rng));
    p.C_J = (0.5 + 200.0 * u(rng)) * units::fF;
    p.C_R0 = (0.1 + 50.0 * u(rng)) * units::fF;
    p.L_R0 = nH(0.01 + 4.0 * u(rng));
    p.N = 1 + static_cast<int>(10 * u(rng));
    const double threshold = p.L_J - p.L_g;
    if (std::abs(p.L_R0 - threshold) <= kEqualityBand * threshold) {
      ++skipped;
      continue;
    }
    const DerivedLinear d = derive_linear(p);
    const bool photon = 4 * d.g * d.g > d.omega_c * d.omega_a;
    if (photon != (p.L_R0 > threshold)) ++disagreements;
  }
  report(1, disagreements == 0, elapsed(t0), 1.0,
         std::to_string(disagreements) + " disagreements over " + std::to_string(kRandomSets - skipped) + " sets");
}

// 2. Constrained potential: single well below 0.4 L_J, double well above.
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  CircuitParams base;
  base.L_g = 0.6 * base.L_J;
  // Global minimum from a dense phase grid: is it away from phi = 0?
  auto double_welled = [&](double ratio) {
    const CircuitParams p = base.with_L_R0(ratio * base.L_J);
    const int n = 4001;
    double best = constrained_potential(0.0, p), at = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = (-0.5 + static_cast<double>(i) / (n - 1)) * flux_quantum;
      const double v = constrained_potential(phi, p);
      if (v < best) {
        best = v;
        at = phi;
      }
    }
    return std::abs(at) > 0.0;
  };
  bool family = true;
  for (double r : {0.1, 0.2, 0.3, 0.38}) family = family && !double_welled(r);
  for (double r : {0.42, 0.5, 0.6, 0.8, 1.0}) family = family && double_welled(r);
  // Bifurcation from the curvature at the origin.
  auto curved_down = [&](double ratio) {
    const CircuitParams p = base.with_L_R0(ratio * base.L_J);
    const double h = 1e-4 * flux_quantum;
    return constrained_potential(h, p) < constrained_potential(0.0, p);
  };
  double lo = 0.1, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (curved_down(mid) ? hi : lo) = mid;
  }
  const double located = 0.5 * (lo + hi);
  const double rel = std::abs(located - kBifurcationRatio) / kBifurcationRatio;
  report(2, family && rel <= kBifurcationRelTol, elapsed(t0), 1.0,
         std::string("wells ") + (family ? "single below / double above" : "WRONG") + ", bifurcation at " +
             fmt("%.6f", located) + " L_J (rel. offset " + fmt("%.2e", rel) + ")");
}

// 3. Mean-field critical inductance at T = 0.
double criterion_3(const meanfield::Solver& solver) {
  const auto t0 = std::chrono::steady_clock::now();
  double Lc = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
  try {
    Lc = meanfield::critical_inductance_at_zero_T(solver, nH(0.2), nH(0.6), nH(kLcBisectionTol_nH));
    detail = "L_R0c = " + fmt("%.5f", Lc / units::nH) + " nH";
  } catch (const std::exception& e) {
    detail = std::string("bisection failed: ") + e.what();
  }
  const bool ok = std::abs(Lc / units::nH - kLcTarget_nH) <= kLcBand_nH && Lc / units::nH > kClassicalLc_nH;
  report(3, ok, elapsed(t0), 60.0, detail + " (M = " + std::to_string(solver.options().M) + ")");
  return Lc;
}

// 4. Phase-boundary monotonicity on a 20 x 20 grid.
void criterion_4(const meanfield::Solver& solver) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> L, T;
  for (int i = 0; i < 20; ++i) L.push_back(nH(0.30 + 0.70 * i / 19.0));
  for (int i = 0; i < 20; ++i) T.push_back(units::kelvin_from_GHz(200.0 * i / 19.0));
  const auto g = meanfield::phase_boundary(solver, L, T, threads());
  int amplitude_violations = 0, tc_violations = 0;
  for (std::size_t il = 0; il < L.size(); ++il)
    for (std::size_t it = 1; it < T.size(); ++it)
      if (g.amplitude(il, it) > g.amplitude(il, it - 1) + kAmplitudeSlack) ++amplitude_violations;
  for (std::size_t il = 1; il < L.size(); ++il)
    if (g.boundary[il].T_c < g.boundary[il - 1].T_c) ++tc_violations;
  int superradiant_columns = 0;
  for (const auto& b : g.boundary) superradiant_columns += b.T_c > 0.0;
  const bool ok = g.failures == 0 && amplitude_violations == 0 && tc_violations == 0 && superradiant_columns > 0;
  report(4, ok, elapsed(t0), 600.0,
         std::to_string(g.failures) + " failed cells, " + std::to_string(tc_violations) + " T_c decreases, " +
             std::to_string(amplitude_violations) + " amplitude increases in T, T_c(1.0 nH) = " +
             fmt("%.2f", units::GHz_from_kelvin(g.boundary.back().T_c)) + " GHz");
}

// 5. Relative anharmonicity of the single atom.
void criterion_5(const CircuitParams& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ops = fock::build_operators(derive_linear(p), fock::default_dimension);
  const auto e = fock::atom_spectrum(fock::atom_hamiltonian(ops, p)).energies;
  const double w01 = e(1) - e(0), w12 = e(2) - e(1);
  const double anh = (w12 - w01) / w01;
  report(5, std::abs(std::abs(anh) - kAnharmonicity) <= kAnharmonicityBand, elapsed(t0), 1.0,
         "(w12 - w01)/w01 = " + fmt("%.4f", anh) + ", w01 = " + fmt("%.3f", GHz(w01)) + " GHz");
}

// 6. Renormalized lower branch: positive with one cusp at L_R0c.
std::vector<fluct::SpectrumPoint> criterion_6(const meanfield::Solver& solver, double Lc) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto axis = grid(nH(0.1), nH(kCuspStep_nH), 501);  // 0.1 .. 1.1 nH
  const auto pts = fluct::spectrum_scan(solver, axis, threads());
  const auto c = fluct::analyze_cusp(pts);
  int local_minima = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i)
    if (pts[i].omega_bar_minus < pts[i - 1].omega_bar_minus && pts[i].omega_bar_minus < pts[i + 1].omega_bar_minus)
      ++local_minima;
  const double step = nH(kCuspStep_nH) * (1 + 1e-9);
  const double cusp_off = std::abs(axis[c.cusp_index] - Lc);
  const double cross_off = std::abs(axis[c.crossing_index] - Lc);
  const bool ok = c.all_positive && local_minima == 1 && cusp_off <= step && cross_off <= step;
  report(6, ok, elapsed(t0), 300.0,
         std::string(c.all_positive ? "positive everywhere" : "NOT positive") + ", " + std::to_string(local_minima) +
             " local minima, cusp at " + fmt("%.3f", axis[c.cusp_index] / units::nH) + " nH (min " +
             fmt("%.3f", units::GHz_from_angular(c.min_omega_bar_minus)) + " GHz), g_bar closest to critical at " +
             fmt("%.3f", axis[c.crossing_index] / units::nH) + " nH");
  return pts;
}

// 7. Finite-N dip of the even transition and collapse of the odd one.
void criterion_7(const CircuitParams& p, double Lc) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto axis = grid(nH(0.1), nH(0.025), 37);  // 0.1 .. 1.0 nH
  const double eps = fock::atomic_zero_point_energy(p);
  const std::vector<int> Ns{1, 2, 3};
  std::vector<std::vector<ed::EdResult>> r(Ns.size(), std::vector<ed::EdResult>(axis.size()));
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t n = 0; n < Ns.size(); ++n)
    for (std::size_t i = 0; i < axis.size(); ++i) jobs.emplace_back(n, i);
  parallel_for(jobs.size(), threads(), [&](std::size_t j) {
    const auto [n, i] = jobs[j];
    ed::Settings s;
    s.N = Ns[n];
    s.per_mode_cutoff = 24;
    s.total_cutoff = 48;
    r[n][i] = ed::solve_point(p.with_L_R0(axis[i]), s, eps);
  });

  bool dips_ok = true;
  std::string dips;
  double prev_min = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < Ns.size(); ++n) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < axis.size(); ++i)
      if (r[n][i].transition_even < r[n][k].transition_even) k = i;
    const double m = r[n][k].transition_even;
    const bool interior = k > 0 && k + 1 < axis.size();
    const double L = axis[k] / units::nH;
    dips_ok = dips_ok && interior && L >= kDipWindowLo_nH && L <= kDipWindowHi_nH && m < prev_min;
    prev_min = m;
    dips += "N=" + std::to_string(Ns[n]) + " " + fmt("%.3f", GHz(m)) + " GHz @ " + fmt("%.3f", L) + " nH; ";
  }

  // Odd transition above L_R0c must not grow with N beyond solver precision.
  int odd_violations = 0;
  double worst = 0.0, worst_L = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (axis[i] <= Lc) continue;
    for (std::size_t n = 1; n < Ns.size(); ++n) {
      const double excess = GHz(r[n][i].transition_odd) - GHz(r[n - 1][i].transition_odd);
      if (excess > kEdNoiseFloor_GHz) {
        ++odd_violations;
        if (excess > worst) {
          worst = excess;
          worst_L = axis[i] / units::nH;
        }
      }
    }
  }
  std::string detail = "even dips " + dips + std::to_string(odd_violations) + " odd-gap increases with N above L_R0c";
  if (odd_violations) detail += " (largest +" + fmt("%.2e", worst) + " GHz at " + fmt("%.3f", worst_L) + " nH)";
  report(7, dips_ok && odd_violations == 0, elapsed(t0), 1800.0, detail);

  if (odd_violations) {
    // Cutoff sensitivity of the offending point, for the record.
    ed::Settings s;
    s.N = 3;
    s.per_mode_cutoff = 20;
    s.total_cutoff = 40;
    const double at = nH(worst_L);
    const auto lower = ed::solve_point(p.with_L_R0(at), s, eps);
    std::size_t i = 0;
    while (std::abs(axis[i] - at) > 1e-15) ++i;
    std::printf("              info: N=3 odd gap at %.3f nH is %.3e GHz at cutoffs 24/48 and %.3e GHz at 20/40\n",
                worst_L, GHz(r[2][i].transition_odd), GHz(lower.transition_odd));
  }
}

// 8. Quartic versus full-cosine atom, lowest eight transitions.
void criterion_8(const CircuitParams& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = ed::atomic_truncation_study(p, 24, 8);
  const double seconds = elapsed(t0);
  ed::Settings s;
  s.N = 1;
  s.per_mode_cutoff = 16;
  s.total_cutoff = 32;
  const auto dip = ed::dip_comparison(p, s, grid(nH(0.30), nH(0.025), 17));
  report(8, t.max_relative_difference <= kTruncationBand, seconds, 300.0,
         "max relative difference " + fmt("%.4f", t.max_relative_difference) + " at 24 bosons per atom");
  std::printf("              info: N=1 even-transition dip at 16/32, quartic vs cosine: depth %.1f%%, location %.1f%%\n",
              100 * dip.relative_depth_difference, 100 * dip.relative_location_shift);
}

// 9. Dense versus Lanczos, Gaussian cosine identity, stationarity.
void criterion_9(const CircuitParams& p, const std::vector<fluct::SpectrumPoint>& scan) {
  const auto t0 = std::chrono::steady_clock::now();
  double dense_rel = 0.0;
  for (double L : {0.2, 0.6, 1.0})
    for (auto parity : {ed::Parity::even, ed::Parity::odd}) {
      ed::EdConfig c;
      c.N = 1;
      c.per_mode_cutoff = 8;
      c.total_cutoff = 16;
      c.parity = parity;
      const auto basis = ed::build_basis(c);
      const auto h = ed::build_hamiltonian(c, basis, p.with_L_R0(nH(L)));
      const auto sparse = lanczos::lowest_eigenpairs(h, 4);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense{Eigen::MatrixXd(h), Eigen::EigenvaluesOnly};
      for (int k = 0; k < 4; ++k)
        dense_rel = std::max(dense_rel, std::abs(sparse.values(k) - dense.eigenvalues()(k)) /
                                            std::abs(dense.eigenvalues()(k)));
    }

  const DerivedLinear d = derive_linear(p);
  const auto ops = fock::build_operators(d, 60);
  const double k2 = phase_per_flux * phase_per_flux * hbar * d.Z_a / 2.0;
  const double gauss = std::abs(ops.cos_op(0, 0) - std::exp(-k2 / 2.0));

  double stat = 0.0;
  int superradiant = 0;
  for (const auto& pt : scan) {
    if (!pt.ok || !pt.superradiant) continue;
    ++superradiant;
    stat = std::max({stat, std::abs(pt.residuals.photon), std::abs(pt.residuals.atom)});
  }
  const bool ok = dense_rel <= kDenseLanczosRel && gauss <= kGaussianCosine && stat < kStationarity && superradiant > 0;
  report(9, ok, elapsed(t0), 60.0,
         "dense vs Lanczos " + fmt("%.1e", dense_rel) + ", |<0|cos|0> - exp(-<x^2>/2)| " + fmt("%.1e", gauss) +
             ", max stationarity residual " + fmt("%.1e", stat) + " over " + std::to_string(superradiant) +
             " superradiant points");
}

// 10. Free energy versus Fock truncation at phi = 0, kB T/h = 20 GHz.
void criterion_10(const CircuitParams& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = meanfield::free_energy_convergence_check(p, 0.0, units::kelvin_from_GHz(20.0),
                                                          {10, 20, 30, 40, 50, 60, 70, 80});
  const double last = r.increments.back() / p.E_J();
  report(10, r.passed && last < kFreeEnergyIncrement, elapsed(t0), 10.0,
         "final increment " + fmt("%.1e", last) + " E_J (M 70 -> 80), increments " +
             (r.passed ? "shrinking" : "NOT shrinking"));
}

}  // namespace

int main() {
  const CircuitParams p;  // reference circuit
  std::printf("acceptance: L_J = %.2f nH, L_g = %.2f nH, C_J = %.0f fF, C_R0 = %.0f fF, E_J/h = %.2f GHz, %u thread(s)\n",
              p.L_J / units::nH, p.L_g / units::nH, p.C_J / units::fF, p.C_R0 / units::fF, GHz(p.E_J()), threads());
  const meanfield::Solver solver(p);
  criterion_1();
  criterion_2();
  const double Lc = criterion_3(solver);
  criterion_4(solver);
  criterion_5(p);
  const auto scan = criterion_6(solver, Lc);
  criterion_7(p, Lc);
  criterion_8(p);
  criterion_9(p, scan);
  criterion_10(p);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
