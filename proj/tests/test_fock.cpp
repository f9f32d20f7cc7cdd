#include <catch_amalgamated.hpp>

#include <cmath>

#include "srpt/fock.hpp"

using namespace srpt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// <m| exp(i l (b + b^dag)) |n> for m >= n, real and imaginary parts, from the
// displacement-operator formula with generalized Laguerre polynomials.
std::pair<double, double> displacement_element(int m, int n, double l) {
  if (m < n) std::swap(m, n);
  const int d = m - n;
  const double mag = std::exp(-0.5 * l * l + 0.5 * (log_factorial(n) - log_factorial(m))) * std::pow(l, d) *
                     std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(d), l * l);
  // i^d
  switch (d % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

}  // namespace

TEST_CASE("ladder-operator matrices", "[fock]") {
  const auto d = derive_linear(CircuitParams{});
  const auto ops = fock::build_operators(d, 12);
  const double s = std::sqrt(hbar * d.Z_a / 2);
  const double r = std::sqrt(hbar / (2 * d.Z_a));
  CHECK_THAT(ops.psi_op(3, 4), WithinRel(s * 2.0, 1e-14));
  CHECK_THAT(ops.rho_imag(4, 3), WithinRel(r * 2.0, 1e-14));
  CHECK(ops.psi_op(3, 5) == 0.0);
  CHECK(ops.number_op(7, 7) == 7.0);
  // [psi, rho] = i hbar away from the truncation edge: psi rho_imag - rho_imag psi = hbar.
  const Eigen::MatrixXd comm = ops.psi_op * ops.rho_imag - ops.rho_imag * ops.psi_op;
  for (int n = 0; n < 11; ++n) CHECK_THAT(comm(n, n), WithinRel(hbar, 1e-12));
}

TEST_CASE("psi^2 and psi^4 equal exact products on an enlarged space", "[fock]") {
  const auto d = derive_linear(CircuitParams{});
  const int M = 20;
  const auto small = fock::build_operators(d, M);
  const auto big = fock::build_operators(d, M + 6);
  const Eigen::MatrixXd p2 = (big.psi_op * big.psi_op).topLeftCorner(M, M);
  const Eigen::MatrixXd p4 = (big.psi_op * big.psi_op * big.psi_op * big.psi_op).topLeftCorner(M, M);
  CHECK((small.psi2_op - p2).cwiseAbs().maxCoeff() <= 1e-12 * p2.cwiseAbs().maxCoeff());
  CHECK((small.psi4_op - p4).cwiseAbs().maxCoeff() <= 1e-12 * p4.cwiseAbs().maxCoeff());
}

TEST_CASE("cosine and sine match the Laguerre closed form", "[fock]") {
  const auto d = derive_linear(CircuitParams{});
  const double l = phase_per_flux * std::sqrt(hbar * d.Z_a / 2);
  const auto ops = fock::build_operators(d, 30, 200);
  double worst = 0.0;
  for (int m = 0; m < 20; ++m)
    for (int n = 0; n < 20; ++n) {
      const auto [re, im] = displacement_element(m, n, l);
      worst = std::max({worst, std::abs(ops.cos_op(m, n) - re), std::abs(ops.sin_op(m, n) - im)});
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("Gaussian vacuum expectation of the cosine at M = 60", "[fock]") {
  const auto d = derive_linear(CircuitParams{});
  const auto ops = fock::build_operators(d, 60);
  const double l = phase_per_flux * std::sqrt(hbar * d.Z_a / 2);
  CHECK_THAT(ops.cos_op(0, 0), WithinAbs(std::exp(-0.5 * l * l), 1e-8));
}

TEST_CASE("parity structure of cos and sin", "[fock]") {
  const auto ops = fock::build_operators(derive_linear(CircuitParams{}), 15);
  for (int m = 0; m < 15; ++m)
    for (int n = 0; n < 15; ++n) {
      if ((m + n) % 2) CHECK(ops.cos_op(m, n) == 0.0);
      else CHECK(ops.sin_op(m, n) == 0.0);
    }
  CHECK((ops.cos_op - ops.cos_op.transpose()).norm() == 0.0);
}

TEST_CASE("single-state truncation", "[fock]") {
  const CircuitParams p;
  const auto ops = fock::build_operators(derive_linear(p), 1);
  CHECK(ops.cos_op(0, 0) == 1.0);
  CHECK(ops.sin_op(0, 0) == 0.0);
  CHECK(ops.psi_op(0, 0) == 0.0);
  CHECK_THROWS_AS(fock::build_operators(derive_linear(p), 0), ConfigError);
  CHECK_THROWS_AS(fock::build_operators(derive_linear(p), 10, 5), ConfigError);
}

TEST_CASE("harmonic atom spectrum", "[fock]") {
  const CircuitParams p;
  const auto d = derive_linear(p);
  const auto ops = fock::build_operators(d, 10);
  const auto s = fock::atom_spectrum(fock::atom_hamiltonian(ops, p, fock::AtomModel::harmonic));
  for (int n = 0; n < 10; ++n) CHECK_THAT(s.energies(n), WithinRel(hbar * d.omega_a * (n + 0.5) + p.E_J(), 1e-13));
}

TEST_CASE("number-basis and charge-flux assemblies agree", "[fock]") {
  const CircuitParams p;
  const auto ops = fock::build_operators(derive_linear(p), 60);
  const auto a = fock::atom_spectrum(fock::atom_hamiltonian(ops, p)).energies;
  const auto b = fock::atom_spectrum(
                     fock::atom_hamiltonian(ops, p, fock::AtomModel::full_cosine, fock::AtomAssembly::charge_flux))
                     .energies;
  for (int k = 0; k < 10; ++k) CHECK_THAT(a(k), WithinAbs(b(k), 1e-9 * p.E_J()));
  CHECK_THROWS_AS(fock::atom_hamiltonian(ops, p, fock::AtomModel::quartic, fock::AtomAssembly::charge_flux),
                  ConfigError);
}

TEST_CASE("quartic vacuum element", "[fock]") {
  const CircuitParams p;
  const auto d = derive_linear(p);
  const auto ops = fock::build_operators(d, 8);
  const auto h = fock::atom_hamiltonian(ops, p, fock::AtomModel::quartic);
  const double k4 = std::pow(phase_per_flux * std::sqrt(hbar * d.Z_a / 2), 4);
  // <0|(b + b^dag)^4|0> = 3.
  CHECK_THAT(h(0, 0), WithinRel(hbar * d.omega_a / 2 + p.E_J() + p.E_J() / 24 * 3 * k4, 1e-13));
}

TEST_CASE("atom anharmonicity is about 3 percent", "[fock]") {
  const CircuitParams p;
  const auto s = fock::atom_spectrum(fock::atom_hamiltonian(fock::build_operators(derive_linear(p), 60), p));
  const double w01 = s.energies(1) - s.energies(0);
  const double w12 = s.energies(2) - s.energies(1);
  const double a = std::abs(w12 - w01) / w01;
  CHECK(a > 0.02);
  CHECK(a < 0.04);
  CHECK(w12 > w01);  // the junction term stiffens this atom
}

TEST_CASE("driven harmonic atom: displaced ground state", "[fock]") {
  const CircuitParams p;
  const auto d = derive_linear(p);
  const auto ops = fock::build_operators(d, 60);
  const double k_atom = 1 / p.L_g - 1 / p.L_J;
  const double phi = 0.01 * flux_quantum;
  const double f = phi / p.L_g;
  const auto h = fock::effective_hamiltonian(ops, p, phi, fock::AtomModel::harmonic);
  const auto s = fock::atom_spectrum(h);
  // Classical linear response: <psi> = f / k, shift -f^2/(2k).
  CHECK_THAT(s.energies(0), WithinRel(hbar * d.omega_a / 2 + p.E_J() - f * f / (2 * k_atom), 1e-10));
  CHECK_THAT(fock::thermal_expectation(s, ops.psi_op, 0.0), WithinRel(f / k_atom, 1e-10));
}

TEST_CASE("thermal occupation of the harmonic atom", "[fock]") {
  const CircuitParams p;
  const auto d = derive_linear(p);
  const auto ops = fock::build_operators(d, 60);
  const auto h = fock::atom_hamiltonian(ops, p, fock::AtomModel::harmonic);
  const double T = units::kelvin_from_GHz(20.0);
  const double x = hbar * d.omega_a / (boltzmann * T);
  CHECK_THAT(fock::thermal_expectation(h, ops.number_op, T), WithinRel(1 / std::expm1(x), 1e-10));
  // Free energy of an oscillator: hbar w/2 + kT ln(1 - e^{-x}).
  const Eigen::VectorXd e = fock::atom_spectrum(h).energies;
  CHECK_THAT(fock::partition_free_energy(e, T),
             WithinRel(p.E_J() + hbar * d.omega_a / 2 + boltzmann * T * std::log(-std::expm1(-x)), 1e-12));
}

TEST_CASE("Boltzmann weights", "[fock]") {
  Eigen::VectorXd e(4);
  e << 1.0, 1.0, 2.0, 3.0;
  const auto w0 = fock::boltzmann_weights(e, 0.0);
  CHECK(w0(0) == 0.5);
  CHECK(w0(1) == 0.5);
  CHECK(w0(2) == 0.0);
  Eigen::VectorXd two(2);
  two << 0.0, boltzmann * 1.0;
  const auto w = fock::boltzmann_weights(two, 1.0);
  CHECK_THAT(w(1) / w(0), WithinRel(std::exp(-1.0), 1e-14));
  CHECK_THAT(w.sum(), WithinRel(1.0, 1e-15));
  CHECK_THROWS_AS(fock::boltzmann_weights(e, -1.0), ConfigError);
  CHECK_THROWS_AS(fock::partition_free_energy(e, 0.0), ConfigError);
}

TEST_CASE("zero-point energy of the bare atom", "[fock]") {
  const CircuitParams p;
  const auto d = derive_linear(p);
  const double eps = fock::atomic_zero_point_energy(p);
  // First-order perturbation from the harmonic level is an upper bound (variational).
  const double k = phase_per_flux * phase_per_flux * hbar * d.Z_a / 2;
  const double E_J = p.E_J();
  const double variational = hbar * d.omega_a / 2 + E_J * (std::exp(-k / 2) + k / 2);
  CHECK(eps <= variational);
  CHECK(eps > hbar * d.omega_a / 2 + E_J);
  CHECK_THAT(eps, WithinRel(variational, 1e-3));
}
