#pragma once

// Single artificial atom in a truncated Fock basis. The ladder operators are
// scaled with the linearized impedance Z_a, so the harmonic part of the atom is
// diagonal and only the junction nonlinearity needs a matrix function.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "srpt/circuit.hpp"
#include "srpt/units.hpp"

namespace srpt::fock {

/// How the junction term E_J cos(2 pi psi/Phi0) enters the atom.
enum class AtomModel {
  full_cosine,  // exact cosine through spectral calculus
  quartic,      // E_J [1 - x^2/2 + x^4/24]; the -x^2/2 part is absorbed in omega_a
  harmonic,     // E_J [1 - x^2/2]
};

/// Two algebraically identical ways to write the atom with the full cosine.
enum class AtomAssembly {
  number_basis,  // hbar omega_a (n + 1/2) + E_J [cos x + x^2/2], projected x^2
  charge_flux,   // rho^2/(2 C_J) + psi^2/(2 L_g) + E_J cos x from truncated products
};

inline constexpr int default_dimension = 60;

/// Operator matrices on Fock states |0>..|M-1>. rho is purely imaginary, so
/// only its imaginary part is stored: rho = i * rho_imag.
struct FockOperatorSet {
  int M = 0;
  int spectral_dim = 0;
  double Z_a = 0.0;
  Eigen::MatrixXd psi_op;
  Eigen::MatrixXd rho_imag;
  Eigen::MatrixXd number_op;
  Eigen::MatrixXd cos_op;
  Eigen::MatrixXd sin_op;
  Eigen::MatrixXd psi2_op;  // projection of the exact psi^2
  Eigen::MatrixXd psi4_op;  // projection of the exact psi^4
};

namespace detail {

/// Zeroes entries whose row+col parity differs from `parity` (0 = even operator).
inline void enforce_parity(Eigen::MatrixXd& a, int parity) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (((i + j) & 1) != parity) a(i, j) = 0.0;
}

inline void symmetrize(Eigen::MatrixXd& a) { a = 0.5 * (a + a.transpose()).eval(); }

}  // namespace detail

/// Builds psi, rho, n, cos(2 pi psi/Phi0), sin(...), psi^2 and psi^4 on M Fock
/// states. cos and sin come from diagonalizing the tridiagonal psi matrix of
/// size spectral_dim (default M) and keeping the leading M x M block.
inline FockOperatorSet build_operators(const DerivedLinear& d, int M, int spectral_dim = 0) {
  if (M < 1) throw ConfigError("Fock dimension must be at least 1");
  if (spectral_dim == 0) spectral_dim = M;
  if (spectral_dim < M) throw ConfigError("spectral dimension must not be smaller than M");

  FockOperatorSet ops;
  ops.M = M;
  ops.spectral_dim = spectral_dim;
  ops.Z_a = d.Z_a;

  const double s = std::sqrt(hbar * d.Z_a / 2.0);
  const double r = std::sqrt(hbar / (2.0 * d.Z_a));

  ops.psi_op = Eigen::MatrixXd::Zero(M, M);
  ops.rho_imag = Eigen::MatrixXd::Zero(M, M);
  ops.number_op = Eigen::MatrixXd::Zero(M, M);
  ops.psi2_op = Eigen::MatrixXd::Zero(M, M);
  ops.psi4_op = Eigen::MatrixXd::Zero(M, M);
  const double s2 = s * s;
  const double s4 = s2 * s2;
  for (int n = 0; n < M; ++n) {
    const double dn = n;
    ops.number_op(n, n) = dn;
    ops.psi2_op(n, n) = s2 * (2.0 * dn + 1.0);
    ops.psi4_op(n, n) = s4 * (6.0 * dn * dn + 6.0 * dn + 3.0);
    if (n + 1 < M) {
      const double up = std::sqrt(dn + 1.0);
      ops.psi_op(n, n + 1) = ops.psi_op(n + 1, n) = s * up;
      // rho = i r (b^dag - b)
      ops.rho_imag(n + 1, n) = r * up;
      ops.rho_imag(n, n + 1) = -r * up;
    }
    if (n + 2 < M) {
      const double v = std::sqrt((dn + 1.0) * (dn + 2.0));
      ops.psi2_op(n, n + 2) = ops.psi2_op(n + 2, n) = s2 * v;
      ops.psi4_op(n, n + 2) = ops.psi4_op(n + 2, n) = s4 * (4.0 * dn + 6.0) * v;
    }
    if (n + 4 < M) {
      const double v = std::sqrt((dn + 1.0) * (dn + 2.0) * (dn + 3.0) * (dn + 4.0));
      ops.psi4_op(n, n + 4) = ops.psi4_op(n + 4, n) = s4 * v;
    }
  }

  if (spectral_dim == 1) {
    ops.cos_op = Eigen::MatrixXd::Ones(1, 1);
    ops.sin_op = Eigen::MatrixXd::Zero(1, 1);
    return ops;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(spectral_dim);
  Eigen::VectorXd sub(spectral_dim - 1);
  for (int n = 0; n + 1 < spectral_dim; ++n) sub(n) = s * std::sqrt(n + 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::ArrayXd phase = phase_per_flux * es.eigenvalues().array();
  const Eigen::MatrixXd top = v.topRows(M);
  ops.cos_op = top * phase.cos().matrix().asDiagonal() * top.transpose();
  ops.sin_op = top * phase.sin().matrix().asDiagonal() * top.transpose();
  detail::symmetrize(ops.cos_op);
  detail::symmetrize(ops.sin_op);
  detail::enforce_parity(ops.cos_op, 0);
  detail::enforce_parity(ops.sin_op, 1);
  return ops;
}

namespace detail {

inline void check_same_atom(const FockOperatorSet& ops, const CircuitParams& p) {
  const DerivedLinear d = derive_linear(p);
  if (std::abs(d.Z_a - ops.Z_a) > 1e-12 * d.Z_a)
    throw ConfigError("operator set was built for a different atom impedance");
}

}  // namespace detail

/// Atom Hamiltonian rho^2/(2 C_J) + psi^2/(2 L_g) + E_J cos(2 pi psi/Phi0),
/// or one of its polynomial truncations.
inline Eigen::MatrixXd atom_hamiltonian(const FockOperatorSet& ops, const CircuitParams& p,
                                        AtomModel model = AtomModel::full_cosine,
                                        AtomAssembly assembly = AtomAssembly::number_basis) {
  detail::check_same_atom(ops, p);
  const double E_J = p.E_J();
  const int M = ops.M;
  if (assembly == AtomAssembly::charge_flux) {
    if (model != AtomModel::full_cosine)
      throw ConfigError("charge-flux assembly is only defined for the full cosine");
    Eigen::MatrixXd h = -(ops.rho_imag * ops.rho_imag) / (2.0 * p.C_J) +
                        (ops.psi_op * ops.psi_op) / (2.0 * p.L_g) + E_J * ops.cos_op;
    detail::symmetrize(h);
    return h;
  }
  const double omega_a = std::sqrt((1.0 / p.L_g - 1.0 / p.L_J) / p.C_J);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(M, M);
  for (int n = 0; n < M; ++n) h(n, n) = hbar * omega_a * (n + 0.5);
  const double c2 = phase_per_flux * phase_per_flux;
  switch (model) {
    case AtomModel::full_cosine:
      h += E_J * (ops.cos_op + 0.5 * c2 * ops.psi2_op);
      break;
    case AtomModel::quartic:
      h += E_J * (Eigen::MatrixXd::Identity(M, M) + (c2 * c2 / 24.0) * ops.psi4_op);
      break;
    case AtomModel::harmonic:
      h += E_J * Eigen::MatrixXd::Identity(M, M);
      break;
  }
  return h;
}

/// H_eff(phi) = -(phi/L_g) psi + H_atom.
inline Eigen::MatrixXd effective_hamiltonian(const Eigen::MatrixXd& h_atom, const FockOperatorSet& ops,
                                             double L_g, double phi) {
  if (h_atom.rows() != ops.M || h_atom.cols() != ops.M)
    throw ConfigError("atom Hamiltonian and operator set dimensions differ");
  return h_atom - (phi / L_g) * ops.psi_op;
}

inline Eigen::MatrixXd effective_hamiltonian(const FockOperatorSet& ops, const CircuitParams& p, double phi,
                                             AtomModel model = AtomModel::full_cosine) {
  return effective_hamiltonian(atom_hamiltonian(ops, p, model), ops, p.L_g, phi);
}

struct AtomSpectrum {
  Eigen::VectorXd energies;      // ascending
  Eigen::MatrixXd wavefunctions;  // columns, Fock basis
  double epsilon_a0 = 0.0;
};

inline AtomSpectrum atom_spectrum(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw ConfigError("Hamiltonian must be square and non-empty");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw ConvergenceError("atom eigensolver failed");
  AtomSpectrum s;
  s.energies = es.eigenvalues();
  s.wavefunctions = es.eigenvectors();
  s.epsilon_a0 = s.energies(0);
  return s;
}

/// Ground (zero-point) energy of the bare atom with the full cosine, at the
/// default truncation.
inline double atomic_zero_point_energy(const CircuitParams& p, int M = default_dimension) {
  const auto ops = build_operators(derive_linear(p), M);
  return atom_spectrum(atom_hamiltonian(ops, p)).epsilon_a0;
}

/// Normalized Boltzmann weights over the spectrum. At T = 0 the weight is
/// spread evenly over the (possibly degenerate) ground manifold.
inline Eigen::VectorXd boltzmann_weights(const Eigen::VectorXd& energies, double T) {
  if (T < 0.0 || std::isnan(T)) throw ConfigError("temperature must be non-negative");
  const Eigen::Index n = energies.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  const double e0 = energies(0);
  if (T == 0.0) {
    const double span = energies(n - 1) - e0;
    const double tol = 1e-12 * std::max(std::abs(e0), span);
    for (Eigen::Index k = 0; k < n && energies(k) - e0 <= tol; ++k) w(k) = 1.0;
  } else {
    const double kT = boltzmann * T;
    for (Eigen::Index k = 0; k < n; ++k) w(k) = std::exp(-(energies(k) - e0) / kT);
  }
  return w / w.sum();
}

/// Tr[A e^{-H/kT}] / Tr[e^{-H/kT}] evaluated from a precomputed spectrum.
inline double thermal_expectation(const AtomSpectrum& s, const Eigen::MatrixXd& a, double T) {
  const Eigen::VectorXd w = boltzmann_weights(s.energies, T);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) == 0.0) continue;
    const auto v = s.wavefunctions.col(k);
    acc += w(k) * v.dot(a * v);
  }
  return acc;
}

inline double thermal_expectation(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a, double T) {
  if (a.rows() != h.rows() || a.cols() != h.cols()) throw ConfigError("operator dimensions differ");
  return thermal_expectation(atom_spectrum(h), a, T);
}

/// -kT ln Tr e^{-H/kT}, shifted by the ground energy before exponentiating.
inline double partition_free_energy(const Eigen::VectorXd& energies, double T) {
  if (!(T > 0.0)) throw ConfigError("free energy needs T > 0; use the ground energy at T = 0");
  const double kT = boltzmann * T;
  const double e0 = energies(0);
  double z = 0.0;
  for (Eigen::Index k = 0; k < energies.size(); ++k) z += std::exp(-(energies(k) - e0) / kT);
  return e0 - kT * std::log(z);
}

inline double atom_partition_free_energy(const FockOperatorSet& ops, const CircuitParams& p, double phi,
                                         double T, AtomModel model = AtomModel::full_cosine) {
  const Eigen::MatrixXd h = effective_hamiltonian(ops, p, phi, model);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return partition_free_energy(es.eigenvalues(), T);
}

}  // namespace srpt::fock
