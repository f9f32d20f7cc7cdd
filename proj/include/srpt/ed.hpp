#pragma once

// Exact diagonalization of one resonator mode coupled to N junction atoms,
//
//   H = hbar omega_c (a^dag a + 1/2) + sum_j H_atom,j - (hbar g/sqrt(N)) (a + a^dag) sum_j (b_j + b_j^dag),
//
// in a Fock basis with a per-mode and a total boson cutoff. Every term changes
// the total boson number by an even amount, so even and odd sectors are solved
// separately.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srpt/circuit.hpp"
#include "srpt/fock.hpp"
#include "srpt/lanczos.hpp"
#include "srpt/units.hpp"

namespace srpt::ed {

enum class Parity { even = 0, odd = 1 };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct EdConfig {
  int N = 1;
  int per_mode_cutoff = 24;
  int total_cutoff = 48;
  Parity parity = Parity::even;
  int n_eigenvalues = 2;
  bool quartic = true;  // false: full-cosine atoms (meant for N <= 2)
  bool coupling = true;
  std::size_t max_dimension = 5'000'000;

  void validate() const {
    if (N < 1) throw ConfigError("ED needs at least one atom");
    if (per_mode_cutoff < 0 || total_cutoff < 0) throw ConfigError("boson cutoffs must be non-negative");
    if (per_mode_cutoff > total_cutoff) throw ConfigError("per-mode cutoff must not exceed the total cutoff");
    if (per_mode_cutoff > 254) throw ConfigError("per-mode cutoff above 254 is not supported");
    if (n_eigenvalues < 1) throw ConfigError("at least one eigenvalue must be requested");
    const double digits = (N + 1) * std::log2(per_mode_cutoff + 1.0);
    if (digits >= 63.0) throw ConfigError("too many modes for the basis key");
  }
};

/// Number of occupation vectors with `modes` entries in [0, per_mode], sum <= total
/// and sum parity `parity` (-1 = either).
inline std::uint64_t count_states(int modes, int per_mode, int total, int parity = -1) {
  // ways[s] = number of vectors of the modes seen so far with sum s.
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  for (int m = 0; m < modes; ++m) {
    std::vector<std::uint64_t> next(total + 1, 0);
    for (int s = 0; s <= total; ++s)
      if (ways[s])
        for (int n = 0; n <= per_mode && s + n <= total; ++n) next[s + n] += ways[s];
    ways.swap(next);
  }
  std::uint64_t c = 0;
  for (int s = 0; s <= total; ++s)
    if (parity < 0 || s % 2 == parity) c += ways[s];
  return c;
}

/// Occupation vectors (n_photon, n_1, ..., n_N) of one parity sector in
/// lexicographic order. The key reads the vector as digits in base
/// per_mode + 1 with the photon most significant, so keys are sorted too.
class BasisIndex {
 public:
  BasisIndex() = default;
  BasisIndex(int modes, int per_mode, int total, Parity parity)
      : modes_(modes), per_mode_(per_mode), total_(total), parity_(parity) {}

  std::size_t size() const { return keys_.size(); }
  int modes() const { return modes_; }
  int per_mode_cutoff() const { return per_mode_; }
  int total_cutoff() const { return total_; }
  Parity parity() const { return parity_; }

  std::span<const std::uint8_t> state(std::size_t i) const {
    return {occupations_.data() + i * static_cast<std::size_t>(modes_), static_cast<std::size_t>(modes_)};
  }

  std::uint64_t key(std::span<const std::uint8_t> occ) const {
    std::uint64_t k = 0;
    for (std::uint8_t n : occ) k = k * static_cast<std::uint64_t>(per_mode_ + 1) + n;
    return k;
  }

  /// Index of an occupation vector, or -1 when it is outside the sector.
  std::int64_t index_of(std::span<const std::uint8_t> occ) const {
    if (static_cast<int>(occ.size()) != modes_) return -1;
    int sum = 0;
    for (std::uint8_t n : occ) {
      if (n > per_mode_) return -1;
      sum += n;
    }
    if (sum > total_ || sum % 2 != static_cast<int>(parity_)) return -1;
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key(occ));
    if (it == keys_.end() || *it != key(occ)) return -1;
    return it - keys_.begin();
  }

  void push_back(std::span<const std::uint8_t> occ) {
    occupations_.insert(occupations_.end(), occ.begin(), occ.end());
    keys_.push_back(key(occ));
  }

  void reserve(std::size_t n) {
    keys_.reserve(n);
    occupations_.reserve(n * static_cast<std::size_t>(modes_));
  }

 private:
  int modes_ = 0;
  int per_mode_ = 0;
  int total_ = 0;
  Parity parity_ = Parity::even;
  std::vector<std::uint8_t> occupations_;
  std::vector<std::uint64_t> keys_;
};

inline BasisIndex build_basis(const EdConfig& cfg) {
  cfg.validate();
  const int modes = cfg.N + 1;
  const std::uint64_t dim = count_states(modes, cfg.per_mode_cutoff, cfg.total_cutoff, static_cast<int>(cfg.parity));
  if (dim > cfg.max_dimension)
    throw ConfigError("sector dimension " + std::to_string(dim) + " exceeds the limit of " +
                      std::to_string(cfg.max_dimension) + "; lower the cutoffs or raise the limit");
  BasisIndex basis(modes, cfg.per_mode_cutoff, cfg.total_cutoff, cfg.parity);
  basis.reserve(dim);
  std::vector<std::uint8_t> occ(modes, 0);
  // Depth-first enumeration in lexicographic order.
  auto recurse = [&](auto&& self, int mode, int sum) -> void {
    if (mode == modes) {
      if (sum % 2 == static_cast<int>(cfg.parity)) basis.push_back(occ);
      return;
    }
    for (int n = 0; n <= cfg.per_mode_cutoff && sum + n <= cfg.total_cutoff; ++n) {
      occ[mode] = static_cast<std::uint8_t>(n);
      self(self, mode + 1, sum + n);
    }
    occ[mode] = 0;
  };
  recurse(recurse, 0, 0);
  return basis;
}

/// Single-atom block on Fock states 0..per_mode_cutoff. The full cosine is
/// evaluated with a padded spectral dimension so that matrix elements near the
/// cutoff are those of the untruncated operator.
inline Eigen::MatrixXd atom_block(const CircuitParams& p, int per_mode_cutoff, bool quartic) {
  const int M = per_mode_cutoff + 1;
  const int spectral = quartic ? M : std::max(2 * M, fock::default_dimension);
  const auto ops = fock::build_operators(derive_linear(p), M, spectral);
  return fock::atom_hamiltonian(ops, p, quartic ? fock::AtomModel::quartic : fock::AtomModel::full_cosine);
}

/// Assembles one parity sector. Connections leaving the cutoffs are dropped;
/// a matrix element that would couple to the other parity is a logic error.
inline lanczos::SparseMatrix build_hamiltonian(const EdConfig& cfg, const BasisIndex& basis, const CircuitParams& p,
                                               const DerivedLinear& d, const Eigen::MatrixXd& atom) {
  cfg.validate();
  if (basis.modes() != cfg.N + 1 || basis.per_mode_cutoff() != cfg.per_mode_cutoff ||
      basis.total_cutoff() != cfg.total_cutoff)
    throw ConfigError("basis does not match the ED configuration");
  if (atom.rows() != cfg.per_mode_cutoff + 1 || atom.cols() != atom.rows())
    throw ConfigError("atom block dimension must be per_mode_cutoff + 1");
  (void)p;

  const int modes = basis.modes();
  const int cutoff = cfg.per_mode_cutoff;
  const double photon = hbar * d.omega_c;
  const double coupling = cfg.coupling ? hbar * d.g / std::sqrt(static_cast<double>(cfg.N)) : 0.0;
  const int parity = static_cast<int>(basis.parity());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(basis.size() * static_cast<std::size_t>(1 + 4 * cfg.N + (cutoff / 2) * cfg.N));
  std::vector<std::uint8_t> occ(modes);

  auto connect = [&](std::size_t row, double value) {
    int sum = 0;
    for (std::uint8_t n : occ) sum += n;
    if (sum % 2 != parity) throw std::logic_error("Hamiltonian element connects different parity sectors");
    const std::int64_t col = basis.index_of(occ);
    if (col >= 0) triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
  };

  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    std::copy(s.begin(), s.end(), occ.begin());
    int sum = 0;
    for (std::uint8_t n : occ) sum += n;

    double diag = photon * (occ[0] + 0.5);
    for (int j = 1; j < modes; ++j) diag += atom(occ[j], occ[j]);
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);

    // Atom-internal hops.
    for (int j = 1; j < modes; ++j) {
      const int n = occ[j];
      for (int m = 0; m <= cutoff; ++m) {
        if (m == n || atom(n, m) == 0.0) continue;
        if (sum - n + m > cfg.total_cutoff) continue;
        occ[j] = static_cast<std::uint8_t>(m);
        connect(i, atom(n, m));
        occ[j] = static_cast<std::uint8_t>(n);
      }
    }

    // (a + a^dag)(b_j + b_j^dag)
    if (coupling == 0.0) continue;
    const int np = occ[0];
    for (int dp : {-1, 1}) {
      const int np2 = np + dp;
      if (np2 < 0 || np2 > cutoff) continue;
      const double fp = std::sqrt(static_cast<double>(std::max(np, np2)));
      for (int j = 1; j < modes; ++j) {
        const int nb = occ[j];
        for (int db : {-1, 1}) {
          const int nb2 = nb + db;
          if (nb2 < 0 || nb2 > cutoff || sum + dp + db > cfg.total_cutoff) continue;
          const double fb = std::sqrt(static_cast<double>(std::max(nb, nb2)));
          occ[0] = static_cast<std::uint8_t>(np2);
          occ[j] = static_cast<std::uint8_t>(nb2);
          connect(i, -coupling * fp * fb);
          occ[0] = static_cast<std::uint8_t>(np);
          occ[j] = static_cast<std::uint8_t>(nb);
        }
      }
    }
  }
  lanczos::SparseMatrix h(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size()));
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

inline lanczos::SparseMatrix build_hamiltonian(const EdConfig& cfg, const BasisIndex& basis, const CircuitParams& p) {
  return build_hamiltonian(cfg, basis, p, derive_linear(p), atom_block(p, cfg.per_mode_cutoff, cfg.quartic));
}

/// Matrix Market coordinate export of the full (both triangles) matrix.
inline void write_matrix_market(const lanczos::SparseMatrix& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << h.rows() << ' ' << h.cols() << ' ' << h.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < h.outerSize(); ++r)
    for (lanczos::SparseMatrix::InnerIterator it(h, r); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

struct SectorSolution {
  Parity parity = Parity::even;
  std::size_t dimension = 0;
  lanczos::Eigenpairs pairs;
};

struct EdResult {
  int N = 0;
  double L_R0 = 0.0;
  Eigen::VectorXd even_eigenvalues;
  Eigen::VectorXd odd_eigenvalues;
  std::size_t even_dimension = 0;
  std::size_t odd_dimension = 0;
  double ground_energy = 0.0;
  double photon_number_per_atom = 0.0;
  double transition_even = 0.0;
  double transition_odd = 0.0;
  double delta_eps = 0.0;
  double epsilon_a0 = 0.0;
  bool ground_in_odd_sector = false;  // E_even,0 > E_odd,0
};

inline SectorSolution solve_sector(const EdConfig& cfg, const CircuitParams& p, const DerivedLinear& d,
                                   const Eigen::MatrixXd& atom, const lanczos::Options& opt,
                                   BasisIndex* basis_out = nullptr) {
  BasisIndex basis = build_basis(cfg);
  const auto h = build_hamiltonian(cfg, basis, p, d, atom);
  SectorSolution s;
  s.parity = cfg.parity;
  s.dimension = basis.size();
  const int k = static_cast<int>(std::min<std::size_t>(cfg.n_eigenvalues, basis.size()));
  if (static_cast<std::size_t>(k) == basis.size() && basis.size() <= 64) {
    // Tiny sectors: a dense solve is exact and cheaper than any Krylov method.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
    s.pairs.values = es.eigenvalues().head(k);
    s.pairs.vectors = es.eigenvectors().leftCols(k);
    s.pairs.residuals.assign(k, 0.0);
    s.pairs.scale = lanczos::operator_scale(h);
  } else {
    s.pairs = lanczos::lowest_eigenpairs(h, k, opt);
  }
  if (basis_out) *basis_out = std::move(basis);
  return s;
}

/// <v| a^dag a |v> for a vector in the given basis.
inline double photon_number(const BasisIndex& basis, const Eigen::VectorXd& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) acc += v(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(i)) * basis.state(i)[0];
  return acc / v.squaredNorm();
}

/// Finite-N observables from the even (>= 2 levels) and odd (>= 1 level)
/// sectors. The ground state is taken from the even sector; a lower odd level
/// is reported through ground_in_odd_sector rather than hidden.
inline EdResult observables(const EdConfig& cfg, const CircuitParams& p, const BasisIndex& even_basis,
                            const SectorSolution& even, const SectorSolution& odd, double epsilon_a0) {
  if (even.pairs.values.size() < 2 || odd.pairs.values.size() < 1)
    throw ConfigError("observables need two even and one odd eigenvalue");
  const DerivedLinear d = derive_linear(p);
  EdResult r;
  r.N = cfg.N;
  r.L_R0 = p.L_R0;
  r.even_eigenvalues = even.pairs.values;
  r.odd_eigenvalues = odd.pairs.values;
  r.even_dimension = even.dimension;
  r.odd_dimension = odd.dimension;
  r.ground_energy = even.pairs.values(0);
  r.ground_in_odd_sector = odd.pairs.values(0) < even.pairs.values(0);
  r.photon_number_per_atom = photon_number(even_basis, even.pairs.vectors.col(0)) / cfg.N;
  r.transition_even = even.pairs.values(1) - r.ground_energy;
  r.transition_odd = odd.pairs.values(0) - r.ground_energy;
  r.epsilon_a0 = epsilon_a0;
  r.delta_eps = (r.ground_energy - 0.5 * hbar * d.omega_c) / cfg.N - epsilon_a0;
  return r;
}

struct Settings {
  int N = 1;
  int per_mode_cutoff = 24;
  int total_cutoff = 48;
  bool quartic = true;
  bool coupling = true;
  int n_even = 2;
  int n_odd = 1;
  std::size_t max_dimension = 5'000'000;
  lanczos::Options lanczos;
};

inline EdConfig sector_config(const Settings& s, Parity parity) {
  EdConfig c;
  c.N = s.N;
  c.per_mode_cutoff = s.per_mode_cutoff;
  c.total_cutoff = s.total_cutoff;
  c.parity = parity;
  c.n_eigenvalues = parity == Parity::even ? s.n_even : s.n_odd;
  c.quartic = s.quartic;
  c.coupling = s.coupling;
  c.max_dimension = s.max_dimension;
  return c;
}

/// Both sectors at one circuit point. epsilon_a0 defaults to the full-cosine
/// single-atom ground energy at the default Fock dimension.
inline EdResult solve_point(const CircuitParams& params, const Settings& s,
                            double epsilon_a0 = std::numeric_limits<double>::quiet_NaN()) {
  CircuitParams p = params;
  p.N = s.N;
  const DerivedLinear d = derive_linear(p);
  const Eigen::MatrixXd atom = atom_block(p, s.per_mode_cutoff, s.quartic);
  if (std::isnan(epsilon_a0)) epsilon_a0 = fock::atomic_zero_point_energy(p);
  const EdConfig even_cfg = sector_config(s, Parity::even);
  const EdConfig odd_cfg = sector_config(s, Parity::odd);
  BasisIndex even_basis;
  const auto even = solve_sector(even_cfg, p, d, atom, s.lanczos, &even_basis);
  const auto odd = solve_sector(odd_cfg, p, d, atom, s.lanczos);
  return observables(even_cfg, p, even_basis, even, odd, epsilon_a0);
}

struct TruncationStudy {
  int per_mode_cutoff = 0;
  std::vector<double> transitions_cosine;  // E_k - E_0, k = 1..8, joule
  std::vector<double> transitions_quartic;
  std::vector<double> relative_difference;
  double max_relative_difference = 0.0;
};

/// Lowest transitions of the single-atom Hamiltonian with the full cosine and
/// with its quartic truncation, both on Fock states 0..per_mode_cutoff.
inline TruncationStudy atomic_truncation_study(const CircuitParams& p, int per_mode_cutoff, int transitions = 8) {
  if (transitions < 1 || transitions > per_mode_cutoff)
    throw ConfigError("transition count must be between 1 and the per-mode cutoff");
  const auto cosine = fock::atom_spectrum(atom_block(p, per_mode_cutoff, false)).energies;
  const auto quartic = fock::atom_spectrum(atom_block(p, per_mode_cutoff, true)).energies;
  TruncationStudy t;
  t.per_mode_cutoff = per_mode_cutoff;
  for (int k = 1; k <= transitions; ++k) {
    const double c = cosine(k) - cosine(0);
    const double q = quartic(k) - quartic(0);
    t.transitions_cosine.push_back(c);
    t.transitions_quartic.push_back(q);
    t.relative_difference.push_back(std::abs(q - c) / c);
    t.max_relative_difference = std::max(t.max_relative_difference, t.relative_difference.back());
  }
  return t;
}

struct DipComparison {
  double L_R0_cosine = 0.0;
  double L_R0_quartic = 0.0;
  double min_cosine = 0.0;  // lowest even transition over the scan, joule
  double min_quartic = 0.0;
  double relative_depth_difference = 0.0;
  double relative_location_shift = 0.0;
};

/// Location and depth of the even-transition dip for quartic and full-cosine
/// atoms over an L_R0 grid (grid minimum, no interpolation).
inline DipComparison dip_comparison(const CircuitParams& p, Settings s, const std::vector<double>& lr0_axis) {
  if (lr0_axis.empty()) throw ConfigError("dip comparison needs a non-empty L_R0 axis");
  DipComparison c;
  c.min_cosine = c.min_quartic = std::numeric_limits<double>::infinity();
  const double eps = fock::atomic_zero_point_energy(p);
  for (double L : lr0_axis) {
    for (bool quartic : {false, true}) {
      s.quartic = quartic;
      const double t = solve_point(p.with_L_R0(L), s, eps).transition_even;
      double& best = quartic ? c.min_quartic : c.min_cosine;
      if (t < best) {
        best = t;
        (quartic ? c.L_R0_quartic : c.L_R0_cosine) = L;
      }
    }
  }
  c.relative_depth_difference = std::abs(c.min_quartic - c.min_cosine) / c.min_cosine;
  c.relative_location_shift = std::abs(c.L_R0_quartic - c.L_R0_cosine) / c.L_R0_cosine;
  return c;
}

}  // namespace srpt::ed
