// Copyright 2026 The tcrab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TCRAB_PAULI_HPP_
#define TCRAB_PAULI_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tcrab/core.hpp"

namespace tcrab {

inline constexpr int kMaxPauliQubits = 32;
/// Default cap for dense materialization of Pauli strings.
inline constexpr int kDenseQubitCap = 6;
/// Cap for exhaustive enumeration of the 4^n Pauli basis.
inline constexpr int kEnumerationQubitCap = 8;

/*
 * N-qubit Pauli operator in symplectic form.
 *
 * The value represented is i^phase * P_1 (x) ... (x) P_n where each P_q is one of the
 * Hermitian matrices I, X, Y, Z, selected by bit q of (x_bits, z_bits):
 * (0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y. Qubit 0 is the leftmost tensor factor, i.e. the
 * most significant bit of a computational-basis index.
 */
class PauliString {
 public:
  PauliString() = default;

  PauliString(int n_qubits, std::uint32_t x_bits, std::uint32_t z_bits, int phase = 0)
      : n_(n_qubits), x_(x_bits), z_(z_bits), phase_(((phase % 4) + 4) % 4) {
    if (n_qubits < 1 || n_qubits > kMaxPauliQubits)
      throw DimensionError("PauliString: qubit count out of range");
    const std::uint32_t mask = n_qubits == 32 ? ~0u : ((1u << n_qubits) - 1u);
    if ((x_bits & ~mask) || (z_bits & ~mask))
      throw DimensionError("PauliString: bits set beyond qubit count");
  }

  static PauliString identity(int n_qubits) { return {n_qubits, 0, 0}; }

  /// Single-qubit factor `label` (one of IXYZ) on `qubit`, identity elsewhere.
  static PauliString single(int n_qubits, int qubit, char label) {
    if (qubit < 0 || qubit >= n_qubits) throw DimensionError("PauliString::single: qubit out of range");
    std::string s(static_cast<std::size_t>(n_qubits), 'I');
    s[static_cast<std::size_t>(qubit)] = label;
    return parse(s);
  }

  /// Parses labels like "XIZY", "-iZZ" or "+XX". Qubit 0 is the leftmost letter.
  static PauliString parse(std::string_view text) {
    int phase = 0;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      phase = text.front() == '-' ? 2 : 0;
      text.remove_prefix(1);
      if (!text.empty() && text.front() == 'i') {
        phase += 1;
        text.remove_prefix(1);
      }
    }
    if (text.empty()) throw ValidationError("PauliString::parse: empty label");
    const int n = static_cast<int>(text.size());
    if (n > kMaxPauliQubits) throw DimensionError("PauliString::parse: too many qubits");
    std::uint32_t x = 0, z = 0;
    for (int q = 0; q < n; ++q) {
      const std::uint32_t bit = 1u << q;
      switch (text[static_cast<std::size_t>(q)]) {
        case 'I': break;
        case 'X': x |= bit; break;
        case 'Z': z |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        default:
          throw ValidationError("PauliString::parse: invalid character in '" + std::string(text) + "'");
      }
    }
    return {n, x, z, phase};
  }

  /// Inverse of index(): canonical position in the 4^n basis.
  static PauliString from_index(int n_qubits, std::uint64_t index) {
    const std::uint32_t mask = (1u << n_qubits) - 1u;
    return {n_qubits, static_cast<std::uint32_t>(index & mask),
            static_cast<std::uint32_t>((index >> n_qubits) & mask)};
  }

  int n_qubits() const { return n_; }
  std::uint32_t x_bits() const { return x_; }
  std::uint32_t z_bits() const { return z_; }
  /// Exponent k of the prefactor i^k.
  int phase() const { return phase_; }

  /// Canonical basis position: lexicographic over (z_bits, x_bits), identity first.
  std::uint64_t index() const { return (static_cast<std::uint64_t>(z_) << n_) | x_; }

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const { return std::popcount(x_ | z_); }
  /// Number of qubits carrying X or Y.
  int x_weight() const { return std::popcount(x_); }

  PauliString stripped() const { return {n_, x_, z_, 0}; }

  char label_at(int qubit) const {
    const bool xb = (x_ >> qubit) & 1u, zb = (z_ >> qubit) & 1u;
    return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }

  std::string label() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(n_));
    for (int q = 0; q < n_; ++q) s.push_back(label_at(q));
    return s;
  }

  std::string to_string() const {
    static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
    return std::string(kPrefix[phase_]) + label();
  }

  /// Product with exact phase tracking.
  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) throw DimensionError("PauliString product: qubit count mismatch");
    const std::uint32_t x = a.x_ ^ b.x_, z = a.z_ ^ b.z_;
    // Y = i X Z; X^x1 Z^z1 X^x2 Z^z2 = (-1)^{z1.x2} X^x Z^z.
    const int k = a.phase_ + b.phase_ + std::popcount(a.x_ & a.z_) + std::popcount(b.x_ & b.z_) +
                  2 * std::popcount(a.z_ & b.x_) - std::popcount(x & z);
    return {a.n_, x, z, ((k % 4) + 4) % 4};
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_ && a.phase_ == b.phase_;
  }

  bool equal_up_to_phase(const PauliString& o) const { return n_ == o.n_ && x_ == o.x_ && z_ == o.z_; }

  /// Bit masks in computational-basis index space (qubit q <-> bit n-1-q).
  std::uint64_t x_index_mask() const { return reverse_bits(x_); }
  std::uint64_t z_index_mask() const { return reverse_bits(z_); }

  /// Scalar c such that the operator equals c * X^x Z^z (phase-free symplectic form).
  cplx xz_coefficient() const {
    static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kPow[(phase_ + std::popcount(x_ & z_)) % 4];
  }

 private:
  std::uint64_t reverse_bits(std::uint32_t v) const {
    std::uint64_t r = 0;
    for (int q = 0; q < n_; ++q)
      if ((v >> q) & 1u) r |= std::uint64_t{1} << (n_ - 1 - q);
    return r;
  }

  int n_ = 1;
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
  int phase_ = 0;
};

/// +1 if the operators commute, -1 if they anticommute.
inline int commutation_sign(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("commutation_sign: qubit count mismatch");
  const int k = std::popcount(a.x_bits() & b.z_bits()) + std::popcount(a.z_bits() & b.x_bits());
  return (k & 1) ? -1 : 1;
}

inline std::uint64_t pauli_basis_size(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kEnumerationQubitCap)
    throw SizeError("Pauli basis enumeration capped at " + std::to_string(kEnumerationQubitCap) + " qubits");
  return std::uint64_t{1} << (2 * n_qubits);
}

/// All phase-stripped strings in canonical order.
inline std::vector<PauliString> all_pauli_strings(int n_qubits) {
  const std::uint64_t count = pauli_basis_size(n_qubits);
  std::vector<PauliString> out;
  out.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) out.push_back(PauliString::from_index(n_qubits, j));
  return out;
}

/*
 * Phase-stripped Pauli group generated by a list of strings.
 *
 * Dependent generators are dropped by GF(2) elimination, so |elements| = 2^generators().size().
 */
class PauliGroup {
 public:
  PauliGroup(int n_qubits, const std::vector<PauliString>& generators) : n_(n_qubits) {
    if (n_qubits < 1) throw DimensionError("PauliGroup: qubit count must be positive");
    std::uint64_t basis[64] = {};  // XOR basis keyed by leading bit
    for (const auto& g : generators) {
      if (g.n_qubits() != n_qubits) throw DimensionError("PauliGroup: generator qubit count mismatch");
      std::uint64_t v = symplectic(g);
      for (int bit = 63; bit >= 0 && v != 0; --bit) {
        if (!((v >> bit) & 1u)) continue;
        if (basis[bit] == 0) {
          basis[bit] = v;
          generators_.push_back(g.stripped());
          v = 0;
        } else {
          v ^= basis[bit];
        }
      }
    }
    if (generators_.size() > 2 * static_cast<std::size_t>(kEnumerationQubitCap))
      throw SizeError("PauliGroup: group too large to enumerate");
    const std::size_t count = std::size_t{1} << generators_.size();
    elements_.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
      std::uint32_t x = 0, z = 0;
      for (std::size_t k = 0; k < generators_.size(); ++k) {
        if ((mask >> k) & 1u) {
          x ^= generators_[k].x_bits();
          z ^= generators_[k].z_bits();
        }
      }
      elements_.emplace_back(n_qubits, x, z);
    }
    std::sort(elements_.begin(), elements_.end(),
              [](const PauliString& a, const PauliString& b) { return a.index() < b.index(); });
  }

  /// The full n-qubit Pauli group (generated by all X_q and Z_q).
  static PauliGroup full(int n_qubits) {
    std::vector<PauliString> gens;
    for (int q = 0; q < n_qubits; ++q) {
      gens.push_back(PauliString::single(n_qubits, q, 'X'));
      gens.push_back(PauliString::single(n_qubits, q, 'Z'));
    }
    return {n_qubits, gens};
  }

  int n_qubits() const { return n_; }
  const std::vector<PauliString>& generators() const { return generators_; }
  const std::vector<PauliString>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  bool contains(const PauliString& p) const {
    return std::binary_search(elements_.begin(), elements_.end(), p.stripped(),
                              [](const PauliString& a, const PauliString& b) { return a.index() < b.index(); });
  }

 private:
  static std::uint64_t symplectic(const PauliString& p) {
    return (static_cast<std::uint64_t>(p.z_bits()) << 32) | p.x_bits();
  }

  int n_;
  std::vector<PauliString> generators_;
  std::vector<PauliString> elements_;
};

/// Every phase-stripped string commuting with all of the group's generators, canonical order.
inline std::vector<PauliString> commutant_of_group(const PauliGroup& group) {
  std::vector<PauliString> out;
  for (const auto& p : all_pauli_strings(group.n_qubits())) {
    bool ok = true;
    for (const auto& g : group.generators()) {
      if (commutation_sign(p, g) < 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(p);
  }
  return out;
}

/// Dense 2^n x 2^n matrix including the stored phase.
inline CMatrix pauli_matrix(const PauliString& p, int qubit_cap = kDenseQubitCap) {
  if (p.n_qubits() > qubit_cap)
    throw SizeError("pauli_matrix: " + std::to_string(p.n_qubits()) + " qubits exceeds cap " +
                    std::to_string(qubit_cap));
  const Eigen::Index dim = Eigen::Index{1} << p.n_qubits();
  const std::uint64_t xm = p.x_index_mask(), zm = p.z_index_mask();
  const cplx c = p.xz_coefficient();
  CMatrix m = CMatrix::Zero(dim, dim);
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
    const double sign = (std::popcount(zm & b) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) = c * sign;
  }
  return m;
}

/// P|psi> without materializing P.
inline CVector apply_pauli(const PauliString& p, const CVector& psi) {
  const std::uint64_t dim = std::uint64_t{1} << p.n_qubits();
  if (static_cast<std::uint64_t>(psi.size()) != dim) throw DimensionError("apply_pauli: dimension mismatch");
  const std::uint64_t xm = p.x_index_mask(), zm = p.z_index_mask();
  const cplx c = p.xz_coefficient();
  CVector out(psi.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(zm & b) & 1) ? -1.0 : 1.0;
    out[static_cast<Eigen::Index>(b ^ xm)] = c * sign * psi[static_cast<Eigen::Index>(b)];
  }
  return out;
}

/// <psi|P|psi>; real for a Hermitian (phase 0 or 2) string.
inline cplx pauli_expectation(const PauliString& p, const CVector& psi) {
  const std::uint64_t dim = std::uint64_t{1} << p.n_qubits();
  if (static_cast<std::uint64_t>(psi.size()) != dim) throw DimensionError("pauli_expectation: dimension mismatch");
  const std::uint64_t xm = p.x_index_mask(), zm = p.z_index_mask();
  cplx acc{0.0, 0.0};
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx term = std::conj(psi[static_cast<Eigen::Index>(b ^ xm)]) * psi[static_cast<Eigen::Index>(b)];
    acc += (std::popcount(zm & b) & 1) ? -term : term;
  }
  return p.xz_coefficient() * acc;
}

/// Tr(P rho) for a Hermitian density matrix.
inline double pauli_overlap(const CMatrix& rho, const PauliString& p, double hermitian_tol = 1e-10) {
  const Eigen::Index dim = Eigen::Index{1} << p.n_qubits();
  if (rho.rows() != dim || rho.cols() != dim) throw DimensionError("pauli_overlap: dimension mismatch");
  if (!is_hermitian(rho, hermitian_tol)) throw ValidationError("pauli_overlap: rho is not Hermitian");
  const std::uint64_t xm = p.x_index_mask(), zm = p.z_index_mask();
  cplx acc{0.0, 0.0};
  // P|c> = s(c)|c^x>, so Tr(rho P) = sum_c s(c) rho(c, c^x).
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c) {
    const cplx v = rho(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ xm));
    acc += (std::popcount(zm & c) & 1) ? -v : v;
  }
  return (p.xz_coefficient() * acc).real();
}

/// Pauli-basis coefficients c_j = Tr(G_j M) / 2^n of a dense matrix, canonical order.
inline CVector pauli_decomposition(const CMatrix& m) {
  const int n = qubits_for_dimension(m.rows());
  const std::uint64_t count = pauli_basis_size(n);
  const Eigen::Index dim = m.rows();
  CVector out(static_cast<Eigen::Index>(count));
  for (std::uint64_t j = 0; j < count; ++j) {
    const PauliString p = PauliString::from_index(n, j);
    const std::uint64_t xm = p.x_index_mask(), zm = p.z_index_mask();
    cplx acc{0.0, 0.0};
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c) {
      const cplx v = m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ xm));
      acc += (std::popcount(zm & c) & 1) ? -v : v;
    }
    out[static_cast<Eigen::Index>(j)] = p.xz_coefficient() * acc / static_cast<double>(dim);
  }
  return out;
}

}  // namespace tcrab

#endif  // TCRAB_PAULI_HPP_
