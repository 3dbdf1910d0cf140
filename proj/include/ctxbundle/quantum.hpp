// quantum.hpp — exact dense simulation of n-qubit states and commuting Pauli observables.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctxbundle {

using cplx = std::complex<double>;

inline constexpr double kConstructionTol = 1e-12;
inline constexpr double kPhysicsTol = 1e-9;
inline constexpr int kMaxQubits = 12;

/// Dense n-qubit state. Qubit 0 is the leftmost ket factor, i.e. the most
/// significant bit of the amplitude index.
class StateVector {
 public:
  StateVector(int n, std::vector<cplx> amplitudes) : n_(n), amps_(std::move(amplitudes)) {
    if (n_ < 1 || n_ > kMaxQubits)
      throw std::invalid_argument("qubit count must be in 1.." + std::to_string(kMaxQubits));
    if (amps_.size() != (std::size_t{1} << n_))
      throw std::invalid_argument("amplitude count does not match qubit count");
    double norm2 = 0.0;
    for (const cplx& a : amps_) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > kConstructionTol)
      throw std::invalid_argument("state vector is not normalized");
  }

  int qubit_count() const { return n_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }

  /// |a . b|: 1 exactly when the states agree up to a global phase.
  double overlap(const StateVector& other) const {
    if (other.n_ != n_) throw std::invalid_argument("qubit counts differ");
    cplx ip = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      ip += std::conj(amps_[i]) * other.amps_[i];
    return std::abs(ip);
  }

 private:
  int n_;
  std::vector<cplx> amps_;
};

// ---------------------------------------------------------------------------
// Signed Pauli words

/// Sign (+1/-1) times a tensor product of I,X,Y,Z letters. Phases +-i never
/// arise in this library; word products that would produce them are rejected.
struct PauliWord {
  int sign = +1;
  std::string letters;  // over I,X,Y,Z; one letter per qubit

  /// Parses "+XZ11Z" or "-XYY"; '1' and 'I' both denote the identity.
  static PauliWord parse(std::string_view text) {
    PauliWord w;
    std::size_t pos = 0;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
      w.sign = text[0] == '-' ? -1 : +1;
      pos = 1;
    }
    if (pos == text.size()) throw std::invalid_argument("empty Pauli word");
    for (; pos < text.size(); ++pos) {
      char c = text[pos];
      if (c == '1' || c == 'I')
        w.letters.push_back('I');
      else if (c == 'X' || c == 'Y' || c == 'Z')
        w.letters.push_back(c);
      else
        throw std::invalid_argument(std::string("bad Pauli letter '") + c + "'");
    }
    return w;
  }

  std::string str() const {
    std::string s(1, sign < 0 ? '-' : '+');
    for (char c : letters) s.push_back(c == 'I' ? '1' : c);
    return s;
  }
};

/// Symplectic commutation rule: two words commute iff the number of positions
/// holding distinct non-identity letters is even.
inline bool commute(const PauliWord& a, const PauliWord& b) {
  if (a.letters.size() != b.letters.size())
    throw std::invalid_argument("Pauli word lengths differ");
  int anti = 0;
  for (std::size_t k = 0; k < a.letters.size(); ++k) {
    char x = a.letters[k], y = b.letters[k];
    if (x != 'I' && y != 'I' && x != y) ++anti;
  }
  return anti % 2 == 0;
}

/// sign * (tensor of letters) applied to the state. Pauli words are unitary,
/// so the result is again normalized.
inline StateVector apply(const PauliWord& w, const StateVector& psi) {
  const int n = psi.qubit_count();
  if (w.letters.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("Pauli word length does not match qubit count");

  const std::size_t dim = std::size_t{1} << n;
  std::size_t flip = 0;
  for (int k = 0; k < n; ++k) {
    char c = w.letters[static_cast<std::size_t>(k)];
    if (c == 'X' || c == 'Y') flip |= std::size_t{1} << (n - 1 - k);
  }

  std::vector<cplx> out(dim, cplx{0.0, 0.0});
  const auto& in = psi.amplitudes();
  for (std::size_t i = 0; i < dim; ++i) {
    cplx phase{static_cast<double>(w.sign), 0.0};
    for (int k = 0; k < n; ++k) {
      char c = w.letters[static_cast<std::size_t>(k)];
      bool bit = (i >> (n - 1 - k)) & 1u;
      if (c == 'Y') phase *= bit ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
      if (c == 'Z' && bit) phase = -phase;
    }
    out[i ^ flip] += phase * in[i];
  }
  return StateVector(n, std::move(out));
}

// ---------------------------------------------------------------------------
// Eigenprojectors and joint measurement distributions

using Matrix2 = std::array<cplx, 4>;  // row-major 2x2

/// Rank-one projector onto the (-1)^bit eigenvector of X, Y or Z.
inline Matrix2 eig_projector(char letter, int outcome_bit) {
  if (outcome_bit != 0 && outcome_bit != 1)
    throw std::invalid_argument("outcome bit must be 0 or 1");
  const double s = outcome_bit == 0 ? 0.5 : -0.5;
  switch (letter) {
    case 'X':
      return {cplx{0.5, 0}, cplx{s, 0}, cplx{s, 0}, cplx{0.5, 0}};
    case 'Y':
      return {cplx{0.5, 0}, cplx{0, -s}, cplx{0, s}, cplx{0.5, 0}};
    case 'Z':
      return {cplx{0.5 + s, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0.5 - s, 0}};
    default:
      throw std::invalid_argument(std::string("no eigenprojector for letter '") + letter + "'");
  }
}

struct SingleQubitObservable {
  int qubit = 0;
  char letter = 'Z';
};

/// A jointly measurable family of single-qubit Pauli observables.
struct MeasurementContext {
  std::vector<SingleQubitObservable> observables;
};

/// Single-qubit observables commute exactly when they act on distinct qubits
/// or agree entirely, so the symplectic rule reduces to this check.
inline bool pairwise_commuting(const MeasurementContext& ctx) {
  for (std::size_t i = 0; i < ctx.observables.size(); ++i)
    for (std::size_t j = i + 1; j < ctx.observables.size(); ++j)
      if (ctx.observables[i].qubit == ctx.observables[j].qubit &&
          ctx.observables[i].letter != ctx.observables[j].letter)
        return false;
  return true;
}

namespace detail {

inline void apply_on_qubit(std::vector<cplx>& amps, int n, int qubit, const Matrix2& m) {
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const cplx a0 = amps[i];
    const cplx a1 = amps[i | mask];
    amps[i] = m[0] * a0 + m[1] * a1;
    amps[i | mask] = m[2] * a0 + m[3] * a1;
  }
}

}  // namespace detail

/// P(outcome tuple) = |(tensor of eigenprojectors) psi|^2, indexed
/// lexicographically with the first context observable most significant.
inline std::vector<double> joint_distribution(const StateVector& psi,
                                              const MeasurementContext& ctx) {
  const int n = psi.qubit_count();
  if (ctx.observables.empty())
    throw std::invalid_argument("empty measurement context");
  for (const auto& o : ctx.observables) {
    if (o.qubit < 0 || o.qubit >= n)
      throw std::invalid_argument("observable qubit index out of range");
    if (o.letter != 'X' && o.letter != 'Y' && o.letter != 'Z')
      throw std::invalid_argument(std::string("bad observable letter '") + o.letter + "'");
  }
  if (!pairwise_commuting(ctx))
    throw std::invalid_argument("context observables do not pairwise commute");

  const std::size_t m = ctx.observables.size();
  std::vector<double> dist(std::size_t{1} << m, 0.0);
  for (std::size_t code = 0; code < dist.size(); ++code) {
    std::vector<cplx> work = psi.amplitudes();
    for (std::size_t k = 0; k < m; ++k) {
      const int bit = static_cast<int>((code >> (m - 1 - k)) & 1u);
      detail::apply_on_qubit(work, n, ctx.observables[k].qubit,
                             eig_projector(ctx.observables[k].letter, bit));
    }
    double p = 0.0;
    for (const cplx& a : work) p += std::norm(a);
    dist[code] = p;
  }
  return dist;
}

/// Returns s when w|psi> = s|psi> within 1e-9 in vector norm, else nothing.
inline std::optional<int> stabilizer_sign(const StateVector& psi, const PauliWord& w) {
  StateVector phi = apply(w, psi);
  const auto& a = psi.amplitudes();
  const auto& b = phi.amplitudes();
  double dplus = 0.0, dminus = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dplus += std::norm(b[i] - a[i]);
    dminus += std::norm(b[i] + a[i]);
  }
  if (std::sqrt(dplus) <= kPhysicsTol) return +1;
  if (std::sqrt(dminus) <= kPhysicsTol) return -1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Products of stabilizer projectors (1 + s W)/2

struct ProductCheck {
  enum class Kind { zero, rank_one, other };
  Kind kind = Kind::other;
  std::optional<StateVector> state;  // extracted when rank_one
  int rank = 0;                      // reported when other
  cplx trace{0.0, 0.0};
};

namespace detail {

/// Applies P_1 P_2 ... P_k with P_i = (I + sign_i W_i)/2, rightmost first.
inline std::vector<cplx> projector_chain(const std::vector<PauliWord>& words, int n,
                                         std::vector<cplx> v) {
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    const std::size_t dim = v.size();
    std::size_t flip = 0;
    for (int k = 0; k < n; ++k) {
      char c = it->letters[static_cast<std::size_t>(k)];
      if (c == 'X' || c == 'Y') flip |= std::size_t{1} << (n - 1 - k);
    }
    std::vector<cplx> wv(dim, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < dim; ++i) {
      cplx phase{static_cast<double>(it->sign), 0.0};
      for (int k = 0; k < n; ++k) {
        char c = it->letters[static_cast<std::size_t>(k)];
        bool bit = (i >> (n - 1 - k)) & 1u;
        if (c == 'Y') phase *= bit ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
        if (c == 'Z' && bit) phase = -phase;
      }
      wv[i ^ flip] += phase * v[i];
    }
    for (std::size_t i = 0; i < dim; ++i) v[i] = 0.5 * (v[i] + wv[i]);
  }
  return v;
}

}  // namespace detail

/// Forms P_i = (I + sign_i W_i)/2, multiplies them in the given order, and
/// classifies the product: identically zero, a rank-one projector |psi><psi|
/// (the state is extracted), or anything else (rank and trace are reported).
inline ProductCheck projector_product_check(const std::vector<PauliWord>& words) {
  if (words.empty() || words.size() > 8)
    throw std::invalid_argument("projector product check takes 1..8 words");
  const std::size_t len = words.front().letters.size();
  for (const auto& w : words) {
    if (w.letters.size() != len) throw std::invalid_argument("Pauli word lengths differ");
    if (w.sign != 1 && w.sign != -1) throw std::invalid_argument("word sign must be +-1");
  }
  const int n = static_cast<int>(len);
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("word length must be in 1.." + std::to_string(kMaxQubits));
  const std::size_t dim = std::size_t{1} << n;

  ProductCheck result;
  double max_entry = 0.0;
  double best_norm2 = -1.0;
  std::vector<cplx> best_col;
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<cplx> e(dim, cplx{0.0, 0.0});
    e[j] = 1.0;
    std::vector<cplx> col = detail::projector_chain(words, n, std::move(e));
    result.trace += col[j];
    double norm2 = 0.0;
    for (const cplx& a : col) {
      max_entry = std::max(max_entry, std::abs(a));
      norm2 += std::norm(a);
    }
    if (norm2 > best_norm2) {
      best_norm2 = norm2;
      best_col = col;
    }
  }

  if (max_entry < kPhysicsTol) {
    result.kind = ProductCheck::Kind::zero;
    return result;
  }

  if (std::abs(result.trace - cplx{1.0, 0.0}) <= kPhysicsTol && best_norm2 > 0.0) {
    std::vector<cplx> candidate = best_col;
    const double inv = 1.0 / std::sqrt(best_norm2);
    for (cplx& a : candidate) a *= inv;
    // rank one iff every column j equals candidate * conj(candidate_j)
    bool rank_one = true;
    for (std::size_t j = 0; j < dim && rank_one; ++j) {
      std::vector<cplx> e(dim, cplx{0.0, 0.0});
      e[j] = 1.0;
      std::vector<cplx> col = detail::projector_chain(words, n, std::move(e));
      const cplx coeff = std::conj(candidate[j]);
      for (std::size_t i = 0; i < dim; ++i)
        if (std::abs(col[i] - candidate[i] * coeff) > kPhysicsTol) {
          rank_one = false;
          break;
        }
    }
    if (rank_one) {
      result.kind = ProductCheck::Kind::rank_one;
      result.state = StateVector(n, std::move(candidate));
      result.rank = 1;
      return result;
    }
  }

  // Streaming Gram-Schmidt over the columns for the numerical rank.
  std::vector<std::vector<cplx>> basis;
  const double rank_tol = 1e-8;
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<cplx> e(dim, cplx{0.0, 0.0});
    e[j] = 1.0;
    std::vector<cplx> col = detail::projector_chain(words, n, std::move(e));
    for (const auto& b : basis) {
      cplx ip = 0.0;
      for (std::size_t i = 0; i < dim; ++i) ip += std::conj(b[i]) * col[i];
      for (std::size_t i = 0; i < dim; ++i) col[i] -= ip * b[i];
    }
    double norm2 = 0.0;
    for (const cplx& a : col) norm2 += std::norm(a);
    if (std::sqrt(norm2) > rank_tol) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (cplx& a : col) a *= inv;
      basis.push_back(std::move(col));
    }
  }
  result.kind = ProductCheck::Kind::other;
  result.rank = static_cast<int>(basis.size());
  return result;
}

// ---------------------------------------------------------------------------
// Stock states

inline StateVector basis_state(int n, std::size_t index) {
  std::vector<cplx> amps(std::size_t{1} << n, cplx{0.0, 0.0});
  amps.at(index) = 1.0;
  return StateVector(n, std::move(amps));
}

/// (|00> + |11>)/sqrt(2)
inline StateVector bell_state() {
  const double r = 1.0 / std::sqrt(2.0);
  return StateVector(2, {cplx{r, 0}, 0, 0, cplx{r, 0}});
}

/// (|001> - |110>)/sqrt(2)
inline StateVector ghz_minus_state() {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<cplx> amps(8, cplx{0.0, 0.0});
  amps[0b001] = cplx{r, 0};
  amps[0b110] = cplx{-r, 0};
  return StateVector(3, std::move(amps));
}

/// |+>^n followed by controlled-Z on every ring edge (k, k+1 mod n).
inline StateVector cluster_ring_state(int n) {
  if (n < 3 || n > kMaxQubits) throw std::invalid_argument("ring size must be in 3..12");
  const std::size_t dim = std::size_t{1} << n;
  const double r = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<cplx> amps(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    int phase = 0;
    for (int k = 0; k < n; ++k) {
      const int k2 = (k + 1) % n;
      const bool a = (i >> (n - 1 - k)) & 1u;
      const bool b = (i >> (n - 1 - k2)) & 1u;
      if (a && b) phase ^= 1;
    }
    amps[i] = cplx{phase ? -r : r, 0.0};
  }
  return StateVector(n, std::move(amps));
}

}  // namespace ctxbundle
