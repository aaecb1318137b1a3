#pragma once

// Symbolic algebra of fermionic creation/annihilation operators under the
// canonical anticommutation relations
//
//   a_i adag_i + adag_i a_i = 1,   a_i a_i = adag_i adag_i = 0,
//   {a_i, adag_j} = {a_i, a_j} = {adag_i, adag_j} = 0   (i != j).
//
// Every OperatorExpr is kept in a unique canonical form: a sorted sum of
// normal-ordered monomials (all creators left of all annihilators, creators
// strictly ascending, annihilators strictly descending). Two expressions are
// equal iff their term lists are identical, so operator identities reduce to
// syntactic comparison.

#include <algorithm>
#include <optional>
#include <vector>

#include "fockdl/fock.hpp"

namespace fockdl {

// Any c-number; unit modulus only when produced by the gauge module.
using PhaseFactor = Complex;

enum class AtomKind { Create, Annihilate };

struct OperatorAtom {
  AtomKind kind;
  ModeIndex mode;
  friend bool operator==(const OperatorAtom&, const OperatorAtom&) = default;
};

inline OperatorAtom create_atom(ModeIndex i) { return {AtomKind::Create, i}; }
inline OperatorAtom annihilate_atom(ModeIndex i) { return {AtomKind::Annihilate, i}; }

// coeff * adag(c_1)...adag(c_k) a(d_1)...a(d_m), creators ascending,
// annihilators descending, no repeats within either list (nilpotency).
struct NormalTerm {
  Complex coeff;
  std::vector<ModeIndex> creators;
  std::vector<ModeIndex> annihilators;

  std::vector<OperatorAtom> word() const {
    std::vector<OperatorAtom> w;
    w.reserve(creators.size() + annihilators.size());
    for (ModeIndex c : creators) w.push_back(create_atom(c));
    for (ModeIndex d : annihilators) w.push_back(annihilate_atom(d));
    return w;
  }

  friend bool operator==(const NormalTerm&, const NormalTerm&) = default;
};

namespace detail {

using TermSignature = std::pair<std::vector<ModeIndex>, std::vector<ModeIndex>>;

// Rewrites coeff * word into normal order, accumulating monomials into acc.
// One disorder is fixed per pass; the a adag contraction branches into the
// scalar part and the reordered part, so a worklist is used.
inline void normal_order_into(Complex coeff, std::vector<OperatorAtom> word,
                              std::map<TermSignature, Complex>& acc) {
  std::vector<std::pair<Complex, std::vector<OperatorAtom>>> work;
  work.emplace_back(coeff, std::move(word));
  while (!work.empty()) {
    auto [c, w] = std::move(work.back());
    work.pop_back();
    if (c == Complex{}) continue;

    bool rewritten = false;
    for (std::size_t p = 0; p + 1 < w.size(); ++p) {
      const OperatorAtom x = w[p];
      const OperatorAtom y = w[p + 1];
      if (x.kind == y.kind) {
        if (x.mode == y.mode) {  // nilpotent: a_i a_i = adag_i adag_i = 0
          rewritten = true;
          break;
        }
        bool out_of_order = (x.kind == AtomKind::Create) ? x.mode > y.mode : x.mode < y.mode;
        if (out_of_order) {
          std::swap(w[p], w[p + 1]);
          work.emplace_back(-c, std::move(w));
          rewritten = true;
          break;
        }
      } else if (x.kind == AtomKind::Annihilate && y.kind == AtomKind::Create) {
        if (x.mode == y.mode) {  // a_i adag_i = 1 - adag_i a_i
          std::vector<OperatorAtom> contracted;
          contracted.reserve(w.size() - 2);
          contracted.insert(contracted.end(), w.begin(), w.begin() + p);
          contracted.insert(contracted.end(), w.begin() + p + 2, w.end());
          work.emplace_back(c, std::move(contracted));
          std::swap(w[p], w[p + 1]);
          work.emplace_back(-c, std::move(w));
        } else {
          std::swap(w[p], w[p + 1]);
          work.emplace_back(-c, std::move(w));
        }
        rewritten = true;
        break;
      }
    }
    if (rewritten) continue;

    TermSignature sig;
    for (const OperatorAtom& atom : w) {
      (atom.kind == AtomKind::Create ? sig.first : sig.second).push_back(atom.mode);
    }
    acc[std::move(sig)] += c;
  }
}

}  // namespace detail

class OperatorExpr {
 public:
  explicit OperatorExpr(std::size_t n_modes) : n_modes_(n_modes) { check_mode_count(n_modes); }

  static OperatorExpr zero(std::size_t n_modes) { return OperatorExpr(n_modes); }

  static OperatorExpr identity(std::size_t n_modes) {
    OperatorExpr e(n_modes);
    e.terms_.push_back(NormalTerm{Complex{1.0, 0.0}, {}, {}});
    return e;
  }

  // Canonicalizes coeff * (product of atoms, leftmost factor applied last).
  static OperatorExpr from_word(Complex coeff, const std::vector<OperatorAtom>& atoms,
                                std::size_t n_modes) {
    check_mode_count(n_modes);
    for (const OperatorAtom& a : atoms) check_mode_index(a.mode, n_modes);
    std::map<detail::TermSignature, Complex> acc;
    detail::normal_order_into(coeff, atoms, acc);
    return from_signature_map(acc, n_modes);
  }

  std::size_t n_modes() const { return n_modes_; }
  const std::vector<NormalTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_identity() const {
    return terms_.size() == 1 && terms_[0].creators.empty() && terms_[0].annihilators.empty() &&
           terms_[0].coeff == Complex{1.0, 0.0};
  }

  friend bool operator==(const OperatorExpr&, const OperatorExpr&) = default;

  friend OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
    check_compatible(a, b);
    std::map<detail::TermSignature, Complex> acc;
    for (const NormalTerm& t : a.terms_) acc[{t.creators, t.annihilators}] += t.coeff;
    for (const NormalTerm& t : b.terms_) acc[{t.creators, t.annihilators}] += t.coeff;
    return from_signature_map(acc, a.n_modes_);
  }

  friend OperatorExpr operator*(Complex c, const OperatorExpr& e) {
    OperatorExpr out(e.n_modes_);
    for (const NormalTerm& t : e.terms_) {
      const Complex scaled = c * t.coeff;
      if (scaled == Complex{}) continue;
      out.terms_.push_back(NormalTerm{scaled, t.creators, t.annihilators});
    }
    return out;
  }

  friend OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) {
    return a + Complex{-1.0, 0.0} * b;
  }

  // Reorders the concatenated words with anticommutation sign flips,
  // contracting a_i adag_i -> 1 - adag_i a_i and dropping nilpotent repeats.
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
    check_compatible(a, b);
    std::map<detail::TermSignature, Complex> acc;
    for (const NormalTerm& ta : a.terms_) {
      for (const NormalTerm& tb : b.terms_) {
        std::vector<OperatorAtom> word = ta.word();
        const std::vector<OperatorAtom> wb = tb.word();
        word.insert(word.end(), wb.begin(), wb.end());
        detail::normal_order_into(ta.coeff * tb.coeff, std::move(word), acc);
      }
    }
    return from_signature_map(acc, a.n_modes_);
  }

 private:
  static void check_compatible(const OperatorExpr& a, const OperatorExpr& b) {
    if (a.n_modes_ != b.n_modes_) {
      throw std::invalid_argument("operator expressions live in different mode spaces");
    }
  }

  static OperatorExpr from_signature_map(const std::map<detail::TermSignature, Complex>& acc,
                                         std::size_t n_modes) {
    OperatorExpr out(n_modes);
    for (const auto& [sig, c] : acc) {
      if (c == Complex{}) continue;
      out.terms_.push_back(NormalTerm{c, sig.first, sig.second});
    }
    return out;
  }

  std::size_t n_modes_;
  std::vector<NormalTerm> terms_;  // sorted by (creators, annihilators)
};

inline OperatorExpr creation(ModeIndex i, std::size_t n_modes) {
  return OperatorExpr::from_word(Complex{1.0, 0.0}, {create_atom(i)}, n_modes);
}

inline OperatorExpr annihilation(ModeIndex i, std::size_t n_modes) {
  return OperatorExpr::from_word(Complex{1.0, 0.0}, {annihilate_atom(i)}, n_modes);
}

// Dagger: reverses each word and conjugates coefficients; an involution and
// an antihomomorphism, (AB)^dag = B^dag A^dag.
inline OperatorExpr adjoint(const OperatorExpr& e) {
  OperatorExpr out = OperatorExpr::zero(e.n_modes());
  for (const NormalTerm& t : e.terms()) {
    // Reversing a normal-ordered word and flipping atom kinds yields a word
    // that is again normal-ordered, so no reordering signs appear.
    NormalTerm flipped;
    flipped.coeff = std::conj(t.coeff);
    flipped.creators.assign(t.annihilators.rbegin(), t.annihilators.rend());
    flipped.annihilators.assign(t.creators.rbegin(), t.creators.rend());
    out = out + OperatorExpr::from_word(flipped.coeff, flipped.word(), e.n_modes());
  }
  return out;
}

// Splits a sum into its monomial summands; the outputs add back to the input
// (an empty list for the zero operator).
inline std::vector<OperatorExpr> expand_terms(const OperatorExpr& e) {
  std::vector<OperatorExpr> parts;
  parts.reserve(e.terms().size());
  for (const NormalTerm& t : e.terms()) {
    parts.push_back(OperatorExpr::from_word(t.coeff, t.word(), e.n_modes()));
  }
  return parts;
}

inline OperatorExpr anticommutator(const OperatorExpr& a, const OperatorExpr& b) {
  return a * b + b * a;
}

// Propagator P_i = adag_i a_i (the number operator on mode i).
inline OperatorExpr propagator(ModeIndex i, std::size_t n_modes) {
  check_mode_index(i, n_modes);
  return OperatorExpr::from_word(Complex{1.0, 0.0}, {create_atom(i), annihilate_atom(i)},
                                 n_modes);
}

// Time-reversed propagator P_i^perp = a_i adag_i = 1 - adag_i a_i.
inline OperatorExpr propagator_perp(ModeIndex i, std::size_t n_modes) {
  check_mode_index(i, n_modes);
  return OperatorExpr::from_word(Complex{1.0, 0.0}, {annihilate_atom(i), create_atom(i)},
                                 n_modes);
}

// P_ji = a_i adag_i + adag_j U a_i: projective for any c-number U, moves a
// particle from mode i to mode j with phase U. P_ii is the identity when U=1.
inline OperatorExpr transition_projector(ModeIndex j, ModeIndex i, PhaseFactor u,
                                         std::size_t n_modes) {
  check_mode_index(i, n_modes);
  check_mode_index(j, n_modes);
  return propagator_perp(i, n_modes) +
         OperatorExpr::from_word(u, {create_atom(j), annihilate_atom(i)}, n_modes);
}

// L = i (adag_i a_i - adag_j U a_i); satisfies 1 + iL = P_ji exactly.
inline OperatorExpr local_lagrangian(ModeIndex j, ModeIndex i, PhaseFactor u,
                                     std::size_t n_modes) {
  const Complex im{0.0, 1.0};
  return im * (propagator(i, n_modes) -
               OperatorExpr::from_word(u, {create_atom(j), annihilate_atom(i)}, n_modes));
}

namespace detail {

// Jordan-Wigner action on a single basis mask: sign is the parity of the
// occupied modes below the target mode; nullopt when the atom annihilates
// the component.
inline std::optional<std::pair<OccMask, double>> apply_atom(const OperatorAtom& atom,
                                                            OccMask mask) {
  const OccMask bit = static_cast<OccMask>(1u << atom.mode);
  const bool set = (mask & bit) != 0;
  if (atom.kind == AtomKind::Create ? set : !set) return std::nullopt;
  const OccMask below = static_cast<OccMask>(mask & (bit - 1));
  const double sign = (std::popcount(below) % 2 == 0) ? 1.0 : -1.0;
  return std::pair{static_cast<OccMask>(mask ^ bit), sign};
}

}  // namespace detail

// Linear action of O on |psi>; the rightmost factor of each monomial acts
// first. The result is NOT normalized (the semantics layer normalizes).
inline StateVector apply(const OperatorExpr& op, const StateVector& v) {
  if (op.n_modes() != v.n_modes()) {
    throw std::invalid_argument("operator and state live in different mode spaces");
  }
  std::map<OccMask, Complex> out;
  for (const NormalTerm& t : op.terms()) {
    const std::vector<OperatorAtom> word = t.word();
    for (const auto& [mask, amp] : v.amplitudes()) {
      OccMask m = mask;
      double sign = 1.0;
      bool alive = true;
      for (auto it = word.rbegin(); it != word.rend(); ++it) {
        auto step = detail::apply_atom(*it, m);
        if (!step) {
          alive = false;
          break;
        }
        m = step->first;
        sign *= step->second;
      }
      if (alive) out[m] += t.coeff * sign * amp;
    }
  }
  return StateVector(v.n_modes(), std::move(out));
}

}  // namespace fockdl
