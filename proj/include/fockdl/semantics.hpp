#pragma once

// Finite Kripke models over Fock-space rays and the satisfaction relation of
// the dynamic logic. Genuine states are unit vectors, pairwise distinct as
// rays; the zero vector is an explicit pseudo-state that is a valid
// evaluation point but never participates in a transition pair.
//
// Slots: 0 .. states.size()-1 name the genuine states; states.size() names
// the zero pseudo-state when the model carries one.

#include <functional>
#include <random>
#include <set>

#include "fockdl/matrix.hpp"
#include "fockdl/syntax.hpp"

namespace fockdl {

struct Model {
  std::size_t n_modes = 0;
  std::vector<StateVector> states;  // normalized, pairwise ray-distinct, discovery order
  bool has_zero = true;
  std::vector<OperatorExpr> alphabet;
  std::size_t closure_depth = 0;
  double ray_tol = kDefaultRayTol;

  std::size_t zero_slot() const {
    if (!has_zero) throw std::logic_error("model has no zero pseudo-state");
    return states.size();
  }
  std::size_t slot_count() const { return states.size() + (has_zero ? 1 : 0); }
  bool is_zero_slot(std::size_t slot) const { return has_zero && slot == states.size(); }

  const StateVector& state(std::size_t slot) const {
    if (slot >= states.size()) throw std::out_of_range("state slot out of range");
    return states[slot];
  }

  // Occupation string for basis-like states, "zero" for the pseudo-state,
  // "psi<slot>" for genuine superpositions.
  std::string state_name(std::size_t slot) const {
    if (is_zero_slot(slot)) return "zero";
    const StateVector& v = state(slot);
    if (v.is_basis_like()) {
      return BasisState(v.amplitudes().begin()->first, n_modes).to_string();
    }
    return "psi" + std::to_string(slot);
  }

  // Slot of the ray of v, if present among the genuine states.
  std::optional<std::size_t> find_ray(const StateVector& v) const {
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (ray_equal(states[k], v, ray_tol)) return k;
    }
    return std::nullopt;
  }
};

inline constexpr std::size_t kMaxModelStates = 4096;

// Breadth-first ray closure of the seeds under forward application of every
// alphabet operator, to the given depth. Results that normalize to zero are
// dropped (the pseudo-state stands for them); new rays are deduplicated
// against the states found so far, first representative winning.
inline Model build_model(std::size_t n_modes, const std::vector<StateVector>& seeds,
                         const std::vector<OperatorExpr>& alphabet, std::size_t depth,
                         bool include_zero = true, double ray_tol = kDefaultRayTol) {
  check_mode_count(n_modes);
  if (depth < 1) throw std::invalid_argument("closure depth must be at least 1");
  Model m;
  m.n_modes = n_modes;
  m.has_zero = include_zero;
  m.alphabet = alphabet;
  m.closure_depth = depth;
  m.ray_tol = ray_tol;

  for (const OperatorExpr& op : alphabet) {
    if (op.n_modes() != n_modes) {
      throw std::invalid_argument("alphabet operator has a different mode count");
    }
  }

  std::vector<std::size_t> frontier;
  for (const StateVector& seed : seeds) {
    if (seed.n_modes() != n_modes) throw std::invalid_argument("seed has a different mode count");
    if (std::abs(norm(seed) - 1.0) > kNormTol) {
      throw std::invalid_argument("seeds must be normalized");
    }
    if (!m.find_ray(seed)) {
      m.states.push_back(seed);
      frontier.push_back(m.states.size() - 1);
    }
  }

  for (std::size_t gen = 0; gen < depth && !frontier.empty(); ++gen) {
    std::vector<std::size_t> next;
    for (const std::size_t s : frontier) {
      for (const OperatorExpr& op : alphabet) {
        const StateVector w = normalize(apply(op, m.states[s]));
        if (w.is_zero() || m.find_ray(w)) continue;
        if (m.states.size() >= kMaxModelStates) {
          throw std::runtime_error("closure exceeded the state cap");
        }
        m.states.push_back(w);
        next.push_back(m.states.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return m;
}

// True when every alphabet operator maps every state back into the model (or
// to the zero vector).
inline bool is_closed(const Model& m) {
  for (const StateVector& s : m.states) {
    for (const OperatorExpr& op : m.alphabet) {
      const StateVector w = normalize(apply(op, s));
      if (!w.is_zero() && !m.find_ray(w)) return false;
    }
  }
  return true;
}

struct TransitionRelation {
  std::set<std::pair<std::size_t, std::size_t>> pairs;

  bool empty() const { return pairs.empty(); }
  bool has_successor(std::size_t slot) const {
    auto it = pairs.lower_bound({slot, 0});
    return it != pairs.end() && it->first == slot;
  }
};

inline TransitionRelation compose(const TransitionRelation& first,
                                  const TransitionRelation& second) {
  TransitionRelation out;
  for (const auto& [a, b] : first.pairs) {
    for (auto it = second.pairs.lower_bound({b, 0}); it != second.pairs.end() && it->first == b;
         ++it) {
      out.pairs.emplace(a, it->second);
    }
  }
  return out;
}

inline TransitionRelation transpose(const TransitionRelation& r) {
  TransitionRelation out;
  for (const auto& [a, b] : r.pairs) out.pairs.emplace(b, a);
  return out;
}

inline TransitionRelation relation_union(const TransitionRelation& a,
                                         const TransitionRelation& b) {
  TransitionRelation out = a;
  out.pairs.insert(b.pairs.begin(), b.pairs.end());
  return out;
}

bool satisfies(const Model& m, std::size_t slot, const FormulaPtr& f);
CMatrix subspace_projector(const Model& m, const FormulaPtr& f);

namespace detail {

bool satisfies_at(const Model& m, const StateVector& v, const Formula& f);

// Successor states of a genuine vector under an action, computed pointwise.
// The vector need not be a member of the model: quantum tests can project a
// member onto a superposition that the closure never visited, and evaluation
// simply continues at that vector.
inline std::vector<StateVector> successors_at(const Model& m, const StateVector& v,
                                              const Action& a) {
  switch (a.kind) {
    case ActionKind::Basic: {
      if (a.op->n_modes() != m.n_modes) {
        throw std::invalid_argument("action operator has a different mode count");
      }
      const StateVector w = normalize(apply(*a.op, v));
      if (w.is_zero()) return {};
      return {w};
    }
    case ActionKind::Seq: {
      std::vector<StateVector> out;
      for (const StateVector& mid : successors_at(m, v, *a.left)) {
        for (StateVector& w : successors_at(m, mid, *a.right)) out.push_back(std::move(w));
      }
      return out;
    }
    case ActionKind::Inverse: {
      // Predecessors within the model universe: u -> v under the child.
      std::vector<StateVector> out;
      for (const StateVector& u : m.states) {
        for (const StateVector& w : successors_at(m, u, *a.left)) {
          if (ray_equal(w, v, m.ray_tol)) {
            out.push_back(u);
            break;
          }
        }
      }
      return out;
    }
    case ActionKind::ClassicalTest:
      // The zero pseudo-state never passes a test: tests relate only genuine
      // states to themselves.
      if (!v.is_zero() && satisfies_at(m, v, *a.test)) return {v};
      return {};
    case ActionKind::QuantumTest: {
      const CMatrix p = subspace_projector(m, a.test);
      const StateVector w = normalize(from_dense(p * to_dense(v), m.n_modes));
      if (w.is_zero()) return {};
      return {w};
    }
    case ActionKind::Union: {
      std::vector<StateVector> out = successors_at(m, v, *a.left);
      for (StateVector& w : successors_at(m, v, *a.right)) out.push_back(std::move(w));
      return out;
    }
  }
  return {};
}

inline bool satisfies_at(const Model& m, const StateVector& v, const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Top: return true;
    case FormulaKind::Bot: return false;
    case FormulaKind::ClassicalNot: return !satisfies_at(m, v, *f.left);
    case FormulaKind::And: return satisfies_at(m, v, *f.left) && satisfies_at(m, v, *f.right);
    case FormulaKind::ClassicalOr:
      return satisfies_at(m, v, *f.left) || satisfies_at(m, v, *f.right);
    case FormulaKind::Implies:
      return !satisfies_at(m, v, *f.left) || satisfies_at(m, v, *f.right);
    case FormulaKind::Box: {
      for (const StateVector& w : successors_at(m, v, *f.action)) {
        if (!satisfies_at(m, w, *f.left)) return false;
      }
      return true;
    }
    case FormulaKind::Diamond: {
      // Sugar for !([a]!A), expanded right here.
      const Formula inner{FormulaKind::ClassicalNot, f.left, {}, {}};
      const Formula boxed{FormulaKind::Box, std::make_shared<Formula>(inner), {}, f.action};
      return !satisfies_at(m, v, boxed);
    }
    case FormulaKind::QuantumNot: {
      // (defnot): ~A holds iff the quantum test of A has no outcome, i.e. the
      // projection of v onto the span of A-states vanishes.
      const CMatrix p = subspace_projector(m, f.left);
      return norm(normalize(from_dense(p * to_dense(v), m.n_modes))) == 0.0;
    }
    case FormulaKind::QuantumOr: {
      // (defor): A (+) B  :=  ~(~A & ~B).
      const FormulaPtr na = make_qnot(f.left);
      const FormulaPtr nb = make_qnot(f.right);
      return satisfies_at(m, v, *make_qnot(make_and(na, nb)));
    }
    case FormulaKind::SasakiHook: {
      // (defto): A ~> B  :=  [A?q]B.
      const CMatrix p = subspace_projector(m, f.left);
      const StateVector w = normalize(from_dense(p * to_dense(v), m.n_modes));
      if (w.is_zero()) return true;
      return satisfies_at(m, w, *f.right);
    }
  }
  return false;
}

}  // namespace detail

// Satisfaction at a slot. The zero pseudo-state satisfies exactly the
// formulas whose truth needs no successor: every box is vacuously true there
// and no diamond holds.
inline bool satisfies(const Model& m, std::size_t slot, const FormulaPtr& f) {
  if (!f) throw std::invalid_argument("null formula");
  if (m.is_zero_slot(slot)) {
    // Evaluate at the literal zero vector: applications and projections of
    // the zero vector vanish, so no action yields a successor.
    return detail::satisfies_at(m, StateVector::zero(m.n_modes), *f);
  }
  return detail::satisfies_at(m, m.state(slot), *f);
}

// Slots (genuine and, when present, zero) satisfying the formula, ascending.
inline std::vector<std::size_t> denotation(const Model& m, const FormulaPtr& f) {
  std::vector<std::size_t> out;
  for (std::size_t slot = 0; slot < m.slot_count(); ++slot) {
    if (satisfies(m, slot, f)) out.push_back(slot);
  }
  return out;
}

// Orthogonal projector onto the span of the genuine satisfying states (the
// zero pseudo-state spans nothing).
inline CMatrix subspace_projector(const Model& m, const FormulaPtr& f) {
  const auto dim = static_cast<Eigen::Index>(fock_dimension(m.n_modes));
  std::vector<std::size_t> members;
  for (std::size_t slot = 0; slot < m.states.size(); ++slot) {
    if (satisfies(m, slot, f)) members.push_back(slot);
  }
  if (members.empty()) return CMatrix::Zero(dim, dim);

  CMatrix columns(dim, static_cast<Eigen::Index>(members.size()));
  for (std::size_t k = 0; k < members.size(); ++k) {
    columns.col(static_cast<Eigen::Index>(k)) = to_dense(m.states[members[k]]);
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(columns);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const CMatrix q = CMatrix(qr.householderQ()).leftCols(rank);
  return q * q.adjoint();
}

// Relation of an action over the genuine slots. The zero pseudo-state is
// never a source or a target; a basic action that annihilates a state simply
// contributes no pair for it.
inline TransitionRelation transitions(const Model& m, const ActionPtr& action) {
  if (!action) throw std::invalid_argument("null action");
  const Action& a = *action;
  switch (a.kind) {
    case ActionKind::Basic:
    case ActionKind::QuantumTest: {
      TransitionRelation out;
      for (std::size_t s = 0; s < m.states.size(); ++s) {
        for (const StateVector& w : detail::successors_at(m, m.states[s], a)) {
          const auto t = m.find_ray(w);
          if (!t) {
            throw std::runtime_error("action leads outside the model's state list; "
                                     "rebuild the model with this action in the alphabet");
          }
          out.pairs.emplace(s, *t);
        }
      }
      return out;
    }
    case ActionKind::Seq:
      return compose(transitions(m, a.left), transitions(m, a.right));
    case ActionKind::Inverse:
      return transpose(transitions(m, a.left));
    case ActionKind::ClassicalTest: {
      TransitionRelation out;
      for (std::size_t s = 0; s < m.states.size(); ++s) {
        if (satisfies(m, s, a.test)) out.pairs.emplace(s, s);
      }
      return out;
    }
    case ActionKind::Union:
      return relation_union(transitions(m, a.left), transitions(m, a.right));
  }
  return {};
}

// Validity over the genuine states; the zero pseudo-state joins the
// quantification only on request.
inline bool is_valid(const Model& m, const FormulaPtr& f, bool include_zero = false) {
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    if (!satisfies(m, s, f)) return false;
  }
  if (include_zero && m.has_zero && !satisfies(m, m.zero_slot(), f)) return false;
  return true;
}

inline bool is_serial(const Model& m, const ActionPtr& a, bool include_zero = false) {
  const TransitionRelation r = transitions(m, a);
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    if (!r.has_successor(s)) return false;
  }
  // The zero pseudo-state never has successors, so including it denies
  // seriality outright (and the triad stays in agreement: <a>T fails there).
  if (include_zero && m.has_zero) return false;
  return true;
}

// Deterministic formula family used to probe schematic validity claims:
// a fixed pool of random formulas over the modes of the model, depth-bounded.
inline std::vector<FormulaPtr> standard_formula_sample(std::size_t n_modes,
                                                       std::size_t count = 200,
                                                       unsigned seed = 7u) {
  check_mode_count(n_modes);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> mode_dist(0, static_cast<int>(n_modes) - 1);

  // Bounded random actions: ladder basics plus one level of composition.
  const auto random_basic = [&]() {
    const ModeIndex i = static_cast<ModeIndex>(mode_dist(rng));
    return make_basic(rng() % 2 ? creation(i, n_modes) : annihilation(i, n_modes));
  };
  const auto random_action = [&]() {
    switch (rng() % 6) {
      case 0: return make_seq(random_basic(), random_basic());
      case 1: return make_union(random_basic(), random_basic());
      case 2: return make_inverse(random_basic());
      default: return random_basic();
    }
  };

  std::function<FormulaPtr(int)> random_formula = [&](int depth) -> FormulaPtr {
    if (depth <= 0) return rng() % 2 ? make_top() : make_bot();
    switch (rng() % 10) {
      case 0: return make_top();
      case 1: return make_bot();
      case 2: return make_not(random_formula(depth - 1));
      case 3: return make_and(random_formula(depth - 1), random_formula(depth - 1));
      case 4: return make_or(random_formula(depth - 1), random_formula(depth - 1));
      case 5: return make_implies(random_formula(depth - 1), random_formula(depth - 1));
      case 6: return make_box(random_action(), random_formula(depth - 1));
      case 7: return make_diamond(random_action(), random_formula(depth - 1));
      case 8: return make_qnot(random_formula(depth - 1));
      default: return make_diamond(random_basic(), make_top());
    }
  };

  std::vector<FormulaPtr> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_formula(4));
  return out;
}

// The three classical readings of "the action can always run": seriality of
// the relation, validity of <a>T, and validity of the schema [a]A -> <a>A
// probed over a formula sample. On every model the three coincide.
struct SerialityReport {
  bool zero_included = false;
  bool serial = false;
  bool diamond_top_valid = false;
  bool box_implies_diamond_valid = false;
  std::size_t formulas_checked = 0;
  bool all_agree() const {
    return serial == diamond_top_valid && serial == box_implies_diamond_valid;
  }
};

inline SerialityReport seriality_equivalence_report(
    const Model& m, const ActionPtr& a,
    const std::vector<FormulaPtr>& sample, bool include_zero = false) {
  SerialityReport report;
  report.zero_included = include_zero;
  report.serial = is_serial(m, a, include_zero);
  report.diamond_top_valid = is_valid(m, make_diamond(a, make_top()), include_zero);
  report.box_implies_diamond_valid = true;
  for (const FormulaPtr& f : sample) {
    const FormulaPtr schema = make_implies(make_box(a, f), make_diamond(a, f));
    ++report.formulas_checked;
    if (!is_valid(m, schema, include_zero)) {
      report.box_implies_diamond_valid = false;
      break;
    }
  }
  return report;
}

inline SerialityReport seriality_equivalence_report(const Model& m, const ActionPtr& a,
                                                    bool include_zero = false) {
  return seriality_equivalence_report(m, a, standard_formula_sample(m.n_modes), include_zero);
}

// Per-term executability echo of a sum applied at one state: whether the
// whole operator can run there, whether each summand can, whether the whole
// agrees with the disjunction of the parts, and — when the operator is a
// number or hole operator X†X — whether it can run exactly when X can.
struct ExecutabilityReport {
  bool whole_executable = false;
  std::vector<bool> component_executable;
  bool disjunction_of_components = false;
  bool whole_matches_disjunction = false;
  std::optional<bool> adjoint_pair_agrees;  // set when O == X†X for a ladder X

  std::size_t executable_count() const {
    std::size_t n = 0;
    for (const bool b : component_executable) n += b ? 1 : 0;
    return n;
  }
};

inline ExecutabilityReport executability_analysis(const Model& m, std::size_t slot,
                                                  const OperatorExpr& op,
                                                  const std::vector<OperatorExpr>& components) {
  const auto executable = [&](const OperatorExpr& o) {
    return satisfies(m, slot, make_diamond(make_basic(o), make_top()));
  };
  ExecutabilityReport report;
  report.whole_executable = executable(op);
  for (const OperatorExpr& c : components) {
    report.component_executable.push_back(executable(c));
  }
  report.disjunction_of_components = false;
  for (const bool b : report.component_executable) {
    report.disjunction_of_components = report.disjunction_of_components || b;
  }
  report.whole_matches_disjunction =
      report.whole_executable == report.disjunction_of_components;

  for (ModeIndex i = 0; i < m.n_modes; ++i) {
    if (op == propagator(i, m.n_modes)) {
      report.adjoint_pair_agrees =
          report.whole_executable == executable(annihilation(i, m.n_modes));
      break;
    }
    if (op == propagator_perp(i, m.n_modes)) {
      report.adjoint_pair_agrees =
          report.whole_executable == executable(creation(i, m.n_modes));
      break;
    }
  }
  return report;
}

inline ExecutabilityReport executability_analysis(const Model& m, std::size_t slot,
                                                  const OperatorExpr& op) {
  return executability_analysis(m, slot, op, expand_terms(op));
}

}  // namespace fockdl
