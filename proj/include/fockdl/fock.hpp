#pragma once

// Finite-mode fermionic Fock space: occupation-number basis states and
// sparse complex superpositions. States are compared as rays (up to a
// global phase); the zero vector is a legitimate value of its own.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace fockdl {

using Complex = std::complex<double>;
using ModeIndex = std::size_t;

// Occupation mask; bit i set iff mode i is occupied.
using OccMask = std::uint16_t;

inline constexpr std::size_t kMaxModes = 12;  // dense dimension 4096
inline constexpr double kNormTol = 1e-12;     // below this a vector is the zero vector
inline constexpr double kPruneTol = 1e-14;    // amplitudes below this are pruned
inline constexpr double kDefaultRayTol = 1e-9;

inline void check_mode_count(std::size_t n_modes) {
  if (n_modes > kMaxModes) {
    throw std::invalid_argument("mode count " + std::to_string(n_modes) +
                                " exceeds the cap of " + std::to_string(kMaxModes));
  }
}

inline void check_mode_index(ModeIndex i, std::size_t n_modes) {
  if (i >= n_modes) {
    throw std::out_of_range("mode index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(n_modes) + ")");
  }
}

// One occupation-number basis element |b_{n-1} ... b_1 b_0>, immutable.
class BasisState {
 public:
  BasisState(OccMask mask, std::size_t n_modes) : mask_(mask), n_modes_(n_modes) {
    check_mode_count(n_modes);
    if ((mask >> n_modes) != 0) {
      throw std::out_of_range("occupation mask has bits beyond mode count");
    }
  }

  static BasisState vacuum(std::size_t n_modes) { return BasisState(0, n_modes); }

  OccMask mask() const { return mask_; }
  std::size_t n_modes() const { return n_modes_; }
  bool occupied(ModeIndex i) const {
    check_mode_index(i, n_modes_);
    return (mask_ >> i) & 1u;
  }
  std::size_t particle_count() const { return static_cast<std::size_t>(std::popcount(mask_)); }

  // Mode 0 is the leftmost character.
  std::string to_string() const {
    std::string s(n_modes_, '0');
    for (std::size_t i = 0; i < n_modes_; ++i) {
      if ((mask_ >> i) & 1u) s[i] = '1';
    }
    return s;
  }

  static BasisState from_string(std::string_view bits) {
    check_mode_count(bits.size());
    OccMask mask = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        mask |= static_cast<OccMask>(1u << i);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("basis bitstring must contain only '0'/'1'");
      }
    }
    return BasisState(mask, bits.size());
  }

  friend bool operator==(const BasisState&, const BasisState&) = default;
  friend auto operator<=>(const BasisState&, const BasisState&) = default;

 private:
  OccMask mask_;
  std::size_t n_modes_;
};

inline BasisState basis_state(const std::set<ModeIndex>& occupied, std::size_t n_modes) {
  check_mode_count(n_modes);
  OccMask mask = 0;
  for (ModeIndex i : occupied) {
    check_mode_index(i, n_modes);
    mask |= static_cast<OccMask>(1u << i);
  }
  return BasisState(mask, n_modes);
}

// Sparse superposition over basis states. Immutable after construction;
// not normalized automatically (see normalize()).
class StateVector {
 public:
  explicit StateVector(std::size_t n_modes) : n_modes_(n_modes) { check_mode_count(n_modes); }

  StateVector(std::size_t n_modes, std::map<OccMask, Complex> amplitudes)
      : n_modes_(n_modes), amps_(std::move(amplitudes)) {
    check_mode_count(n_modes);
    for (auto it = amps_.begin(); it != amps_.end();) {
      if ((it->first >> n_modes) != 0) {
        throw std::out_of_range("amplitude mask has bits beyond mode count");
      }
      it = (it->second == Complex{}) ? amps_.erase(it) : std::next(it);
    }
  }

  static StateVector zero(std::size_t n_modes) { return StateVector(n_modes); }

  static StateVector basis(const BasisState& b) {
    return StateVector(b.n_modes(), {{b.mask(), Complex{1.0, 0.0}}});
  }

  std::size_t n_modes() const { return n_modes_; }
  const std::map<OccMask, Complex>& amplitudes() const { return amps_; }
  bool is_zero() const { return amps_.empty(); }

  Complex amplitude(OccMask mask) const {
    auto it = amps_.find(mask);
    return it == amps_.end() ? Complex{} : it->second;
  }

  // True iff a single basis amplitude carries all the weight.
  bool is_basis_like(double tol = kNormTol) const {
    return amps_.size() == 1 && std::abs(std::abs(amps_.begin()->second) - 1.0) < tol;
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::size_t n_modes_;
  std::map<OccMask, Complex> amps_;
};

inline void check_same_space(const StateVector& u, const StateVector& v) {
  if (u.n_modes() != v.n_modes()) {
    throw std::invalid_argument("state vectors live in different mode spaces");
  }
}

inline StateVector operator+(const StateVector& u, const StateVector& v) {
  check_same_space(u, v);
  std::map<OccMask, Complex> amps = u.amplitudes();
  for (const auto& [mask, a] : v.amplitudes()) amps[mask] += a;
  return StateVector(u.n_modes(), std::move(amps));
}

inline StateVector operator*(Complex c, const StateVector& v) {
  std::map<OccMask, Complex> amps;
  if (c != Complex{}) {
    for (const auto& [mask, a] : v.amplitudes()) amps.emplace(mask, c * a);
  }
  return StateVector(v.n_modes(), std::move(amps));
}

inline StateVector operator-(const StateVector& u, const StateVector& v) {
  return u + Complex{-1.0, 0.0} * v;
}

inline double norm(const StateVector& v) {
  double n2 = 0.0;
  for (const auto& [mask, a] : v.amplitudes()) n2 += std::norm(a);
  return std::sqrt(n2);
}

// Hermitian inner product, conjugate-linear in the first argument.
inline Complex inner_product(const StateVector& u, const StateVector& v) {
  check_same_space(u, v);
  Complex acc{};
  for (const auto& [mask, a] : u.amplitudes()) acc += std::conj(a) * v.amplitude(mask);
  return acc;
}

// Returns the zero vector when ||v|| < kNormTol, else v/||v|| with tiny
// amplitudes pruned. Skips the division when the norm is already 1 to
// machine precision, which makes normalize exactly idempotent.
inline StateVector normalize(const StateVector& v) {
  double n = norm(v);
  if (n < kNormTol) return StateVector::zero(v.n_modes());
  bool unit = std::abs(n - 1.0) <= 1e-13;
  std::map<OccMask, Complex> amps;
  for (const auto& [mask, a] : v.amplitudes()) {
    Complex scaled = unit ? a : a / n;
    if (std::abs(scaled) >= kPruneTol) amps.emplace(mask, scaled);
  }
  return StateVector(v.n_modes(), std::move(amps));
}

// Ray identity: |<u|v>| > 1 - tol for normalized inputs; two zero vectors
// are equal as rays.
inline bool ray_equal(const StateVector& u, const StateVector& v, double tol = kDefaultRayTol) {
  if (u.is_zero() || v.is_zero()) return u.is_zero() && v.is_zero();
  return std::abs(inner_product(u, v)) > 1.0 - tol;
}

}  // namespace fockdl
