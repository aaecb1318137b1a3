#pragma once

// Electromagnetic phase factors on a plane threaded by idealized solenoid
// defects. A defect at position d carrying flux Φ contributes the vector
// potential (Φ/2π)·(−y, x)/r² centered at d, whose line integral along a
// directed segment is (Φ/2π) times the signed angle the segment subtends at
// d. Summing those angles is exact up to rounding and immune to the
// stiffness a quadrature would meet near a defect.

#include <cmath>
#include <numbers>

#include "fockdl/semantics.hpp"

namespace fockdl {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

inline bool same_point(PlanePoint a, PlanePoint b) { return a.x == b.x && a.y == b.y; }

struct FluxDefect {
  PlanePoint position;
  double flux = 0.0;  // phase accumulated per counterclockwise loop, radians
};

struct GaugeField {
  std::vector<FluxDefect> defects;
};

struct PathPolyline {
  std::vector<PlanePoint> vertices;
};

namespace detail {

inline void check_field(const GaugeField& f) {
  for (const FluxDefect& d : f.defects) {
    if (!std::isfinite(d.position.x) || !std::isfinite(d.position.y) ||
        !std::isfinite(d.flux)) {
      throw std::invalid_argument("defect coordinates and flux must be finite");
    }
  }
  for (std::size_t i = 0; i < f.defects.size(); ++i) {
    for (std::size_t j = i + 1; j < f.defects.size(); ++j) {
      if (same_point(f.defects[i].position, f.defects[j].position)) {
        throw std::invalid_argument("defect positions must be pairwise distinct");
      }
    }
  }
}

inline void check_polyline(const PathPolyline& p) {
  if (p.vertices.size() < 2) {
    throw std::invalid_argument("a path needs at least two vertices");
  }
  for (const PlanePoint& v : p.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw std::invalid_argument("path vertices must be finite");
    }
  }
  for (std::size_t k = 0; k + 1 < p.vertices.size(); ++k) {
    if (same_point(p.vertices[k], p.vertices[k + 1])) {
      throw std::invalid_argument("consecutive path vertices must be distinct");
    }
  }
}

// Signed angle subtended at c by the directed segment p -> q, in (−π, π).
// A segment can only cross the cut if it passes through c itself.
inline double subtended_angle(PlanePoint c, PlanePoint p, PlanePoint q) {
  const double ux = p.x - c.x;
  const double uy = p.y - c.y;
  const double vx = q.x - c.x;
  const double vy = q.y - c.y;
  const double cross = ux * vy - uy * vx;
  const double dot = ux * vx + uy * vy;
  if (cross == 0.0 && dot <= 0.0) {
    throw std::domain_error("path passes through a defect");
  }
  return std::atan2(cross, dot);
}

inline double subtended_total(PlanePoint c, const PathPolyline& p) {
  double angle = 0.0;
  for (std::size_t k = 0; k + 1 < p.vertices.size(); ++k) {
    angle += subtended_angle(c, p.vertices[k], p.vertices[k + 1]);
  }
  return angle;
}

}  // namespace detail

inline double line_integral(const GaugeField& f, const PathPolyline& p) {
  detail::check_field(f);
  detail::check_polyline(p);
  double total = 0.0;
  for (const FluxDefect& d : f.defects) {
    total += d.flux / (2.0 * std::numbers::pi) * detail::subtended_total(d.position, p);
  }
  return total;
}

inline PhaseFactor phase_factor(const GaugeField& f, const PathPolyline& p) {
  return std::polar(1.0, line_integral(f, p));
}

// Turns of a closed polyline around a point; the angle sum of a closed path
// is a multiple of 2π up to rounding, so the nearest integer is exact.
inline int winding_number(const PathPolyline& loop, PlanePoint center) {
  detail::check_polyline(loop);
  if (!same_point(loop.vertices.front(), loop.vertices.back())) {
    throw std::invalid_argument("winding numbers need a closed path");
  }
  const double angle = detail::subtended_total(center, loop);
  return static_cast<int>(std::lround(angle / (2.0 * std::numbers::pi)));
}

struct HolonomyReport {
  Complex u_ji;              // phase acquired along the outbound path
  Complex u_ij;              // phase acquired along the return path
  Complex product;           // u_ij·u_ji, the full-loop phase
  std::vector<int> winding;  // loop turns around each defect, field order
  double deviation = 0.0;    // |1 − product|
};

inline HolonomyReport holonomy(const GaugeField& f, const PathPolyline& outbound,
                               const PathPolyline& return_path) {
  detail::check_field(f);
  detail::check_polyline(outbound);
  detail::check_polyline(return_path);
  if (!same_point(outbound.vertices.back(), return_path.vertices.front()) ||
      !same_point(return_path.vertices.back(), outbound.vertices.front())) {
    throw std::invalid_argument("the return path must join the outbound endpoints");
  }
  HolonomyReport r;
  r.u_ji = phase_factor(f, outbound);
  r.u_ij = phase_factor(f, return_path);
  r.product = r.u_ij * r.u_ji;
  PathPolyline loop{outbound.vertices};
  loop.vertices.insert(loop.vertices.end(), return_path.vertices.begin() + 1,
                       return_path.vertices.end());
  for (const FluxDefect& d : f.defects) {
    r.winding.push_back(winding_number(loop, d.position));
  }
  r.deviation = std::abs(Complex{1.0, 0.0} - r.product);
  return r;
}

// Round trip of one excitation: hop i→j along the outbound path, then j→i
// along the return path. The product of transition projectors acts on the
// occupied-at-i state as multiplication by the loop phase, which is
// observable exactly when the loop encloses flux — even though each hop
// alone is a legal transition for any phase.
struct AbScenarioReport {
  HolonomyReport loop;
  bool self_hop_is_identity = false;   // the stay-put projector with phase 1 is 1̂
  bool survivor_executable = false;    // the round-trip monomial runs at the start state
  Complex survivor_amplitude;          // start-state amplitude after the monomial
  Complex chain_amplitude;             // start-state amplitude after the full projector chain
  bool amplitudes_match_loop = false;  // both equal the loop phase to 1e-12
  bool loop_is_trivial = false;        // |1 − loop phase| ≤ 1e-9
  ExecutabilityReport chain;           // the projector chain's per-term verdicts
};

inline AbScenarioReport ab_scenario(const GaugeField& f, PlanePoint i_point,
                                    PlanePoint j_point, const PathPolyline& outbound,
                                    const PathPolyline& return_path,
                                    std::size_t n_modes = 2) {
  if (n_modes < 2) throw std::invalid_argument("the scenario needs at least two modes");
  check_mode_count(n_modes);
  detail::check_polyline(outbound);
  detail::check_polyline(return_path);
  if (!same_point(outbound.vertices.front(), i_point) ||
      !same_point(outbound.vertices.back(), j_point) ||
      !same_point(return_path.vertices.front(), j_point) ||
      !same_point(return_path.vertices.back(), i_point)) {
    throw std::invalid_argument("paths must connect the i and j points");
  }

  AbScenarioReport r;
  r.loop = holonomy(f, outbound, return_path);

  const OperatorExpr hop_out = transition_projector(1, 0, r.loop.u_ji, n_modes);
  const OperatorExpr hop_back = transition_projector(0, 1, r.loop.u_ij, n_modes);
  const OperatorExpr chain_op = hop_back * hop_out;

  std::vector<OperatorExpr> alphabet;
  for (ModeIndex i = 0; i < n_modes; ++i) {
    alphabet.push_back(creation(i, n_modes));
    alphabet.push_back(annihilation(i, n_modes));
  }
  const Model m = build_model(n_modes, {StateVector::basis(BasisState::vacuum(n_modes))},
                              alphabet, n_modes + 1);
  const StateVector start = StateVector::basis(basis_state({0}, n_modes));
  const std::size_t start_slot = *m.find_ray(start);

  const OperatorExpr survivor = OperatorExpr::from_word(
      r.loop.product, {create_atom(0), annihilate_atom(0)}, n_modes);
  r.self_hop_is_identity =
      transition_projector(0, 0, Complex{1.0, 0.0}, n_modes) == OperatorExpr::identity(n_modes);
  r.survivor_executable =
      satisfies(m, start_slot, make_diamond(make_basic(survivor), make_top()));
  r.survivor_amplitude = inner_product(start, apply(survivor, start));
  r.chain_amplitude = inner_product(start, apply(chain_op, start));
  r.amplitudes_match_loop = std::abs(r.survivor_amplitude - r.loop.product) <= 1e-12 &&
                            std::abs(r.chain_amplitude - r.loop.product) <= 1e-12;
  r.loop_is_trivial = r.loop.deviation <= 1e-9;
  r.chain = executability_analysis(m, start_slot, chain_op);
  return r;
}

}  // namespace fockdl
