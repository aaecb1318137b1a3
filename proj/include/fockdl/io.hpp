#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockdl/fock.hpp"
#include "fockdl/gauge.hpp"
#include "fockdl/semantics.hpp"
#include "fockdl/syntax.hpp"

namespace fockdl {

// nlohmann's default object is backed by std::map, so serialized documents
// always come out with alphabetically sorted keys -- byte-identical across runs.
using Json = nlohmann::json;

// Rounds to 12 significant digits so serialized numbers are stable and short.
inline double round_significant(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline Json complex_to_json(Complex c) {
  return Json::array({round_significant(c.real()), round_significant(c.imag())});
}

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("a complex number must be a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

// Text rendering used by the human-readable report format: "[re, im]".
inline std::string complex_to_text(Complex c) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "[%.12g, %.12g]", c.real(), c.imag());
  return buf;
}

inline std::string real_to_text(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// --- state vectors -----------------------------------------------------------
//
// A state is an object mapping occupation bitstrings to [re, im] amplitude
// pairs, e.g. {"10": [0.7071067811865476, 0.0], "01": [0.7071067811865476, 0.0]}.

inline Json state_to_json(const StateVector& v) {
  Json obj = Json::object();
  for (const auto& [mask, amp] : v.amplitudes())
    obj[BasisState(mask, v.n_modes()).to_string()] = complex_to_json(amp);
  return obj;
}

inline StateVector state_from_json(const Json& j, std::size_t n_modes) {
  if (!j.is_object())
    throw std::invalid_argument("a state must be an object keyed by occupation bitstrings");
  std::map<OccMask, Complex> amps;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const BasisState basis = BasisState::from_string(it.key());
    if (basis.n_modes() != n_modes)
      throw std::invalid_argument("bitstring '" + it.key() + "' has " +
                                  std::to_string(basis.n_modes()) + " modes, expected " +
                                  std::to_string(n_modes));
    amps[basis.mask()] = complex_from_json(it.value());
  }
  return StateVector(n_modes, std::move(amps));
}

// --- model files -------------------------------------------------------------
//
// A model specification lists the generating data of a closure:
//   {"n_modes": 2, "seeds": [<state>...], "alphabet": ["a(0)", ...],
//    "depth": 3, "include_zero": true}
// Built models re-emit the specification plus a "states" array for inspection;
// the loader ignores that array and rebuilds from the generating data.

struct ModelSpec {
  std::size_t n_modes = 1;
  std::vector<StateVector> seeds;
  std::vector<std::string> alphabet;
  std::size_t depth = 1;
  bool include_zero = true;
};

inline ModelSpec model_spec_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("a model file must be a JSON object");
  for (const char* key : {"n_modes", "seeds", "alphabet", "depth"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("model file is missing the '") + key + "' field");
  ModelSpec spec;
  if (!j["n_modes"].is_number_unsigned() || j["n_modes"].get<std::size_t>() == 0)
    throw std::invalid_argument("'n_modes' must be a positive integer");
  spec.n_modes = j["n_modes"].get<std::size_t>();
  if (!j["seeds"].is_array() || j["seeds"].empty())
    throw std::invalid_argument("'seeds' must be a nonempty array of states");
  for (const Json& s : j["seeds"]) spec.seeds.push_back(state_from_json(s, spec.n_modes));
  if (!j["alphabet"].is_array())
    throw std::invalid_argument("'alphabet' must be an array of operator expressions");
  for (const Json& a : j["alphabet"]) {
    if (!a.is_string()) throw std::invalid_argument("alphabet entries must be strings");
    spec.alphabet.push_back(a.get<std::string>());
  }
  if (!j["depth"].is_number_unsigned() || j["depth"].get<std::size_t>() == 0)
    throw std::invalid_argument("'depth' must be a positive integer");
  spec.depth = j["depth"].get<std::size_t>();
  if (j.contains("include_zero")) {
    if (!j["include_zero"].is_boolean())
      throw std::invalid_argument("'include_zero' must be a boolean");
    spec.include_zero = j["include_zero"].get<bool>();
  }
  return spec;
}

inline Json model_spec_to_json(const ModelSpec& spec) {
  Json j = Json::object();
  j["n_modes"] = spec.n_modes;
  j["seeds"] = Json::array();
  for (const StateVector& s : spec.seeds) j["seeds"].push_back(state_to_json(s));
  j["alphabet"] = spec.alphabet;
  j["depth"] = spec.depth;
  j["include_zero"] = spec.include_zero;
  return j;
}

// Builds the closure described by a specification.  Seeds are normalized on
// load so hand-written files need not carry full-precision amplitudes.
inline Model model_from_spec(const ModelSpec& spec, double ray_tol = kDefaultRayTol) {
  std::vector<StateVector> seeds;
  for (const StateVector& s : spec.seeds) {
    StateVector n = normalize(s);
    if (n.is_zero()) throw std::invalid_argument("a seed state must be nonzero");
    seeds.push_back(std::move(n));
  }
  std::vector<OperatorExpr> alphabet;
  ParseOptions opts;
  opts.n_modes = spec.n_modes;
  for (const std::string& text : spec.alphabet) alphabet.push_back(parse_opexpr(text, opts));
  return build_model(spec.n_modes, seeds, alphabet, spec.depth, spec.include_zero, ray_tol);
}

inline Json model_to_json(const ModelSpec& spec, const Model& m) {
  Json j = model_spec_to_json(spec);
  Json states = Json::array();
  for (std::size_t slot = 0; slot < m.states.size(); ++slot) {
    Json entry = Json::object();
    entry["name"] = m.state_name(slot);
    entry["amplitudes"] = state_to_json(m.state(slot));
    states.push_back(std::move(entry));
  }
  j["states"] = std::move(states);
  return j;
}

// --- gauge scenarios ---------------------------------------------------------
//
// {"defects": [{"pos": [x, y], "flux": r}...], "i": [x, y], "j": [x, y],
//  "outbound": [[x, y]...], "return": [[x, y]...]}

inline PlanePoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("a plane point must be an [x, y] pair");
  return PlanePoint{j[0].get<double>(), j[1].get<double>()};
}

inline PathPolyline polyline_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("a path must be an array of [x, y] points");
  PathPolyline path;
  for (const Json& p : j) path.vertices.push_back(point_from_json(p));
  return path;
}

struct GaugeScenario {
  GaugeField field;
  PlanePoint i_point{};
  PlanePoint j_point{};
  PathPolyline outbound;
  PathPolyline return_path;
};

inline GaugeScenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("a scenario file must be a JSON object");
  for (const char* key : {"defects", "i", "j", "outbound", "return"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("scenario file is missing the '") + key + "' field");
  GaugeScenario sc;
  if (!j["defects"].is_array())
    throw std::invalid_argument("'defects' must be an array of {pos, flux} objects");
  for (const Json& d : j["defects"]) {
    if (!d.is_object() || !d.contains("pos") || !d.contains("flux") || !d["flux"].is_number())
      throw std::invalid_argument("each defect must be an object with 'pos' and numeric 'flux'");
    sc.field.defects.push_back(FluxDefect{point_from_json(d["pos"]), d["flux"].get<double>()});
  }
  sc.i_point = point_from_json(j["i"]);
  sc.j_point = point_from_json(j["j"]);
  sc.outbound = polyline_from_json(j["outbound"]);
  sc.return_path = polyline_from_json(j["return"]);
  return sc;
}

// --- report serialization ----------------------------------------------------

inline Json holonomy_to_json(const HolonomyReport& r) {
  Json j = Json::object();
  j["u_ji"] = complex_to_json(r.u_ji);
  j["u_ij"] = complex_to_json(r.u_ij);
  j["product"] = complex_to_json(r.product);
  j["winding"] = r.winding;
  j["deviation"] = round_significant(r.deviation);
  return j;
}

inline Json executability_to_json(const ExecutabilityReport& r) {
  Json j = Json::object();
  j["whole_executable"] = r.whole_executable;
  j["component_executable"] = r.component_executable;
  j["disjunction_of_components"] = r.disjunction_of_components;
  j["whole_matches_disjunction"] = r.whole_matches_disjunction;
  if (r.adjoint_pair_agrees.has_value())
    j["adjoint_pair_agrees"] = *r.adjoint_pair_agrees;
  else
    j["adjoint_pair_agrees"] = nullptr;
  return j;
}

inline Json ab_report_to_json(const AbScenarioReport& r) {
  Json j = Json::object();
  j["loop"] = holonomy_to_json(r.loop);
  j["loop_is_trivial"] = r.loop_is_trivial;
  j["self_hop_is_identity"] = r.self_hop_is_identity;
  j["survivor_executable"] = r.survivor_executable;
  j["survivor_amplitude"] = complex_to_json(r.survivor_amplitude);
  j["chain_amplitude"] = complex_to_json(r.chain_amplitude);
  j["amplitudes_match_loop"] = r.amplitudes_match_loop;
  j["chain"] = executability_to_json(r.chain);
  return j;
}

inline Json seriality_to_json(const SerialityReport& r) {
  Json j = Json::object();
  j["zero_included"] = r.zero_included;
  j["serial"] = r.serial;
  j["diamond_top_valid"] = r.diamond_top_valid;
  j["box_implies_diamond_valid"] = r.box_implies_diamond_valid;
  j["formulas_checked"] = r.formulas_checked;
  j["all_agree"] = r.all_agree();
  return j;
}

// --- filesystem helpers ------------------------------------------------------

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed to write '" + path + "'");
}

}  // namespace fockdl
