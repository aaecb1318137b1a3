#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fockdl/io.hpp"

namespace fockdl::cli {

constexpr int kExitOk = 0;         // command succeeded / assertions hold
constexpr int kExitAssertion = 1;  // an --assert-valid or demo assertion failed
constexpr int kExitUsage = 2;      // bad arguments, unparsable input, missing file

// FOCKDL_TOL overrides the ray-identification tolerance used when building
// closures and matching transition targets.
inline double ray_tolerance_from_env() {
  const char* env = std::getenv("FOCKDL_TOL");
  if (env == nullptr || *env == '\0') return kDefaultRayTol;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !std::isfinite(v) || v <= 0.0)
    throw std::invalid_argument("FOCKDL_TOL must be a positive real number, got '" +
                                std::string(env) + "'");
  return v;
}

namespace detail {

inline const char* yes_no(bool b) { return b ? "yes" : "no"; }

// Collects PASS/FAIL lines for demo assertions.
struct Assertions {
  std::ostream& out;
  bool ok = true;

  void expect(bool condition, const std::string& claim) {
    out << (condition ? "PASS " : "FAIL ") << claim << '\n';
    if (!condition) ok = false;
  }
};

// The full occupation-basis closure generated from the vacuum by every ladder
// operator; the workhorse model for the demos.
inline Model ladder_closure(std::size_t n_modes, double ray_tol) {
  std::vector<OperatorExpr> alphabet;
  for (ModeIndex i = 0; i < n_modes; ++i) {
    alphabet.push_back(creation(i, n_modes));
    alphabet.push_back(annihilation(i, n_modes));
  }
  return build_model(n_modes, {StateVector::basis(BasisState::vacuum(n_modes))}, alphabet,
                     n_modes + 1, true, ray_tol);
}

inline std::string vacuum_formula_text(std::size_t n_modes) {
  std::string text;
  for (ModeIndex i = 0; i < n_modes; ++i) {
    if (i > 0) text += " & ";
    text += "<h(adag(" + std::to_string(i) + "))>T";
  }
  return text;
}

inline std::string zero_formula_text(std::size_t n_modes) {
  std::string text;
  for (ModeIndex i = 0; i < n_modes; ++i) {
    const std::string s = std::to_string(i);
    if (i > 0) text += " & ";
    text += "!<h(a(" + s + "))>T & !<h(adag(" + s + "))>T";
  }
  return text;
}

}  // namespace detail

// --- check -------------------------------------------------------------------

inline int run_check(const std::string& model_path, const std::vector<std::string>& formulas,
                     bool assert_valid, const std::string& format, std::ostream& out) {
  const double tol = ray_tolerance_from_env();
  const ModelSpec spec = model_spec_from_json(read_json_file(model_path));
  const Model m = model_from_spec(spec, tol);

  ParseOptions opts;
  opts.n_modes = m.n_modes;

  struct Row {
    std::string text;
    FormulaPtr formula;
    std::vector<bool> truth;
    bool valid_genuine = true;
    bool valid_with_zero = true;
  };
  std::vector<Row> rows;
  for (const std::string& text : formulas) {
    Row row;
    row.text = text;
    row.formula = parse_formula(text, opts);
    for (std::size_t slot = 0; slot < m.slot_count(); ++slot) {
      const bool holds = satisfies(m, slot, row.formula);
      row.truth.push_back(holds);
      if (!holds) {
        row.valid_with_zero = false;
        if (!m.is_zero_slot(slot)) row.valid_genuine = false;
      }
    }
    rows.push_back(std::move(row));
  }
  bool all_valid = true;
  for (const Row& row : rows) all_valid = all_valid && row.valid_genuine;

  if (format == "json") {
    Json j = Json::object();
    j["command"] = "check";
    j["model"] = model_path;
    j["n_modes"] = m.n_modes;
    j["ray_tolerance"] = round_significant(tol);
    Json names = Json::array();
    for (std::size_t slot = 0; slot < m.slot_count(); ++slot) names.push_back(m.state_name(slot));
    j["states"] = std::move(names);
    Json items = Json::array();
    for (const Row& row : rows) {
      Json item = Json::object();
      item["text"] = row.text;
      item["canonical"] = pretty_print(row.formula);
      Json truth = Json::array();
      for (std::size_t slot = 0; slot < m.slot_count(); ++slot) {
        Json cell = Json::object();
        cell["state"] = m.state_name(slot);
        cell["holds"] = static_cast<bool>(row.truth[slot]);
        truth.push_back(std::move(cell));
      }
      item["truth"] = std::move(truth);
      item["valid_genuine"] = row.valid_genuine;
      item["valid_including_zero"] = m.has_zero ? Json(row.valid_with_zero) : Json(nullptr);
      items.push_back(std::move(item));
    }
    j["formulas"] = std::move(items);
    j["all_valid_genuine"] = all_valid;
    out << j.dump(2) << '\n';
  } else {
    out << "model: " << m.n_modes << " modes, " << m.states.size() << " states"
        << (m.has_zero ? " + zero" : "") << '\n';
    for (const Row& row : rows) {
      out << "formula: " << row.text << '\n';
      for (std::size_t slot = 0; slot < m.slot_count(); ++slot)
        out << "  " << m.state_name(slot) << ": " << (row.truth[slot] ? "true" : "false") << '\n';
      out << "  valid on genuine states: " << detail::yes_no(row.valid_genuine) << '\n';
    }
    if (assert_valid)
      out << "assertion: " << (all_valid ? "all formulas are valid" : "some formula fails")
          << '\n';
  }
  return (assert_valid && !all_valid) ? kExitAssertion : kExitOk;
}

// --- expand ------------------------------------------------------------------

inline int run_expand(const std::string& text, std::size_t n_modes_hint,
                      const std::string& format, std::ostream& out) {
  ParseOptions opts;
  if (n_modes_hint > 0) opts.n_modes = n_modes_hint;
  const OperatorExpr e = parse_opexpr(text, opts);
  if (format == "json") {
    Json j = Json::object();
    j["command"] = "expand";
    j["input"] = text;
    j["canonical"] = to_string(e);
    j["n_modes"] = e.n_modes();
    Json terms = Json::array();
    for (const NormalTerm& t : e.terms()) {
      Json term = Json::object();
      term["coefficient"] = complex_to_json(t.coeff);
      term["creators"] = t.creators;
      term["annihilators"] = t.annihilators;
      terms.push_back(std::move(term));
    }
    j["terms"] = std::move(terms);
    out << j.dump(2) << '\n';
  } else {
    out << to_string(e) << '\n';
  }
  return kExitOk;
}

// --- model-build -------------------------------------------------------------

inline int run_model_build(const std::string& spec_path, const std::string& out_path,
                           std::ostream& out) {
  const double tol = ray_tolerance_from_env();
  const ModelSpec spec = model_spec_from_json(read_json_file(spec_path));
  const Model m = model_from_spec(spec, tol);
  Json j = model_to_json(spec, m);
  j["closed"] = is_closed(m);
  j["state_count"] = m.states.size();
  write_json_file(out_path, j);
  out << "built " << m.states.size() << " states" << (m.has_zero ? " + zero" : "") << " into '"
      << out_path << "'" << (is_closed(m) ? "" : " (closure incomplete at this depth)") << '\n';
  return kExitOk;
}

// --- holonomy ----------------------------------------------------------------

inline int run_holonomy(const std::string& scenario_path, std::size_t n_modes,
                        const std::string& format, std::ostream& out) {
  const GaugeScenario sc = scenario_from_json(read_json_file(scenario_path));
  const AbScenarioReport r =
      ab_scenario(sc.field, sc.i_point, sc.j_point, sc.outbound, sc.return_path, n_modes);
  if (format == "json") {
    Json j = ab_report_to_json(r);
    j["command"] = "holonomy";
    j["scenario"] = scenario_path;
    out << j.dump(2) << '\n';
  } else {
    out << "u_ji: " << complex_to_text(r.loop.u_ji) << '\n';
    out << "u_ij: " << complex_to_text(r.loop.u_ij) << '\n';
    out << "loop product: " << complex_to_text(r.loop.product) << '\n';
    out << "winding:";
    for (int w : r.loop.winding) out << ' ' << w;
    if (r.loop.winding.empty()) out << " (no defects)";
    out << '\n';
    out << "deviation from identity: " << real_to_text(r.loop.deviation) << '\n';
    out << "loop is trivial: " << detail::yes_no(r.loop_is_trivial) << '\n';
    out << "self-hop with unit phase is the identity: " << detail::yes_no(r.self_hop_is_identity)
        << '\n';
    out << "round-trip monomial executable: " << detail::yes_no(r.survivor_executable) << '\n';
    out << "survivor amplitude: " << complex_to_text(r.survivor_amplitude) << '\n';
    out << "chain amplitude: " << complex_to_text(r.chain_amplitude) << '\n';
    out << "amplitudes match the loop phase: " << detail::yes_no(r.amplitudes_match_loop) << '\n';
    out << "chain executable as a whole: " << detail::yes_no(r.chain.whole_executable) << '\n';
    out << "executable chain branches: " << r.chain.executable_count() << " of "
        << r.chain.component_executable.size() << '\n';
  }
  return kExitOk;
}

// --- demos -------------------------------------------------------------------

inline const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {
      "vacuum", "zero", "projective", "lagrangian", "seriality", "transition-chain", "ab"};
  return names;
}

inline int run_demo(const std::string& name, double flux, std::size_t n_modes,
                    std::ostream& out, std::ostream& err) {
  const double tol = ray_tolerance_from_env();
  detail::Assertions t{out};
  out << "demo: " << name << '\n';

  if (name == "vacuum" || name == "zero") {
    if (n_modes < 2 || n_modes > 4) {
      err << "error: this demo supports --modes between 2 and 4\n";
      return kExitUsage;
    }
    const Model m = detail::ladder_closure(n_modes, tol);
    ParseOptions opts;
    opts.n_modes = n_modes;
    if (name == "vacuum") {
      const std::string text = detail::vacuum_formula_text(n_modes);
      out << "formula: " << text << '\n';
      const FormulaPtr f = parse_formula(text, opts);
      const std::vector<std::size_t> where = denotation(m, f);
      std::size_t vac_slot = m.slot_count();
      for (std::size_t slot = 0; slot < m.states.size(); ++slot)
        if (m.state_name(slot) == std::string(n_modes, '0')) vac_slot = slot;
      t.expect(where == std::vector<std::size_t>{vac_slot},
               "the every-creator-can-run formula holds exactly at the empty occupancy state");
      t.expect(!satisfies(m, m.zero_slot(), f),
               "the zero pseudo-state cannot run any creator");
    } else {
      const std::string text = detail::zero_formula_text(n_modes);
      out << "formula: " << text << '\n';
      const FormulaPtr f = parse_formula(text, opts);
      const std::vector<std::size_t> where = denotation(m, f);
      t.expect(where == std::vector<std::size_t>{m.zero_slot()},
               "the no-ladder-operator-can-run formula holds exactly at the zero pseudo-state");
      bool genuine_all_live = true;
      for (std::size_t slot = 0; slot < m.states.size(); ++slot)
        genuine_all_live = genuine_all_live && !satisfies(m, slot, f);
      t.expect(genuine_all_live, "every genuine state can run some ladder operator");
    }
  } else if (name == "projective") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::vector<Complex> phases;
    for (int k = 0; k < 18; ++k) phases.push_back(std::polar(1.0, angle(rng)));
    phases.push_back(Complex{0.0, 0.0});
    phases.push_back(std::polar(10.0, angle(rng)));
    bool idempotent = true;
    for (const Complex& u : phases) {
      const OperatorExpr p = transition_projector(1, 0, u, 3);
      idempotent = idempotent && (p * p == p);
    }
    t.expect(idempotent,
             "P*P equals P exactly for 20 random hop coefficients (including 0 and modulus 10)");
    t.expect(transition_projector(0, 0, Complex{1.0, 0.0}, 3) == OperatorExpr::identity(3),
             "the stay-put projector with unit phase is the identity");
  } else if (name == "lagrangian") {
    std::mt19937 rng(11u);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (std::size_t n = 2; n <= 4; ++n) {
      bool all = true;
      for (ModeIndex j = 0; j < n; ++j)
        for (ModeIndex i = 0; i < n; ++i) {
          if (i == j) continue;
          const Complex u = std::polar(1.0, angle(rng));
          const OperatorExpr lhs =
              OperatorExpr::identity(n) + Complex{0.0, 1.0} * local_lagrangian(j, i, u, n);
          all = all && (lhs == transition_projector(j, i, u, n));
        }
      t.expect(all, "identity + i*L equals the transition projector exactly for every mode pair (" +
                        std::to_string(n) + " modes)");
    }
  } else if (name == "seriality") {
    const Model m = detail::ladder_closure(2, tol);
    ParseOptions opts;
    opts.n_modes = 2;
    const auto sample = standard_formula_sample(2);
    const SerialityReport lower =
        seriality_equivalence_report(m, parse_action("h(a(0))", opts), sample, false);
    t.expect(lower.all_agree() && !lower.serial,
             "bare annihilation: all three readings agree it is not serial");
    const ActionPtr either = parse_action("h(a(0)) U h(adag(0))", opts);
    const SerialityReport both = seriality_equivalence_report(m, either, sample, false);
    t.expect(both.all_agree() && both.serial,
             "lower-or-raise union: all three readings agree it is serial");
    const SerialityReport with_zero = seriality_equivalence_report(m, either, sample, true);
    t.expect(with_zero.all_agree() && !with_zero.serial,
             "adding the zero pseudo-state flips all three readings together");
  } else if (name == "transition-chain") {
    std::mt19937 rng(20260814u);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const Complex uji = std::polar(1.0, angle(rng));
    const Complex ukj = std::polar(1.0, angle(rng));
    const std::size_t n = 3;
    out << "hop phases: u_ji = " << complex_to_text(uji) << ", u_kj = " << complex_to_text(ukj)
        << '\n';
    const OperatorExpr chain =
        transition_projector(2, 1, ukj, n) * transition_projector(1, 0, uji, n);
    const OperatorExpr climb10 =
        OperatorExpr::from_word(uji, {create_atom(1), annihilate_atom(0)}, n);
    const OperatorExpr climb21 =
        OperatorExpr::from_word(ukj, {create_atom(2), annihilate_atom(1)}, n);
    const std::vector<OperatorExpr> branches = {
        propagator_perp(1, n) * propagator_perp(0, n), climb21 * propagator_perp(0, n),
        propagator_perp(1, n) * climb10, climb21 * climb10};
    t.expect(branches[0] + branches[1] + branches[2] + branches[3] == chain,
             "the four branch products sum to the projector chain exactly");
    t.expect(branches[2].is_zero(),
             "the branch that re-raises the just-emptied mode vanishes symbolically");
    const Model m = detail::ladder_closure(n, tol);
    std::size_t start_slot = m.slot_count();
    for (std::size_t slot = 0; slot < m.states.size(); ++slot)
      if (m.state_name(slot) == "100") start_slot = slot;
    const ExecutabilityReport r = executability_analysis(m, start_slot, chain, branches);
    t.expect(!r.component_executable[0] && !r.component_executable[1] &&
                 !r.component_executable[2] && r.component_executable[3],
             "exactly the double-hop branch is executable at |100>");
    t.expect(r.whole_executable && r.whole_matches_disjunction,
             "the whole chain is executable and matches the branch disjunction");
    const StateVector start = StateVector::basis(BasisState::from_string("100"));
    const StateVector target = StateVector::basis(BasisState::from_string("001"));
    const Complex amp = inner_product(target, apply(chain, start));
    out << "surviving amplitude: " << complex_to_text(amp) << '\n';
    t.expect(std::abs(amp - ukj * uji) <= 1e-12,
             "the surviving amplitude is the product of the hop phases");
  } else if (name == "ab") {
    if (n_modes < 2 || n_modes > 4) {
      err << "error: this demo supports --modes between 2 and 4\n";
      return kExitUsage;
    }
    const GaugeField field{{FluxDefect{PlanePoint{0.0, 0.0}, flux}}};
    const PlanePoint pi{-1.0, 0.0};
    const PlanePoint pj{1.0, 0.0};
    const PathPolyline outbound{{pi, PlanePoint{0.0, -1.0}, pj}};
    const PathPolyline back{{pj, PlanePoint{0.0, 1.0}, pi}};
    const AbScenarioReport r = ab_scenario(field, pi, pj, outbound, back, n_modes);
    const Complex expected = std::polar(1.0, flux);
    out << "flux: " << real_to_text(flux) << '\n';
    out << "loop product: " << complex_to_text(r.loop.product) << '\n';
    out << "deviation from identity: " << real_to_text(r.loop.deviation) << '\n';
    t.expect(std::abs(r.loop.product - expected) <= 1e-9,
             "the loop phase equals exp(i*flux) for the enclosing two-leg loop");
    t.expect(r.self_hop_is_identity, "the stay-put projector with unit phase is the identity");
    t.expect(r.survivor_executable,
             "the round-trip monomial is executable at the occupied start mode");
    t.expect(r.amplitudes_match_loop,
             "chain and monomial amplitudes both equal the loop phase");
    t.expect(std::abs(r.loop.deviation - std::abs(1.0 - expected)) <= 1e-9,
             "the interference deviation matches |1 - exp(i*flux)|");
    t.expect(r.chain.whole_matches_disjunction,
             "whole-chain executability matches the disjunction of its branches");
  } else {
    err << "error: unknown demo '" << name << "'\n";
    return kExitUsage;
  }

  out << "result: " << (t.ok ? "ok" : "failed") << '\n';
  return t.ok ? kExitOk : kExitAssertion;
}

// --- driver ------------------------------------------------------------------

// Runs the command line given as argv[1..] (no program name).  All output goes
// to the supplied streams so tests can capture it.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"model checker for a dynamic logic over finite-mode fermionic Fock spaces"};
  app.name("fockdl");
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "evaluate formulas over every state of a model");
  std::string model_path;
  std::vector<std::string> formulas;
  bool assert_valid = false;
  std::string check_format = "text";
  check->add_option("--model", model_path, "model JSON file")->required();
  check->add_option("--formula", formulas, "formula to evaluate (repeatable)")->required();
  check->add_flag("--assert-valid", assert_valid,
                  "exit 1 unless every formula holds at every genuine state");
  check->add_option("--format", check_format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* expand = app.add_subcommand("expand", "normal-order an operator expression");
  std::string expr_text;
  std::size_t expand_modes = 0;
  std::string expand_format = "text";
  expand->add_option("expr", expr_text, "operator expression")->required();
  expand->add_option("--modes", expand_modes, "mode count (default: inferred)");
  expand->add_option("--format", expand_format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* build = app.add_subcommand("model-build", "build a closure model from a specification");
  std::string spec_path;
  std::string out_path;
  build->add_option("--spec", spec_path, "model specification JSON file")->required();
  build->add_option("--out", out_path, "output model JSON file")->required();

  auto* demo = app.add_subcommand("demo", "run a named demonstration with checked assertions");
  std::string demo_name;
  double flux = std::numbers::pi;
  std::size_t demo_modes = 0;
  demo->add_option("name", demo_name, "demo name")
      ->required()
      ->check(CLI::IsMember(demo_names()));
  demo->add_option("--flux", flux, "solenoid flux for the interference demo (default pi)");
  demo->add_option("--modes", demo_modes, "mode count where the demo supports it");

  auto* holo = app.add_subcommand("holonomy", "analyze a two-leg loop scenario");
  std::string scenario_path;
  std::size_t holo_modes = 2;
  std::string holo_format = "text";
  holo->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  holo->add_option("--modes", holo_modes, "mode count (default 2)");
  holo->add_option("--format", holo_format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*check) return run_check(model_path, formulas, assert_valid, check_format, out);
    if (*expand) return run_expand(expr_text, expand_modes, expand_format, out);
    if (*build) return run_model_build(spec_path, out_path, out);
    if (*demo) {
      std::size_t modes = demo_modes;
      if (modes == 0) modes = (demo_name == "transition-chain") ? 3 : 2;
      return run_demo(demo_name, flux, modes, out, err);
    }
    if (*holo) return run_holonomy(scenario_path, holo_modes, holo_format, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "error: no subcommand selected\n";
  return kExitUsage;
}

}  // namespace fockdl::cli
