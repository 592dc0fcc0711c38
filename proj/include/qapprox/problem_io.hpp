#pragma once
//------------------------------------------------------------------------------
// JSON problem files.
//
//   {
//     "target":  {"bloch": [x, y, z]}  |  {"a": A, "k": K, "phi": PHI},
//     "states":  [{"bloch": [x, y, z], "label": "optional"}, ...],
//     "options": {"oracle_check": false,
//                 "tolerances": {"state": 1e-9, "feasibility": 1e-9,
//                                "degenerate": 1e-12, "tie": 1e-10,
//                                "rank": 1e-9}},
//     "weights": [p1, ..., pN]                  (optional, for reduce)
//   }
//
// PHI is radians, or a string with a "pi" suffix ("1.3580pi").
//------------------------------------------------------------------------------
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bloch.hpp"
#include "convex_solver.hpp"
#include "errors.hpp"

namespace qapprox {

struct ProblemOptions {
  bool oracle_check = false;
  Tolerances tolerances;
};

struct Problem {
  BlochVector target;
  /// Set when the target was given as (a, k, phi).
  std::optional<TargetParams> params;
  StateSet states;
  ProblemOptions options;
  std::optional<Eigen::VectorXd> weights;
  std::vector<std::string> warnings;
};

/// "1.3580pi", "pi", "-0.5pi", or a plain number, in radians.
inline double parse_angle(const std::string& text, const std::string& where = "phi") {
  std::string s = text;
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s.erase(s.size() - 2);
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(where, "cannot read '" + text + "' as a number or a multiple of pi");
  }
  if (used != s.size())
    throw ParseError(where, "cannot read '" + text + "' as a number or a multiple of pi");
  return v * scale;
}

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  return j.get<double>();
}

inline Vec3 json_vec3(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ParseError(where, "expected an array of 3 numbers");
  return {json_number(j[0], where + "[0]"), json_number(j[1], where + "[1]"),
          json_number(j[2], where + "[2]")};
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ParseError(where, "unknown field '" + it.key() + "'");
}

} // namespace detail

/// Parses and validates a problem. States longer than 1 + tolerances.state
/// are rejected, or renormalised with a warning when allow_invalid_states.
inline Problem parse_problem(const std::string& text, bool allow_invalid_states = false) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
  detail::check_keys(doc, {"target", "states", "options", "weights"}, "document");

  Problem p;
  if (doc.contains("options")) {
    const auto& o = doc["options"];
    if (!o.is_object()) throw ParseError("options", "expected an object");
    detail::check_keys(o, {"oracle_check", "tolerances"}, "options");
    if (o.contains("oracle_check")) {
      if (!o["oracle_check"].is_boolean()) throw ParseError("options.oracle_check", "expected a boolean");
      p.options.oracle_check = o["oracle_check"].get<bool>();
    }
    if (o.contains("tolerances")) {
      const auto& t = o["tolerances"];
      if (!t.is_object()) throw ParseError("options.tolerances", "expected an object");
      detail::check_keys(t, {"state", "feasibility", "degenerate", "coincident", "tie", "rank"},
                         "options.tolerances");
      auto& tol = p.options.tolerances;
      auto read = [&](const char* key, double& dst) {
        if (!t.contains(key)) return;
        const std::string where = std::string("options.tolerances.") + key;
        dst = detail::json_number(t[key], where);
        if (!(dst >= 0.0) || !std::isfinite(dst)) throw ParseError(where, "must be a finite value >= 0");
      };
      read("state", tol.state);
      read("feasibility", tol.feasibility);
      read("degenerate", tol.degenerate);
      read("coincident", tol.coincident);
      read("tie", tol.tie);
      read("rank", tol.rank);
    }
  }

  if (!doc.contains("target")) throw ParseError("target", "missing");
  const auto& t = doc["target"];
  if (!t.is_object()) throw ParseError("target", "expected an object");
  if (t.contains("bloch")) {
    detail::check_keys(t, {"bloch"}, "target");
    p.target = BlochVector::checked(detail::json_vec3(t["bloch"], "target.bloch"),
                                    p.options.tolerances.state, "target");
  } else {
    detail::check_keys(t, {"a", "k", "phi"}, "target");
    TargetParams tp;
    for (const char* key : {"a", "k", "phi"})
      if (!t.contains(key)) throw ParseError(std::string("target.") + key, "missing");
    tp.a = detail::json_number(t["a"], "target.a");
    tp.k = detail::json_number(t["k"], "target.k");
    if (t["phi"].is_string())
      tp.phi = parse_angle(t["phi"].get<std::string>(), "target.phi");
    else
      tp.phi = detail::json_number(t["phi"], "target.phi");
    p.target = bloch_from_params(tp);
    p.params = tp;
  }

  if (!doc.contains("states")) throw ParseError("states", "missing");
  const auto& st = doc["states"];
  if (!st.is_array()) throw ParseError("states", "expected an array");
  std::vector<BlochVector> states;
  std::vector<std::string> labels;
  bool any_label = false;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const std::string where = "states[" + std::to_string(i) + "]";
    const auto& e = st[i];
    if (!e.is_object()) throw ParseError(where, "expected an object");
    detail::check_keys(e, {"bloch", "label"}, where);
    if (!e.contains("bloch")) throw ParseError(where + ".bloch", "missing");
    Vec3 v = detail::json_vec3(e["bloch"], where + ".bloch");
    const double n2 = v.squaredNorm();
    if (allow_invalid_states && n2 > 1.0 + p.options.tolerances.state) {
      p.warnings.push_back(where + ": norm " + std::to_string(std::sqrt(n2)) +
                           " > 1, renormalised to the unit sphere");
      v /= std::sqrt(n2);
    }
    states.push_back(BlochVector::checked(v, p.options.tolerances.state, where));
    if (e.contains("label")) {
      if (!e["label"].is_string()) throw ParseError(where + ".label", "expected a string");
      labels.push_back(e["label"].get<std::string>());
      any_label = true;
    } else {
      labels.emplace_back();
    }
  }
  if (!any_label) labels.clear();
  p.states = StateSet(std::move(states), std::move(labels), p.options.tolerances.state);

  if (doc.contains("weights")) {
    const auto& w = doc["weights"];
    if (!w.is_array()) throw ParseError("weights", "expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = detail::json_number(w[i], "weights[" + std::to_string(i) + "]");
    p.weights = v;
  }
  return p;
}

/// Inverse of parse_problem up to formatting. Numbers are written in the
/// shortest form that reads back to the same double.
inline nlohmann::json problem_to_json(const Problem& p) {
  nlohmann::json doc;
  if (p.params)
    doc["target"] = {{"a", p.params->a}, {"k", p.params->k}, {"phi", p.params->phi}};
  else
    doc["target"] = {{"bloch", {p.target.x(), p.target.y(), p.target.z()}}};
  nlohmann::json states = nlohmann::json::array();
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    nlohmann::json e = {{"bloch", {p.states[i].x(), p.states[i].y(), p.states[i].z()}}};
    if (!p.states.label(i).empty()) e["label"] = p.states.label(i);
    states.push_back(std::move(e));
  }
  doc["states"] = std::move(states);
  const auto& tol = p.options.tolerances;
  doc["options"] = {{"oracle_check", p.options.oracle_check},
                    {"tolerances",
                     {{"state", tol.state},
                      {"feasibility", tol.feasibility},
                      {"degenerate", tol.degenerate},
                      {"coincident", tol.coincident},
                      {"tie", tol.tie},
                      {"rank", tol.rank}}}};
  if (p.weights) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.weights->size(); ++i) w.push_back((*p.weights)[i]);
    doc["weights"] = std::move(w);
  }
  return doc;
}

inline std::string emit_problem(const Problem& p) { return problem_to_json(p).dump(2) + "\n"; }

} // namespace qapprox
