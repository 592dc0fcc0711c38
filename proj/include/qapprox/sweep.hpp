#pragma once
//------------------------------------------------------------------------------
// Parameter sweeps over (a, k, phi) with a fixed state set.
//
// CSV columns (stable):  param,D_analytic,D_oracle,support,branch
//   param        swept value
//   D_analytic   convex_solver::solve distance
//   D_oracle     projected-gradient distance, empty when the oracle is off
//   support      0-based indices with positive weight, joined by ';'
//   branch       solver branch tag
// Floats carry 17 significant digits.
//------------------------------------------------------------------------------
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloch.hpp"
#include "convex_solver.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "problem_io.hpp"

namespace qapprox {

enum class SweepParam { A, K, Phi };

inline std::string to_string(SweepParam p) {
  switch (p) {
  case SweepParam::A: return "a";
  case SweepParam::K: return "k";
  case SweepParam::Phi: return "phi";
  }
  return "?";
}

inline SweepParam parse_sweep_param(const std::string& s) {
  if (s == "a") return SweepParam::A;
  if (s == "k") return SweepParam::K;
  if (s == "phi") return SweepParam::Phi;
  throw ParseError("--param", "expected a, k or phi, got '" + s + "'");
}

/// Inclusive range start:stop:step.
struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
};

/// "start:stop:step"; each part may carry a "pi" suffix.
inline SweepRange parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw ParseError("--range", "expected start:stop:step, got '" + text + "'");
  return {parse_angle(parts[0], "--range start"), parse_angle(parts[1], "--range stop"),
          parse_angle(parts[2], "--range step")};
}

struct SweepSpec {
  StateSet states;
  SweepParam param = SweepParam::A;
  SweepRange range;
  /// Values of the two parameters that are not swept.
  TargetParams fixed;
  bool oracle = false;
  Tolerances tolerances;
  OracleConfig oracle_config;
};

struct SweepRow {
  double param = 0.0;
  double d_analytic = 0.0;
  std::optional<double> d_oracle;
  std::vector<std::size_t> support;
  Branch branch = Branch::Interior;
};

/// Grid points of an inclusive range; the last point is snapped to stop when
/// it lands within 1e-9 steps of it.
inline std::vector<double> sweep_grid(const SweepRange& r) {
  if (!std::isfinite(r.start) || !std::isfinite(r.stop) || !std::isfinite(r.step))
    throw DomainError("sweep range has non-finite values");
  if (!(r.step > 0.0)) throw DomainError("sweep step must be > 0");
  if (r.stop < r.start) throw DomainError("sweep stop is below start");
  const double span = (r.stop - r.start) / r.step;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = r.start + static_cast<double>(i) * r.step;
  if (std::abs(g.back() - r.stop) <= 1e-9 * r.step) g.back() = r.stop;
  return g;
}

inline TargetParams sweep_point(const SweepSpec& spec, double v) {
  TargetParams t = spec.fixed;
  switch (spec.param) {
  case SweepParam::A: t.a = v; break;
  case SweepParam::K: t.k = v; break;
  case SweepParam::Phi: t.phi = v; break;
  }
  return t;
}

namespace detail {

template <class E>
[[noreturn]] void rethrow_at(const E& e, const std::string& where) {
  throw E(where + ": " + e.what());
}

} // namespace detail

/// One row per grid point, in grid order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.states.empty()) throw ContractError("run_sweep: the state set is empty");
  const auto grid = sweep_grid(spec.range);
  // Domain check up front so a bad range fails before any work.
  check_params(sweep_point(spec, grid.front()));
  check_params(sweep_point(spec, grid.back()));

  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double v : grid) {
    const std::string where = to_string(spec.param) + " = " + std::to_string(v);
    try {
      const BlochVector target = bloch_from_params(sweep_point(spec, v));
      const auto res = solve(target, spec.states, spec.tolerances);
      SweepRow row{v, res.distance, std::nullopt, res.support, res.branch};
      if (spec.oracle) row.d_oracle = oracle_solve(target, spec.states, spec.oracle_config).distance;
      rows.push_back(std::move(row));
    } catch (const OracleNonConvergence& e) {
      throw OracleNonConvergence(where + ": " + e.what(), e.iterations());
    } catch (const DomainError& e) {
      detail::rethrow_at(e, where);
    } catch (const ContractError& e) {
      detail::rethrow_at(e, where);
    } catch (const ValidationError& e) {
      detail::rethrow_at(e, where);
    }
  }
  return rows;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline std::string join_support(const std::vector<std::size_t>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(s[i]);
  }
  return out;
}

inline constexpr const char* kSweepCsvHeader = "param,D_analytic,D_oracle,support,branch";

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.param) << ',' << format_double(r.d_analytic) << ','
       << (r.d_oracle ? format_double(*r.d_oracle) : std::string()) << ','
       << join_support(r.support) << ',' << to_string(r.branch) << '\n';
  }
}

inline nlohmann::json sweep_to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  nlohmann::json doc;
  doc["param"] = to_string(spec.param);
  doc["range"] = {{"start", spec.range.start}, {"stop", spec.range.stop}, {"step", spec.range.step}};
  doc["fixed"] = {{"a", spec.fixed.a}, {"k", spec.fixed.k}, {"phi", spec.fixed.phi}};
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"param", r.param},
                        {"D_analytic", r.d_analytic},
                        {"support", r.support},
                        {"branch", std::string(to_string(r.branch))}};
    j["D_oracle"] = r.d_oracle ? nlohmann::json(*r.d_oracle) : nlohmann::json(nullptr);
    out.push_back(std::move(j));
  }
  doc["rows"] = std::move(out);
  return doc;
}

} // namespace qapprox
