// qapprox: command-line front end.
//
//   qapprox approximate --problem FILE [--oracle] [--format json|csv]
//   qapprox sweep (--fixture NAME | --problem FILE) --param a|k|phi
//                 --range START:STOP:STEP [--a V] [--k V] [--phi V]
//                 [--oracle] [--format csv|json] --out FILE
//   qapprox reduce --problem FILE [--weights w1,...,wN] [--format text|json]
//   qapprox rank --problem FILE
//   qapprox fixtures
//
// Exit codes: 0 ok, 2 parse/validation/domain error, 3 solver contract error,
// 4 oracle non-convergence.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qapprox/qapprox.hpp"

namespace {

using namespace qapprox;

constexpr int kExitInput = 2;
constexpr int kExitContract = 3;
constexpr int kExitOracle = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem load_problem(const std::string& path, bool allow_invalid) {
  auto p = parse_problem(read_file(path), allow_invalid);
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
  return p;
}

Eigen::VectorXd parse_weights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError("--weights", "cannot read '" + item + "' as a number");
    }
    if (used != item.size()) throw ParseError("--weights", "cannot read '" + item + "' as a number");
    v.push_back(x);
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, "cannot open file for writing");
  out << text;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closest convex mixture of qubit states under trace distance"};
  app.require_subcommand(1);
  bool allow_invalid = false;
  app.add_flag("--allow-invalid-states", allow_invalid,
               "Renormalise states with norm > 1 instead of rejecting them");

  std::string problem_path, fixture_name, format, out_path, param, range, weights_text;
  std::string a_text, k_text, phi_text;
  bool oracle = false;

  auto* approx = app.add_subcommand("approximate", "Solve one problem file");
  approx->add_option("--problem", problem_path, "Problem JSON")->required();
  approx->add_flag("--oracle", oracle, "Cross-check with the numerical oracle");
  approx->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->default_val("json");

  auto* sweep = app.add_subcommand("sweep", "Sweep one target parameter");
  auto* fx = sweep->add_option("--fixture", fixture_name, "Built-in state set");
  auto* pr = sweep->add_option("--problem", problem_path, "Problem JSON supplying the states");
  fx->excludes(pr);
  sweep->add_option("--param", param, "a, k or phi")->required()->check(CLI::IsMember({"a", "k", "phi"}));
  sweep->add_option("--range", range, "start:stop:step, inclusive; 'pi' suffix allowed")->required();
  sweep->add_option("--a", a_text, "Fixed a");
  sweep->add_option("--k", k_text, "Fixed k");
  sweep->add_option("--phi", phi_text, "Fixed phi (radians, or e.g. 1.358pi)");
  sweep->add_flag("--oracle", oracle, "Fill the D_oracle column");
  sweep->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");
  sweep->add_option("--out", out_path, "Output file, '-' for stdout")->required();

  auto* red = app.add_subcommand("reduce", "Caratheodory reduction of a decomposition");
  red->add_option("--problem", problem_path, "Problem JSON")->required();
  red->add_option("--weights", weights_text, "Comma-separated weights (else the file's 'weights')");
  red->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->default_val("text");

  auto* rank_cmd = app.add_subcommand("rank", "Rank of the decomposition matrix");
  rank_cmd->add_option("--problem", problem_path, "Problem JSON")->required();

  auto* list = app.add_subcommand("fixtures", "List built-in state sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*approx) {
      const auto p = load_problem(problem_path, allow_invalid);
      const auto res = solve(p.target, p.states, p.options.tolerances);
      std::optional<OracleResult> check;
      if (oracle || p.options.oracle_check) check = oracle_solve(p.target, p.states);
      if (format == "csv")
        std::cout << approximation_to_csv(res, check);
      else
        std::cout << approximation_to_json(p.target, res, check).dump(2) << '\n';
    } else if (*sweep) {
      if (fixture_name.empty() && problem_path.empty())
        throw ParseError("sweep", "one of --fixture or --problem is required");
      SweepSpec spec;
      if (!fixture_name.empty()) {
        auto f = fixture(fixture_name, {allow_invalid});
        for (const auto& w : f.warnings) std::cerr << "warning: " << w << '\n';
        spec.states = f.states;
      } else {
        const auto p = load_problem(problem_path, allow_invalid);
        spec.states = p.states;
        spec.tolerances = p.options.tolerances;
        if (p.params) spec.fixed = *p.params;
        oracle = oracle || p.options.oracle_check;
      }
      spec.param = parse_sweep_param(param);
      spec.range = parse_range(range);
      if (!a_text.empty()) spec.fixed.a = parse_angle(a_text, "--a");
      if (!k_text.empty()) spec.fixed.k = parse_angle(k_text, "--k");
      if (!phi_text.empty()) spec.fixed.phi = parse_angle(phi_text, "--phi");
      spec.oracle = oracle;
      const auto rows = run_sweep(spec);
      std::ostringstream os;
      if (format == "json")
        os << sweep_to_json(spec, rows).dump(2) << '\n';
      else
        write_csv(os, rows);
      write_out(out_path, os.str());
    } else if (*red) {
      const auto p = load_problem(problem_path, allow_invalid);
      Eigen::VectorXd w;
      if (!weights_text.empty())
        w = parse_weights(weights_text);
      else if (p.weights)
        w = *p.weights;
      else
        throw ParseError("reduce", "no weights given (use --weights or a 'weights' field)");
      if (static_cast<std::size_t>(w.size()) != p.states.size())
        throw ValidationError("weights: got " + std::to_string(w.size()) + " values for " +
                              std::to_string(p.states.size()) + " states");
      const auto report = make_reduction_report(p.states, w, p.options.tolerances.rank);
      if (format == "json")
        std::cout << reduction_to_json(report).dump(2) << '\n';
      else
        std::cout << reduction_to_text(report);
    } else if (*rank_cmd) {
      const auto p = load_problem(problem_path, allow_invalid);
      if (p.states.empty()) throw ValidationError("states: empty set");
      std::cout << matrix_rank(p.states, p.options.tolerances.rank) << '\n';
    } else if (*list) {
      for (const auto& n : fixture_names()) std::cout << n << '\n';
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << '\n';
    return kExitContract;
  } catch (const OracleNonConvergence& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return kExitOracle;
  }
  return 0;
}
