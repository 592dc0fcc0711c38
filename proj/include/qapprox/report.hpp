#pragma once
// Machine-readable views of solver and reduction results, shared by the CLI
// and its tests.
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caratheodory.hpp"
#include "convex_solver.hpp"
#include "oracle.hpp"
#include "sweep.hpp"

namespace qapprox {

inline nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline nlohmann::json approximation_to_json(const BlochVector& target,
                                            const ApproximationResult& res,
                                            const std::optional<OracleResult>& oracle) {
  nlohmann::json j;
  j["target"] = {target.x(), target.y(), target.z()};
  j["distance"] = res.distance;
  j["weights"] = to_json(res.weights.vec());
  j["support"] = res.support;
  j["branch"] = std::string(to_string(res.branch));
  j["pseudo_probabilities"] =
      res.pseudo_probabilities ? to_json(*res.pseudo_probabilities) : nlohmann::json(nullptr);
  j["degenerate_weights"] = res.degenerate_weights;
  j["kkt"] = {{"lambda", res.diagnostics.lambda},
              {"lambda_i", to_json(res.diagnostics.lambda_i)},
              {"stationarity_residual", res.diagnostics.stationarity_residual},
              {"complementarity_residual", res.diagnostics.complementarity_residual}};
  if (oracle)
    j["oracle"] = {{"distance", oracle->distance},
                   {"weights", to_json(oracle->weights.vec())},
                   {"iterations", oracle->iterations}};
  return j;
}

inline constexpr const char* kApproxCsvHeader = "D_analytic,D_oracle,support,branch,weights";

inline std::string approximation_to_csv(const ApproximationResult& res,
                                        const std::optional<OracleResult>& oracle) {
  std::ostringstream os;
  os << kApproxCsvHeader << '\n'
     << format_double(res.distance) << ',' << (oracle ? format_double(oracle->distance) : "")
     << ',' << join_support(res.support) << ',' << to_string(res.branch) << ',';
  for (std::size_t i = 0; i < res.weights.size(); ++i)
    os << (i ? ";" : "") << format_double(res.weights[i]);
  os << '\n';
  return os.str();
}

struct ReductionReport {
  std::vector<std::size_t> original_support;
  Eigen::VectorXd original_weights;
  std::vector<std::size_t> reduced_support;
  Eigen::VectorXd reduced_weights;
  int rank = 0;
  std::vector<ReductionStep> steps;
  /// ||sum q_i r_i - sum p_i r_i||.
  double mixture_residual = 0.0;

  bool reduced() const { return !steps.empty(); }
};

inline ReductionReport make_reduction_report(const StateSet& s, const Eigen::VectorXd& weights,
                                             double rank_tol = 1e-9) {
  const Decomposition d(s, MixtureWeights::checked(weights));
  const auto trace = reduce_traced(d, rank_tol);
  ReductionReport r;
  r.original_support = d.support();
  r.original_weights = d.weights().vec();
  r.reduced_support = trace.result.support();
  r.reduced_weights = trace.result.weights().vec();
  r.rank = detail::support_rank(s, r.original_support, rank_tol);
  r.steps = trace.steps;
  r.mixture_residual = (mix(s, trace.result.weights()).vec() - d.mixed_bloch().vec()).norm();
  return r;
}

inline nlohmann::json reduction_to_json(const ReductionReport& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& st : r.steps)
    steps.push_back({{"zeroed", st.zeroed},
                     {"support_size", st.support_size},
                     {"mixture_residual", st.mixture_residual}});
  return {{"reduced", r.reduced()},
          {"rank", r.rank},
          {"original", {{"support", r.original_support}, {"weights", to_json(r.original_weights)}}},
          {"result", {{"support", r.reduced_support}, {"weights", to_json(r.reduced_weights)}}},
          {"steps", std::move(steps)},
          {"mixture_residual", r.mixture_residual}};
}

inline std::string reduction_to_text(const ReductionReport& r) {
  std::ostringstream os;
  auto weights = [&](const Eigen::VectorXd& w) {
    std::string out;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      out += (i ? "," : "") + format_double(w[i]);
    return out;
  };
  os << "rank: " << r.rank << '\n'
     << "original support: " << join_support(r.original_support) << '\n'
     << "original weights: " << weights(r.original_weights) << '\n';
  if (!r.reduced()) {
    os << "no reduction: support size " << r.original_support.size() << " <= rank " << r.rank
       << '\n';
    return os.str();
  }
  os << "reduced support: " << join_support(r.reduced_support) << '\n'
     << "reduced weights: " << weights(r.reduced_weights) << '\n'
     << "steps: " << r.steps.size() << '\n'
     << "mixture residual: " << format_double(r.mixture_residual) << '\n';
  return os.str();
}

} // namespace qapprox
