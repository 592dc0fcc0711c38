#pragma once
//------------------------------------------------------------------------------
// Closed-form nearest convex mixture of qubit states.
//
// Given a target r_o and states r_1..r_N, find weights p on the probability
// simplex minimising ||r_o - sum_i p_i r_i||. The problem is a convex QP; the
// solvers below resolve it exactly by branching on which KKT multipliers are
// active:
//
//   N = 2   projection onto a segment (three branches)
//   N = 3   unconstrained stationary point of the triangle, else best edge
//   N = 4   exact inversion of the 4x4 decomposition matrix, else best face
//   N >= 4  minimum over all rank(A)-element subsets, each solved as above
//------------------------------------------------------------------------------
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "errors.hpp"

namespace qapprox {

struct Tolerances {
  double state = kStateEps;
  /// Pseudo-probabilities within [-feasibility, 1 + feasibility] count as feasible.
  double feasibility = 1e-9;
  /// Relative threshold on the triangle Gram determinant.
  double degenerate = 1e-12;
  /// Absolute threshold on ||r1 - r2||^2 below which a pair is one state.
  double coincident = 1e-24;
  /// Distances closer than this are ties, resolved by smallest index tuple.
  double tie = 1e-10;
  /// Relative singular-value cutoff for the decomposition-matrix rank.
  double rank = 1e-9;
};

enum class Branch {
  Interior,
  ClampLow,
  ClampHigh,
  TripleInterior,
  PairFallback,
  QuadExact,
  TripleFallback,
  SubsetEnum,
};

constexpr std::string_view to_string(Branch b) {
  switch (b) {
  case Branch::Interior: return "Interior";
  case Branch::ClampLow: return "ClampLow";
  case Branch::ClampHigh: return "ClampHigh";
  case Branch::TripleInterior: return "TripleInterior";
  case Branch::PairFallback: return "PairFallback";
  case Branch::QuadExact: return "QuadExact";
  case Branch::TripleFallback: return "TripleFallback";
  case Branch::SubsetEnum: return "SubsetEnum";
  }
  return "?";
}

/// Multipliers of the Lagrangian
///   D^2(p) - sum_i lambda_i p_i + lambda (sum_i p_i - 1)
/// reconstructed from the gradient at a candidate p.
struct KKTDiagnostics {
  double lambda = 0.0;
  Eigen::VectorXd lambda_i;
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
};

struct ApproximationResult {
  MixtureWeights weights;
  double distance = 0.0;
  std::vector<std::size_t> support;
  Branch branch = Branch::Interior;
  std::optional<Eigen::VectorXd> pseudo_probabilities;
  KKTDiagnostics diagnostics;
  /// Set when another, different weight vector attains the same mixture
  /// (the four-state Pauli case with two optimal assignments).
  bool degenerate_weights = false;
};

/// The 4 x N matrix A with A_ij = Tr(sigma_i rho_j), sigma_4 = identity:
/// Bloch vectors stacked on an all-ones row.
class DecompositionMatrix {
public:
  explicit DecompositionMatrix(const StateSet& s) : a_(4, static_cast<Eigen::Index>(s.size())) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto c = static_cast<Eigen::Index>(j);
      a_.block<3, 1>(0, c) = s[j].vec();
      a_(3, c) = 1.0;
    }
  }

  const Eigen::Matrix4Xd& matrix() const { return a_; }
  std::size_t cols() const { return static_cast<std::size_t>(a_.cols()); }

private:
  Eigen::Matrix4Xd a_;
};

/// Numerical rank: singular values above tol * sigma_max.
inline int matrix_rank(const DecompositionMatrix& a, double tol = 1e-9) {
  if (a.cols() == 0) throw ContractError("matrix_rank: empty decomposition matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.matrix());
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return rank;
}

inline int matrix_rank(const StateSet& s, double tol = 1e-9) {
  return matrix_rank(DecompositionMatrix(s), tol);
}

//------------------------------------------------------------------------------
// KKT certificate
//------------------------------------------------------------------------------

/// With g = grad D^2 = 2 R^T (R p - r_o), take lambda = -sum_i p_i g_i and
/// lambda_i = max(0, g_i + lambda). The stationarity residual is the part of
/// g_i + lambda that a nonnegative lambda_i cannot absorb; complementarity is
/// max |lambda_i p_i|. Both vanish exactly at the optimum.
inline KKTDiagnostics kkt_residual(const MixtureWeights& p, const BlochVector& r_o,
                                   const StateSet& s) {
  if (p.size() != s.size())
    throw ContractError("kkt_residual: weight vector length does not match the set");
  const Vec3 residual = mix(s, p).vec() - r_o.vec();
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXd grad(n);
  for (Eigen::Index i = 0; i < n; ++i)
    grad[i] = 2.0 * s[static_cast<std::size_t>(i)].vec().dot(residual);

  KKTDiagnostics k;
  k.lambda = -p.vec().dot(grad);
  k.lambda_i.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double slack = grad[i] + k.lambda;
    k.lambda_i[i] = std::max(0.0, slack);
    k.stationarity_residual = std::max(k.stationarity_residual, std::max(0.0, -slack));
    k.complementarity_residual =
        std::max(k.complementarity_residual, std::abs(k.lambda_i[i] * p.vec()[i]));
  }
  return k;
}

inline KKTDiagnostics kkt_residual(const ApproximationResult& res, const BlochVector& r_o,
                                   const StateSet& s) {
  return kkt_residual(res.weights, r_o, s);
}

namespace detail {

/// Assemble a result from raw weights: clamp the floating-point dust below
/// zero, renormalise, and fill distance, support and diagnostics.
inline ApproximationResult finalize(const BlochVector& r_o, const StateSet& s, Eigen::VectorXd p,
                                    Branch branch,
                                    std::optional<Eigen::VectorXd> pseudo = std::nullopt) {
  p = p.cwiseMax(0.0);
  const double total = p.sum();
  if (total > 0.0) p /= total;

  ApproximationResult res;
  res.weights = MixtureWeights(std::move(p));
  res.distance = std::sqrt(mixture_distance_sq(r_o, s, res.weights));
  for (std::size_t i = 0; i < s.size(); ++i)
    if (res.weights[i] > 0.0) res.support.push_back(i);
  res.branch = branch;
  res.pseudo_probabilities = std::move(pseudo);
  res.diagnostics = kkt_residual(res.weights, r_o, s);
  return res;
}

inline ApproximationResult single_state(const BlochVector& r_o, const StateSet& s,
                                        std::size_t index) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
  p[static_cast<Eigen::Index>(index)] = 1.0;
  return finalize(r_o, s, std::move(p), Branch::ClampHigh);
}

/// Calls fn(indices) for every r-element subset of {0..n-1} in lexicographic
/// order.
inline void for_each_combination(std::size_t n, std::size_t r,
                                 const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (r > n) return;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Re-express a result computed on s.subset(idx) over the full set.
inline ApproximationResult expand(const BlochVector& r_o, const StateSet& full,
                                  const std::vector<std::size_t>& idx,
                                  const ApproximationResult& sub, Branch branch) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full.size()));
  for (std::size_t j = 0; j < idx.size(); ++j)
    p[static_cast<Eigen::Index>(idx[j])] = sub.weights[j];
  return finalize(r_o, full, std::move(p), branch);
}

/// Tracks the minimum over candidates visited in lexicographic order; a later
/// candidate only wins if it is better by more than the tie tolerance.
class BestOf {
public:
  explicit BestOf(double tie) : tie_(tie) {}

  void offer(const std::vector<std::size_t>& idx, ApproximationResult res) {
    if (!best_ || res.distance < best_->distance - tie_) {
      best_ = std::move(res);
      idx_ = idx;
    }
  }

  bool empty() const { return !best_.has_value(); }
  const ApproximationResult& result() const { return *best_; }
  const std::vector<std::size_t>& indices() const { return idx_; }

private:
  double tie_;
  std::optional<ApproximationResult> best_;
  std::vector<std::size_t> idx_;
};

inline ApproximationResult solve_pair_in(const BlochVector& r_o, const StateSet& s,
                                         const Tolerances& tol) {
  const Vec3 edge = s[0].vec() - s[1].vec();
  const double h = edge.squaredNorm();
  if (h <= tol.coincident) return single_state(r_o, s, 0);

  const double g = (r_o.vec() - s[1].vec()).dot(edge);
  if (g < 0.0) return finalize(r_o, s, Eigen::Vector2d(0.0, 1.0), Branch::ClampLow);
  if (g > h) return finalize(r_o, s, Eigen::Vector2d(1.0, 0.0), Branch::ClampHigh);
  const double p1 = g / h;
  return finalize(r_o, s, Eigen::Vector2d(p1, 1.0 - p1), Branch::Interior);
}

inline ApproximationResult best_pair_in(const BlochVector& r_o, const StateSet& s,
                                        const Tolerances& tol) {
  BestOf best(tol.tie);
  for_each_combination(3, 2, [&](const std::vector<std::size_t>& idx) {
    best.offer(idx, solve_pair_in(r_o, s.subset(idx), tol));
  });
  return expand(r_o, s, best.indices(), best.result(), Branch::PairFallback);
}

inline ApproximationResult solve_triple_in(const BlochVector& r_o, const StateSet& s,
                                           const Tolerances& tol) {
  const Vec3& r1 = s[0].vec();
  const Vec3& r2 = s[1].vec();
  const Vec3& r3 = s[2].vec();

  // Gram determinant of the two edges leaving r2; zero iff collinear.
  const Vec3 e1 = r1 - r2;
  const Vec3 e3 = r3 - r2;
  const double h1 = e1.squaredNorm();
  const double h3 = e3.squaredNorm();
  const double cross = e1.dot(e3);
  const double d = h1 * h3 - cross * cross;
  if (std::abs(d) <= tol.degenerate * std::max(1.0, h1 * h3)) return best_pair_in(r_o, s, tol);

  // Stationarity differences (i vs 3) plus normalisation, all lambda_i = 0.
  Eigen::Matrix3d m;
  const Vec3 u = r1 - r3;
  const Vec3 v = r2 - r3;
  m << r1.dot(u), r2.dot(u), r3.dot(u),
       r1.dot(v), r2.dot(v), r3.dot(v),
       1.0, 1.0, 1.0;
  const Eigen::Vector3d rhs(r_o.vec().dot(u), r_o.vec().dot(v), 1.0);
  const Eigen::Vector3d pseudo = m.fullPivLu().solve(rhs);

  const bool feasible = (pseudo.array() >= -tol.feasibility).all() &&
                        (pseudo.array() <= 1.0 + tol.feasibility).all();
  if (feasible) {
    Eigen::VectorXd p = pseudo.cwiseMax(0.0).cwiseMin(1.0);
    return finalize(r_o, s, std::move(p), Branch::TripleInterior, Eigen::VectorXd(pseudo));
  }
  auto res = best_pair_in(r_o, s, tol);
  res.pseudo_probabilities = Eigen::VectorXd(pseudo);
  return res;
}

inline ApproximationResult best_triple_in(const BlochVector& r_o, const StateSet& s,
                                          const Tolerances& tol) {
  BestOf best(tol.tie);
  for_each_combination(4, 3, [&](const std::vector<std::size_t>& idx) {
    best.offer(idx, solve_triple_in(r_o, s.subset(idx), tol));
  });
  return expand(r_o, s, best.indices(), best.result(), Branch::TripleFallback);
}

inline ApproximationResult solve_quad_in(const BlochVector& r_o, const StateSet& s,
                                         const Tolerances& tol) {
  const DecompositionMatrix a(s);
  if (matrix_rank(a, tol.rank) < 4)
    throw ContractError("solve_quad_full_rank: the four states are affinely dependent "
                        "(rank < 4); use solve() instead");
  const Eigen::Matrix4d a4 = a.matrix();
  const Eigen::Vector4d lifted(r_o.x(), r_o.y(), r_o.z(), 1.0);
  const Eigen::Vector4d pseudo = a4.fullPivLu().solve(lifted);

  const bool feasible = (pseudo.array() >= -tol.feasibility).all() &&
                        (pseudo.array() <= 1.0 + tol.feasibility).all();
  if (feasible) {
    Eigen::VectorXd p = pseudo.cwiseMax(0.0).cwiseMin(1.0);
    return finalize(r_o, s, std::move(p), Branch::QuadExact, Eigen::VectorXd(pseudo));
  }
  auto res = best_triple_in(r_o, s, tol);
  res.pseudo_probabilities = Eigen::VectorXd(pseudo);
  return res;
}

/// Closed form for a subset of at most four states; four affinely dependent
/// states drop to their best face.
inline ApproximationResult solve_small(const BlochVector& r_o, const StateSet& s,
                                       const Tolerances& tol) {
  switch (s.size()) {
  case 1: return single_state(r_o, s, 0);
  case 2: return solve_pair_in(r_o, s, tol);
  case 3: return solve_triple_in(r_o, s, tol);
  case 4:
    if (matrix_rank(s, tol.rank) == 4) return solve_quad_in(r_o, s, tol);
    return best_triple_in(r_o, s, tol);
  default: throw ContractError("solve_small: subset size must be 1..4");
  }
}

} // namespace detail

//------------------------------------------------------------------------------
// Public solvers
//------------------------------------------------------------------------------

/// Two states. With g = (r_o - r2).(r1 - r2) and h = ||r1 - r2||^2:
/// 0 <= g <= h gives p1 = g/h (Interior), g < 0 gives p2 = 1 (ClampLow),
/// g > h gives p1 = 1 (ClampHigh). Coincident states degrade to p1 = 1.
inline ApproximationResult solve_pair(const BlochVector& r_o, const BlochVector& r1,
                                      const BlochVector& r2, const Tolerances& tol = {}) {
  return detail::solve_pair_in(r_o, StateSet({r1, r2}, {}, tol.state), tol);
}

/// Two orthogonal pure states (r1 = -r2 on the unit sphere):
///   D^2 = r_o.r_o - (r_o.r_i)^2,   p_i = (1 + r_o.r_i) / 2.
/// For a Pauli eigenbasis D is the trace-norm coherence of the target.
inline ApproximationResult solve_orthonormal_pair(const BlochVector& r_o, const BlochVector& r1,
                                                  const BlochVector& r2,
                                                  const Tolerances& tol = {}) {
  if (std::abs(r1.vec().dot(r2.vec()) + 1.0) > 1e-9)
    throw ContractError("solve_orthonormal_pair: states are not an orthogonal pure pair "
                        "(r1.r2 != -1)");
  const StateSet s({r1, r2}, {}, tol.state);
  const double overlap = r_o.vec().dot(s[0].vec());
  const double p1 = 0.5 * (1.0 + overlap);
  auto res = detail::finalize(r_o, s, Eigen::Vector2d(p1, 1.0 - p1), Branch::Interior);
  res.distance = std::sqrt(std::max(0.0, r_o.norm_sq() - overlap * overlap));
  return res;
}

/// Three states: solve the stationarity system for pseudo-probabilities; if
/// they lie in [0, 1] that is the answer (TripleInterior), otherwise, or when
/// the states are collinear, the best of the three pairs (PairFallback).
inline ApproximationResult solve_triple(const BlochVector& r_o, const BlochVector& r1,
                                        const BlochVector& r2, const BlochVector& r3,
                                        const Tolerances& tol = {}) {
  return detail::solve_triple_in(r_o, StateSet({r1, r2, r3}, {}, tol.state), tol);
}

/// Four affinely independent states: p~ = A^{-1} [r_o; 1]. Feasible p~ means
/// the target is reproduced exactly (QuadExact); otherwise the best of the
/// four faces (TripleFallback). Rank < 4 is a ContractError.
inline ApproximationResult solve_quad_full_rank(const BlochVector& r_o, const StateSet& s,
                                                const Tolerances& tol = {}) {
  if (s.size() != 4) throw ContractError("solve_quad_full_rank: expected exactly four states");
  return detail::solve_quad_in(r_o, s, tol);
}

/// General entry point for any N >= 1. For N >= 4 (except full-rank N = 4)
/// it enumerates every R-element subset, R = rank(A), and keeps the closest;
/// ties within tol.tie go to the lexicographically smallest index tuple.
inline ApproximationResult solve(const BlochVector& r_o, const StateSet& s,
                                 const Tolerances& tol = {}) {
  if (s.empty()) throw ContractError("solve: the state set is empty");
  if (s.size() >= 3) {
    const auto hit = std::find(s.begin(), s.end(), r_o);
    if (hit != s.end())
      return detail::single_state(r_o, s, static_cast<std::size_t>(hit - s.begin()));
  }
  switch (s.size()) {
  case 1: return detail::single_state(r_o, s, 0);
  case 2: return detail::solve_pair_in(r_o, s, tol);
  case 3: return detail::solve_triple_in(r_o, s, tol);
  default: break;
  }

  const int rank = matrix_rank(s, tol.rank);
  if (s.size() == 4 && rank == 4) return detail::solve_quad_in(r_o, s, tol);

  detail::BestOf best(tol.tie);
  detail::for_each_combination(s.size(), static_cast<std::size_t>(rank),
                               [&](const std::vector<std::size_t>& idx) {
                                 best.offer(idx, detail::solve_small(r_o, s.subset(idx), tol));
                               });
  return detail::expand(r_o, s, best.indices(), best.result(), Branch::SubsetEnum);
}

} // namespace qapprox
