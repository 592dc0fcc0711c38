#pragma once
//------------------------------------------------------------------------------
// Numerical reference solver.
//
// Minimises f(p) = ||R p - r_o||^2 over the probability simplex without any of
// the closed-form case analysis, so it can be used to check it:
//
//   * projected gradient with step 1/L, L = lambda_max(H), H = 2 R^T R;
//     whenever the support is unchanged by a step, the exact minimiser on
//     that face (clipped to the simplex) is tried and kept if it lowers f;
//   * for N <= 3, an exhaustive grid over the simplex with zoom refinement.
//
// Convergence is declared only when the objective has stopped moving AND the
// Frank-Wolfe gap  G = g.p - min_i g_i  certifies the distance: since
// f(p) - f* <= G, the bound  sqrt(f) - sqrt(max(0, f - G))  on D - D* must be
// below distance_tol.
//------------------------------------------------------------------------------
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "errors.hpp"

namespace qapprox {

enum class StepRule { FixedInverseLipschitz, Backtracking };

struct OracleConfig {
  std::size_t max_iterations = 100000;
  StepRule step_rule = StepRule::FixedInverseLipschitz;
  /// On |f_k - f_{k-1}|.
  double convergence_tol = 1e-12;
  /// On the certified distance error derived from the Frank-Wolfe gap.
  double distance_tol = 1e-10;
  /// Subdivisions per axis in grid mode.
  std::size_t grid_resolution = 2000;
  /// Zoom levels in grid mode; each shrinks the window to 4 cells of the last.
  std::size_t grid_refinements = 6;
};

struct OracleResult {
  MixtureWeights weights;
  double distance = 0.0;
  std::size_t iterations = 0;
  /// Objective never went up by more than rounding noise.
  bool monotone = true;
  double max_increase = 0.0;
  /// Final Frank-Wolfe gap and the distance bound it implies (projected
  /// gradient only).
  double gap = 0.0;
  double distance_bound = 0.0;
};

/// Euclidean projection onto { p : p_i >= 0, sum p_i = 1 } by sorting and
/// thresholding.
inline MixtureWeights simplex_project(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw ContractError("simplex_project: empty vector");
  if (!v.allFinite()) throw ContractError("simplex_project: non-finite input");
  const double eps = std::numeric_limits<double>::epsilon();
  if (v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= 4.0 * eps) return MixtureWeights(v);

  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double t = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return MixtureWeights((v.array() - theta).cwiseMax(0.0).matrix());
}

/// f(p) = ||R p - r_o||^2 for an arbitrary (not necessarily feasible) p.
inline double oracle_objective(const BlochVector& r_o, const Eigen::Matrix3Xd& r,
                               const Eigen::VectorXd& p) {
  return (r * p - r_o.vec()).squaredNorm();
}

/// grad f = 2 R^T (R p - r_o) = H p - 2 R^T r_o.
inline Eigen::VectorXd oracle_gradient(const BlochVector& r_o, const Eigen::Matrix3Xd& r,
                                       const Eigen::VectorXd& p) {
  return 2.0 * r.transpose() * (r * p - r_o.vec());
}

inline double lipschitz_constant(const StateSet& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian(s), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

namespace detail {

/// Minimiser of f on the face spanned by the current support (sum fixed at 1),
/// clipped to the simplex: moves from p towards it until the first weight
/// hits zero. f is convex quadratic along the segment with its minimum at or
/// beyond the clip point, so the move never increases f.
inline Eigen::VectorXd face_step(const BlochVector& r_o, const Eigen::Matrix3Xd& r,
                                 const Eigen::VectorXd& p) {
  std::vector<Eigen::Index> sup;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) sup.push_back(i);
  if (sup.size() < 2) return p;
  const auto m = static_cast<Eigen::Index>(sup.size());
  // Directions e_i - e_last span { d : sum d = 0 } on the face.
  Eigen::Matrix3Xd rz(3, m - 1);
  for (Eigen::Index j = 0; j + 1 < m; ++j) rz.col(j) = r.col(sup[j]) - r.col(sup[m - 1]);
  const Vec3 res = r * p - r_o.vec();
  const Eigen::VectorXd y = rz.completeOrthogonalDecomposition().solve(-res);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    d[sup[j]] += y[j];
    d[sup[m - 1]] -= y[j];
  }
  double alpha = 1.0;
  for (auto i : sup)
    if (d[i] < 0.0) alpha = std::min(alpha, -p[i] / d[i]);
  Eigen::VectorXd q = (p + alpha * d).cwiseMax(0.0);
  return q / q.sum();
}

} // namespace detail

inline OracleResult oracle_solve(const BlochVector& r_o, const StateSet& s,
                                 const OracleConfig& cfg = {}) {
  if (s.empty()) throw ContractError("oracle_solve: the state set is empty");
  if (cfg.max_iterations == 0) throw ContractError("oracle_solve: max_iterations must be > 0");
  const Eigen::Matrix3Xd r = s.bloch_matrix();
  const auto n = static_cast<Eigen::Index>(s.size());

  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double f = oracle_objective(r_o, r, p);
  const double lip = lipschitz_constant(s);

  OracleResult out;
  if (!(lip > 0.0)) {
    // Every state is the maximally mixed state; f is constant.
    out.weights = MixtureWeights(p);
    out.distance = std::sqrt(f);
    return out;
  }

  double step = 1.0 / lip;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    const Eigen::VectorXd g = oracle_gradient(r_o, r, p);
    const double gap = g.dot(p) - g.minCoeff();

    Eigen::VectorXd next;
    double f_next = 0.0;
    if (cfg.step_rule == StepRule::FixedInverseLipschitz) {
      next = simplex_project(p - step * g).vec();
      f_next = oracle_objective(r_o, r, next);
    } else {
      step = std::min(2.0 * step, 1e6 / lip);
      while (true) {
        next = simplex_project(p - step * g).vec();
        f_next = oracle_objective(r_o, r, next);
        const Eigen::VectorXd delta = next - p;
        if (f_next <= f + g.dot(delta) + delta.squaredNorm() / (2.0 * step) ||
            step <= 1.0 / lip)
          break;
        step *= 0.5;
      }
    }

    // f is a squared residual; rounding in the residual itself moves f by
    // about eps * sqrt(f).
    const double increase = f_next - f;
    if (increase > 0.0) {
      out.max_increase = std::max(out.max_increase, increase);
      if (increase > 64.0 * std::numeric_limits<double>::epsilon() * (f + std::sqrt(f)))
        out.monotone = false;
    }
    // Once the support settles, jump to the best point of that face.
    if (((next.array() > 0.0) == (p.array() > 0.0)).all()) {
      Eigen::VectorXd q = detail::face_step(r_o, r, next);
      const double f_face = oracle_objective(r_o, r, q);
      if (f_face < f_next) {
        next = std::move(q);
        f_next = f_face;
      }
    }
    const double change = std::abs(f - f_next);
    // f* >= f(p) - gap(p), and the step did not increase f.
    const double lower = std::sqrt(std::max(0.0, f - gap));
    p = std::move(next);
    f = f_next;
    out.iterations = it;
    out.gap = gap;
    out.distance_bound = std::max(0.0, std::sqrt(f) - lower);
    if (change <= cfg.convergence_tol && out.distance_bound <= cfg.distance_tol) {
      out.weights = MixtureWeights(p);
      out.distance = std::sqrt(f);
      return out;
    }
  }
  throw OracleNonConvergence("oracle_solve: projected gradient did not converge within " +
                                 std::to_string(cfg.max_iterations) + " iterations (distance bound " +
                                 std::to_string(out.distance_bound) + ")",
                             cfg.max_iterations);
}

/// Exhaustive grid search over the simplex, N <= 3 only. Each level scans a
/// (resolution+1)-point lattice over the current window, then recentres a
/// window of +-2 cells on the best point. Convexity of f makes the zoom safe.
inline OracleResult oracle_grid(const BlochVector& r_o, const StateSet& s,
                                const OracleConfig& cfg = {}) {
  if (s.empty() || s.size() > 3)
    throw ContractError("oracle_grid: grid mode supports 1 to 3 states");
  if (cfg.grid_resolution == 0) throw ContractError("oracle_grid: grid_resolution must be > 0");
  const Eigen::Matrix3Xd r = s.bloch_matrix();
  const auto res = static_cast<double>(cfg.grid_resolution);

  OracleResult out;
  if (s.size() == 1) {
    out.weights = MixtureWeights(Eigen::VectorXd::Ones(1));
    out.distance = trace_distance(r_o, s[0]);
    return out;
  }

  if (s.size() == 2) {
    double lo = 0.0, hi = 1.0, best = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t level = 0; level <= cfg.grid_refinements; ++level) {
      const double h = (hi - lo) / res;
      for (std::size_t i = 0; i <= cfg.grid_resolution; ++i) {
        const double p1 = std::min(1.0, lo + h * static_cast<double>(i));
        const double f = oracle_objective(r_o, r, Eigen::Vector2d(p1, 1.0 - p1));
        if (f < best_f) {
          best_f = f;
          best = p1;
        }
      }
      lo = std::max(0.0, best - 2.0 * h);
      hi = std::min(1.0, best + 2.0 * h);
      out.iterations = level + 1;
    }
    out.weights = MixtureWeights(Eigen::Vector2d(best, 1.0 - best));
    out.distance = std::sqrt(best_f);
    return out;
  }

  double lo1 = 0.0, hi1 = 1.0, lo2 = 0.0, hi2 = 1.0;
  double b1 = 0.0, b2 = 0.0;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::size_t level = 0; level <= cfg.grid_refinements; ++level) {
    const double h1 = (hi1 - lo1) / res;
    const double h2 = (hi2 - lo2) / res;
    for (std::size_t i = 0; i <= cfg.grid_resolution; ++i) {
      const double p1 = lo1 + h1 * static_cast<double>(i);
      if (p1 > 1.0) break;
      for (std::size_t j = 0; j <= cfg.grid_resolution; ++j) {
        const double p2 = lo2 + h2 * static_cast<double>(j);
        if (p1 + p2 > 1.0) break;
        const double f = oracle_objective(r_o, r, Eigen::Vector3d(p1, p2, 1.0 - p1 - p2));
        if (f < best_f) {
          best_f = f;
          b1 = p1;
          b2 = p2;
        }
      }
    }
    lo1 = std::max(0.0, b1 - 2.0 * h1);
    hi1 = std::min(1.0, b1 + 2.0 * h1);
    lo2 = std::max(0.0, b2 - 2.0 * h2);
    hi2 = std::min(1.0, b2 + 2.0 * h2);
    out.iterations = level + 1;
  }
  out.weights = MixtureWeights(Eigen::Vector3d(b1, b2, std::max(0.0, 1.0 - b1 - b2)));
  out.distance = std::sqrt(best_f);
  return out;
}

} // namespace qapprox
