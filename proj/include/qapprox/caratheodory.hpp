#pragma once
//------------------------------------------------------------------------------
// Caratheodory support reduction.
//
// Any convex decomposition rho = sum_i p_i rho_i can be rewritten over at most
// rank(A) of the same states. Each step takes R+1 supported columns of A
// (rank R, so they are dependent), a kernel vector k of them (sum k_i = 0
// because of the all-ones row), and moves p -> p - alpha k with
// alpha = min { p_i / k_i : k_i > 0 }, which zeroes one weight and keeps the
// rest nonnegative.
//------------------------------------------------------------------------------
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "convex_solver.hpp"
#include "errors.hpp"

namespace qapprox {

/// Weights below this are treated as zero before a kernel step.
inline constexpr double kNegligibleWeight = 1e-14;

class Decomposition {
public:
  /// Computes the cached mixture.
  Decomposition(StateSet set, MixtureWeights weights)
      : set_(std::move(set)), weights_(std::move(weights)) {
    if (weights_.size() != set_.size())
      throw ContractError("Decomposition: weight vector length does not match the set");
    mixed_ = mix(set_, weights_);
  }

  /// Takes the cached mixture as given; reduce() checks it.
  Decomposition(StateSet set, MixtureWeights weights, BlochVector mixed)
      : set_(std::move(set)), weights_(std::move(weights)), mixed_(mixed) {}

  const StateSet& set() const { return set_; }
  const MixtureWeights& weights() const { return weights_; }
  const BlochVector& mixed_bloch() const { return mixed_; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (weights_[i] > 0.0) s.push_back(i);
    return s;
  }

private:
  StateSet set_;
  MixtureWeights weights_;
  BlochVector mixed_;
};

struct ReductionStep {
  std::size_t zeroed = 0;
  std::size_t support_size = 0;
  double mixture_residual = 0.0;
};

struct ReductionTrace {
  Decomposition result;
  std::vector<ReductionStep> steps;
};

namespace detail {

inline int support_rank(const StateSet& s, const std::vector<std::size_t>& support, double tol) {
  return matrix_rank(DecompositionMatrix(s.subset(support)), tol);
}

/// Kernel vector of the given columns of A: the right singular vector of the
/// smallest singular value, signed so its largest-magnitude entry is positive.
inline Eigen::VectorXd kernel_vector(const StateSet& s, const std::vector<std::size_t>& cols) {
  const DecompositionMatrix a(s.subset(cols));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a.matrix()), Eigen::ComputeFullV);
  Eigen::VectorXd k = svd.matrixV().col(svd.matrixV().cols() - 1);
  Eigen::Index lead = 0;
  for (Eigen::Index i = 1; i < k.size(); ++i)
    if (std::abs(k[i]) > std::abs(k[lead])) lead = i;
  if (k[lead] < 0.0) k = -k;
  return k;
}

} // namespace detail

inline ReductionTrace reduce_traced(const Decomposition& d, double rank_tol = 1e-9) {
  const StateSet& s = d.set();
  if (s.empty()) throw ContractError("reduce: empty decomposition");
  const auto checked = MixtureWeights::checked(d.weights().vec());
  const Vec3 target = d.mixed_bloch().vec();
  if ((mix(s, checked).vec() - target).norm() > 1e-12)
    throw ContractError("reduce: cached mixed Bloch vector does not match sum_i p_i r_i");

  Eigen::VectorXd p = checked.vec();
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] <= kNegligibleWeight) p[i] = 0.0;
  p /= p.sum();

  std::vector<ReductionStep> steps;
  while (true) {
    std::vector<std::size_t> support;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p[i] > 0.0) support.push_back(static_cast<std::size_t>(i));
    const auto rank = static_cast<std::size_t>(detail::support_rank(s, support, rank_tol));
    if (support.size() <= rank) break;

    const std::vector<std::size_t> cols(support.begin(), support.begin() + rank + 1);
    const Eigen::VectorXd k = detail::kernel_vector(s, cols);

    std::size_t pivot = cols.size();
    double alpha = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto kj = k[static_cast<Eigen::Index>(j)];
      if (kj <= 0.0) continue;
      const double ratio = p[static_cast<Eigen::Index>(cols[j])] / kj;
      if (pivot == cols.size() || ratio < alpha) {
        alpha = ratio;
        pivot = j;
      }
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      auto& w = p[static_cast<Eigen::Index>(cols[j])];
      w -= alpha * k[static_cast<Eigen::Index>(j)];
      if (w <= kNegligibleWeight) w = 0.0;
    }
    p[static_cast<Eigen::Index>(cols[pivot])] = 0.0;
    p /= p.sum();

    const MixtureWeights now(p);
    steps.push_back({cols[pivot], static_cast<std::size_t>((p.array() > 0.0).count()),
                     (mix(s, now).vec() - target).norm()});
  }

  if (steps.empty()) return {d, {}};
  return {Decomposition(s, MixtureWeights(p)), std::move(steps)};
}

/// Rewrites d over at most rank(A_support) <= 4 of its states. The state set
/// and its order are unchanged; dropped states keep an explicit zero weight.
inline Decomposition reduce(const Decomposition& d, double rank_tol = 1e-9) {
  return reduce_traced(d, rank_tol).result;
}

} // namespace qapprox
