#pragma once
//------------------------------------------------------------------------------
// Qubit states in Bloch form.
//
// Everything in this library lives in Bloch space: a qubit density matrix
// rho = (I + r.sigma)/2 is carried around as its real 3-vector r, and the
// trace distance ||rho - sigma||_1 between two qubits is the Euclidean
// distance of their Bloch vectors.
//------------------------------------------------------------------------------
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace qapprox {

/// Slack on ||r||^2 <= 1 for accepting a state, and on | ||r||^2 - 1 | for
/// calling it pure.
inline constexpr double kStateEps = 1e-9;

/// Slack on sum(p) == 1 for a feasible weight vector.
inline constexpr double kWeightSumTol = 1e-12;

using Vec3 = Eigen::Vector3d;

class BlochVector {
public:
  BlochVector() : v_(Vec3::Zero()) {}
  BlochVector(double x, double y, double z) : v_(x, y, z) {}
  explicit BlochVector(const Vec3& v) : v_(v) {}

  /// Validating factory. Norms in (1, 1+eps] are pulled back onto the unit
  /// sphere; anything longer (or non-finite) throws ValidationError.
  static BlochVector checked(const Vec3& v, double eps = kStateEps,
                             const std::string& what = "state") {
    if (!v.allFinite())
      throw ValidationError(what + ": Bloch vector has non-finite components");
    const double n2 = v.squaredNorm();
    if (n2 > 1.0 + eps)
      throw ValidationError(what + ": Bloch vector norm " + std::to_string(std::sqrt(n2)) +
                            " exceeds 1");
    if (n2 > 1.0) return BlochVector(v / std::sqrt(n2));
    return BlochVector(v);
  }
  static BlochVector checked(double x, double y, double z, double eps = kStateEps,
                             const std::string& what = "state") {
    return checked(Vec3(x, y, z), eps, what);
  }

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double operator[](std::size_t i) const { return v_[static_cast<Eigen::Index>(i)]; }
  const Vec3& vec() const { return v_; }

  double norm_sq() const { return v_.squaredNorm(); }
  double norm() const { return v_.norm(); }

  bool is_valid(double eps = kStateEps) const {
    return v_.allFinite() && norm_sq() <= 1.0 + eps;
  }
  bool is_pure(double eps = kStateEps) const { return std::abs(norm_sq() - 1.0) <= eps; }

  friend bool operator==(const BlochVector& a, const BlochVector& b) { return a.v_ == b.v_; }

private:
  Vec3 v_;
};

/// The (a, k, phi) parametrisation of a target state
///   rho = [[1-a, k sqrt(a(1-a)) e^{-i phi}], [k sqrt(a(1-a)) e^{i phi}, a]].
struct TargetParams {
  double a = 0.5;
  double k = 0.0;
  double phi = 0.0;
};

inline void check_params(const TargetParams& t) {
  if (!(t.a >= 0.0 && t.a <= 1.0))
    throw DomainError("parameter a = " + std::to_string(t.a) + " outside [0, 1]");
  if (!(t.k >= 0.0 && t.k <= 1.0))
    throw DomainError("parameter k = " + std::to_string(t.k) + " outside [0, 1]");
  if (!std::isfinite(t.phi)) throw DomainError("parameter phi is not finite");
}

inline BlochVector bloch_from_params(const TargetParams& t) {
  check_params(t);
  const double coherence = 2.0 * t.k * std::sqrt(t.a * (1.0 - t.a));
  return BlochVector(coherence * std::cos(t.phi), coherence * std::sin(t.phi), 1.0 - 2.0 * t.a);
}

/// Inverse of bloch_from_params. phi is returned in [0, 2pi); k is 0 at the
/// poles where it is not identifiable.
inline TargetParams params_from_bloch(const BlochVector& r) {
  TargetParams t;
  t.a = std::clamp((1.0 - r.z()) / 2.0, 0.0, 1.0);
  const double modulus = std::hypot(r.x(), r.y());
  const double scale = 2.0 * std::sqrt(t.a * (1.0 - t.a));
  t.k = scale > 0.0 ? std::min(modulus / scale, 1.0) : 0.0;
  double phi = std::atan2(r.y(), r.x());
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  t.phi = phi;
  return t;
}

inline double trace_distance(const BlochVector& r1, const BlochVector& r2) {
  return (r1.vec() - r2.vec()).norm();
}

/// Ordered family of allowed states. Weight vectors are index-aligned with it.
class StateSet {
public:
  StateSet() = default;

  explicit StateSet(std::vector<BlochVector> states, std::vector<std::string> labels = {},
                    double eps = kStateEps)
      : states_(std::move(states)), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != states_.size())
      throw ContractError("StateSet: label count does not match state count");
    for (std::size_t i = 0; i < states_.size(); ++i)
      states_[i] = BlochVector::checked(states_[i].vec(), eps, "state " + std::to_string(i));
  }

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const BlochVector& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<BlochVector>& states() const { return states_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(std::size_t i) const {
    return labels_.empty() ? std::string() : labels_[i];
  }

  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  /// 3 x N matrix whose columns are the Bloch vectors.
  Eigen::Matrix3Xd bloch_matrix() const {
    Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(states_.size()));
    for (std::size_t j = 0; j < states_.size(); ++j)
      m.col(static_cast<Eigen::Index>(j)) = states_[j].vec();
    return m;
  }

  StateSet subset(const std::vector<std::size_t>& idx) const {
    StateSet s;
    for (auto i : idx) {
      s.states_.push_back(states_[i]);
      if (!labels_.empty()) s.labels_.push_back(labels_[i]);
    }
    return s;
  }

private:
  std::vector<BlochVector> states_;
  std::vector<std::string> labels_;
};

/// Mixing weights p, index-aligned with a StateSet.
class MixtureWeights {
public:
  MixtureWeights() = default;
  explicit MixtureWeights(Eigen::VectorXd p) : p_(std::move(p)) {}

  /// Requires p_i >= 0 and |sum p - 1| <= tol.
  static MixtureWeights checked(Eigen::VectorXd p, double tol = kWeightSumTol) {
    if (p.size() == 0) throw ValidationError("weights: empty weight vector");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p[i]) || p[i] < 0.0)
        throw ValidationError("weights: p[" + std::to_string(i) + "] = " + std::to_string(p[i]) +
                              " is not a nonnegative number");
    }
    if (std::abs(p.sum() - 1.0) > tol)
      throw ValidationError("weights: sum is " + std::to_string(p.sum()) + ", expected 1");
    return MixtureWeights(std::move(p));
  }

  std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
  double operator[](std::size_t i) const { return p_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return p_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& vec() const { return p_; }

private:
  Eigen::VectorXd p_;
};

/// Bloch vector of sum_i p_i rho_i.
inline BlochVector mix(const StateSet& s, const MixtureWeights& p) {
  if (p.size() != s.size())
    throw ContractError("mix: weight vector has length " + std::to_string(p.size()) +
                        " but the set has " + std::to_string(s.size()) + " states");
  Vec3 m = Vec3::Zero();
  for (std::size_t i = 0; i < s.size(); ++i) m += p[i] * s[i].vec();
  return BlochVector(m);
}

/// D^2 between the target and the mixture, i.e. the quadratic
///   sum_ij p_i p_j r_i.r_j - 2 sum_i p_i r_i.r_o + r_o.r_o,
/// evaluated as ||r_o - sum p_i r_i||^2 to avoid cancellation near zero.
inline double mixture_distance_sq(const BlochVector& r_o, const StateSet& s,
                                  const MixtureWeights& p) {
  return (r_o.vec() - mix(s, p).vec()).squaredNorm();
}

/// H = d^2 D^2 / dp^2 = 2 R^T R.
inline Eigen::MatrixXd hessian(const StateSet& s) {
  const Eigen::Matrix3Xd r = s.bloch_matrix();
  return 2.0 * r.transpose() * r;
}

} // namespace qapprox
