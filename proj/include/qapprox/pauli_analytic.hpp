#pragma once
//------------------------------------------------------------------------------
// Closed forms for state sets made of Pauli eigenstates (+-e_x, +-e_y, +-e_z).
//
// Reflections r_a -> -r_a permute the six eigenstates among themselves and
// preserve distances, so every routine first reflects the target into the
// nonnegative octant, flips the spec signs to match, evaluates the case
// formulas there, and maps the weights back. Shapes handled:
//
//   Case 1   {+a, -a, s3 a'}            three states, one antipodal pair
//   Case 2   {sx x, sy y, sz z}         three states, one per axis
//   Case 3   {+a, -a, +a', -a'}         four states, rank 3
//   Case 4   {+a, -a, s3 a', s4 a''}    four states, rank 4
//   six      all six eigenstates        best of the fifteen 4-subsets
//------------------------------------------------------------------------------
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "convex_solver.hpp"
#include "errors.hpp"

namespace qapprox {

enum class Axis { X = 0, Y = 1, Z = 2 };

constexpr std::size_t index_of(Axis a) { return static_cast<std::size_t>(a); }
constexpr char axis_name(Axis a) { return "xyz"[index_of(a)]; }

/// The remaining axis of a distinct pair.
constexpr Axis third_axis(Axis a, Axis b) {
  return static_cast<Axis>(3 - static_cast<int>(a) - static_cast<int>(b));
}

/// Eigenstate of sigma_axis with eigenvalue sign.
struct PauliStateSpec {
  Axis axis = Axis::Z;
  int sign = 1;

  BlochVector bloch() const {
    Vec3 v = Vec3::Zero();
    v[static_cast<Eigen::Index>(index_of(axis))] = static_cast<double>(sign);
    return BlochVector(v);
  }

  friend bool operator==(const PauliStateSpec&, const PauliStateSpec&) = default;
};

/// The six eigenstates in the order +x, -x, +y, -y, +z, -z.
inline std::vector<PauliStateSpec> six_pauli_specs() {
  return {{Axis::X, 1}, {Axis::X, -1}, {Axis::Y, 1}, {Axis::Y, -1}, {Axis::Z, 1}, {Axis::Z, -1}};
}

inline StateSet pauli_states(const std::vector<PauliStateSpec>& specs) {
  std::vector<BlochVector> v;
  std::vector<std::string> labels;
  for (const auto& s : specs) {
    v.push_back(s.bloch());
    labels.push_back(std::string(s.sign > 0 ? "+" : "-") + axis_name(s.axis));
  }
  return StateSet(std::move(v), std::move(labels));
}

struct PauliProblem {
  BlochVector target;
  std::vector<PauliStateSpec> specs;

  PauliProblem(BlochVector t, std::vector<PauliStateSpec> sp) : target(t), specs(std::move(sp)) {
    if (specs.size() != 3 && specs.size() != 4 && specs.size() != 6)
      throw ContractError("PauliProblem: supported set sizes are 3, 4 and 6");
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (specs[i].sign != 1 && specs[i].sign != -1)
        throw ContractError("PauliProblem: eigenvalue sign must be +1 or -1");
      for (std::size_t j = 0; j < i; ++j)
        if (specs[i] == specs[j]) throw ContractError("PauliProblem: duplicate eigenstate");
    }
  }

  StateSet states() const { return pauli_states(specs); }
};

/// Canonical representative of (a, k, phi) under rho(a) -> rho(1-a) and
/// phi -> phi + n pi/2: a in [0, 1/2], phi in [0, pi/2).
inline TargetParams symmetry_reduce(const TargetParams& t) {
  check_params(t);
  constexpr double quarter = std::numbers::pi / 2.0;
  TargetParams c = t;
  if (c.a > 0.5) c.a = 1.0 - c.a;
  c.phi = std::fmod(c.phi, quarter);
  if (c.phi < 0.0) c.phi += quarter;
  return c;
}

namespace detail {

/// Weights over the six eigenstates, slot 2*axis + (sign < 0).
using PauliSlots = std::array<double, 6>;

constexpr std::size_t slot(Axis a, int sign) { return 2 * index_of(a) + (sign < 0 ? 1 : 0); }
constexpr std::size_t slot(const PauliStateSpec& s) { return slot(s.axis, s.sign); }

struct PauliOutcome {
  double distance_sq = 0.0;
  PauliSlots w{};
  bool degenerate = false;
};

/// Target reflected into the nonnegative octant; flip[a] = -1 where r_a < 0.
struct Reflection {
  Vec3 r;
  std::array<int, 3> flip{1, 1, 1};

  explicit Reflection(const BlochVector& target) : r(target.vec()) {
    for (int a = 0; a < 3; ++a)
      if (r[a] < 0.0) {
        r[a] = -r[a];
        flip[static_cast<std::size_t>(a)] = -1;
      }
  }

  int sign(Axis a, int s) const { return s * flip[index_of(a)]; }
  double at(Axis a) const { return r[static_cast<Eigen::Index>(index_of(a))]; }

  PauliSlots unreflect(const PauliSlots& w) const {
    PauliSlots out{};
    for (Axis a : {Axis::X, Axis::Y, Axis::Z})
      for (int s : {1, -1}) out[slot(a, s)] = w[slot(a, sign(a, s))];
    return out;
  }
};

inline double sq(double v) { return v * v; }

// The canonical routines below assume every component of r is >= 0.

inline PauliOutcome case1_canonical(const Reflection& c, Axis a, Axis ap, int s3) {
  const Axis app = third_axis(a, ap);
  const double ra = c.at(a), rap = c.at(ap), rapp = c.at(app);
  PauliOutcome o;
  if (s3 == 1) {
    const double lambda = ra + rap;
    if (lambda <= 1.0) {
      o.distance_sq = sq(rapp);
      o.w[slot(a, -1)] = 0.5 * (1.0 - lambda);
      o.w[slot(ap, 1)] = rap;
      o.w[slot(a, 1)] = 1.0 - o.w[slot(a, -1)] - rap;
    } else {
      o.distance_sq = sq(rapp) + 0.5 * sq(lambda - 1.0);
      o.w[slot(a, 1)] = 0.5 * (1.0 + ra - rap);
      o.w[slot(ap, 1)] = 1.0 - o.w[slot(a, 1)];
    }
  } else {
    o.distance_sq = sq(rap) + sq(rapp);
    o.w[slot(a, 1)] = 0.5 * (1.0 + ra);
    o.w[slot(a, -1)] = 1.0 - o.w[slot(a, 1)];
  }
  return o;
}

inline Eigen::Vector3d case2_pseudo(const Vec3& r, const std::array<int, 3>& s) {
  const Vec3 sr(s[0] * r[0], s[1] * r[1], s[2] * r[2]);
  const double total = sr.sum();
  return ((Eigen::Array3d::Ones() + 3.0 * sr.array() - total) / 3.0).matrix();
}

inline PauliOutcome case2_canonical(const Reflection& c, const std::array<int, 3>& s) {
  const Vec3& r = c.r;
  const Eigen::Vector3d pseudo = case2_pseudo(r, s);
  constexpr std::array<Axis, 3> axes{Axis::X, Axis::Y, Axis::Z};
  PauliOutcome o;
  if ((pseudo.array() >= 0.0).all()) {
    o.distance_sq = sq(1.0 - (s[0] * r[0] + s[1] * r[1] + s[2] * r[2])) / 3.0;
    for (std::size_t i = 0; i < 3; ++i) o.w[slot(axes[i], s[i])] = pseudo[static_cast<Eigen::Index>(i)];
    return o;
  }

  const int plus = static_cast<int>(std::count(s.begin(), s.end(), 1));
  std::optional<PauliOutcome> best;
  auto offer = [&](const PauliOutcome& cand) {
    if (!best || cand.distance_sq < best->distance_sq) best = cand;
  };

  for (std::size_t neg = 0; neg < 3; ++neg) {
    if (pseudo[static_cast<Eigen::Index>(neg)] >= 0.0) continue;
    if (plus == 0 || plus == 3) {
      // Common sign: the opposite edge.
      const int sc = s[0];
      const Axis a = axes[neg];
      const Axis ap = axes[(neg + 1) % 3 < (neg + 2) % 3 ? (neg + 1) % 3 : (neg + 2) % 3];
      const Axis app = third_axis(a, ap);
      PauliOutcome cand;
      cand.distance_sq = sq(c.at(a)) + 0.5 * sq(c.at(ap) + c.at(app) - sc);
      cand.w[slot(ap, sc)] = 0.5 * (1.0 + sc * (c.at(ap) - c.at(app)));
      cand.w[slot(app, sc)] = 1.0 - cand.w[slot(ap, sc)];
      offer(cand);
    } else if (plus == 1) {
      // One + axis a; the negative pseudo-probability sits on a minus axis a'.
      const auto a_idx = static_cast<std::size_t>(std::find(s.begin(), s.end(), 1) - s.begin());
      const Axis a = axes[a_idx];
      const Axis ap = axes[neg];
      const Axis app = third_axis(a, ap);
      PauliOutcome cand;
      if (c.at(a) + c.at(app) <= 1.0) {
        cand.distance_sq = sq(c.at(ap)) + 0.5 * sq(c.at(a) - c.at(app) - 1.0);
        cand.w[slot(a, 1)] = 0.5 * (1.0 + c.at(a) + c.at(app));
        cand.w[slot(app, -1)] = 1.0 - cand.w[slot(a, 1)];
      } else {
        cand.distance_sq = 1.0 + r.squaredNorm() - 2.0 * c.at(a);
        cand.w[slot(a, 1)] = 1.0;
      }
      offer(cand);
    } else {
      // Two + axes a < a'; only the minus axis a'' can go negative.
      const Axis app = axes[neg];
      const Axis a = axes[neg == 0 ? 1 : 0];
      const Axis ap = third_axis(a, app);
      PauliOutcome cand;
      cand.distance_sq = sq(c.at(app)) + 0.5 * sq(c.at(a) + c.at(ap) - 1.0);
      cand.w[slot(a, 1)] = 0.5 * (1.0 + c.at(a) - c.at(ap));
      cand.w[slot(ap, 1)] = 1.0 - cand.w[slot(a, 1)];
      offer(cand);
    }
  }
  return *best;
}

inline PauliOutcome case3_canonical(const Reflection& c, Axis a, Axis ap) {
  const Axis app = third_axis(a, ap);
  const double ra = c.at(a), rap = c.at(ap);
  const double lambda = ra + rap;
  PauliOutcome o;
  if (lambda <= 1.0) {
    o.distance_sq = sq(c.at(app));
    o.w[slot(a, 1)] = ra;
    o.w[slot(ap, -1)] = 0.5 * (1.0 - lambda);
    o.w[slot(ap, 1)] = 1.0 - ra - o.w[slot(ap, -1)];

    PauliSlots other{};
    other[slot(ap, 1)] = rap;
    other[slot(a, -1)] = 0.5 * (1.0 - lambda);
    other[slot(a, 1)] = 1.0 - rap - other[slot(a, -1)];
    for (std::size_t i = 0; i < 6; ++i)
      if (std::abs(other[i] - o.w[i]) > 1e-15) o.degenerate = true;
  } else {
    o.distance_sq = sq(c.at(app)) + 0.5 * sq(lambda - 1.0);
    o.w[slot(a, 1)] = 0.5 * (1.0 + ra - rap);
    o.w[slot(ap, 1)] = 1.0 - o.w[slot(a, 1)];
  }
  return o;
}

inline Eigen::Vector4d case4_pseudo(const Vec3& r, Axis a, Axis ap, int s3, int s4) {
  const Axis app = third_axis(a, ap);
  const double ra = r[static_cast<Eigen::Index>(index_of(a))];
  const double t3 = s3 * r[static_cast<Eigen::Index>(index_of(ap))];
  const double t4 = s4 * r[static_cast<Eigen::Index>(index_of(app))];
  return {0.5 * (1.0 + ra - t3 - t4), 0.5 * (1.0 - ra - t3 - t4), t3, t4};
}

inline PauliOutcome case4_canonical(const Reflection& c, Axis a, Axis ap, int s3, int s4,
                                    double tie) {
  const Axis app = third_axis(a, ap);
  const Eigen::Vector4d pseudo = case4_pseudo(c.r, a, ap, s3, s4);
  if ((pseudo.array() >= 0.0).all()) {
    PauliOutcome o;
    o.w[slot(a, 1)] = pseudo[0];
    o.w[slot(a, -1)] = pseudo[1];
    o.w[slot(ap, s3)] = pseudo[2];
    o.w[slot(app, s4)] = pseudo[3];
    return o;
  }

  // Faces in index order (1,2,3), (1,2,4), (1,3,4), (2,3,4).
  std::array<int, 3> with_plus{}, with_minus{};
  with_plus[index_of(a)] = 1;
  with_minus[index_of(a)] = -1;
  with_plus[index_of(ap)] = with_minus[index_of(ap)] = s3;
  with_plus[index_of(app)] = with_minus[index_of(app)] = s4;
  const std::array<PauliOutcome, 4> faces{
      case1_canonical(c, a, ap, s3), case1_canonical(c, a, app, s4),
      case2_canonical(c, with_plus), case2_canonical(c, with_minus)};
  std::size_t best = 0;
  for (std::size_t i = 1; i < faces.size(); ++i)
    if (std::sqrt(faces[i].distance_sq) < std::sqrt(faces[best].distance_sq) - tie) best = i;
  return faces[best];
}

inline ApproximationResult assemble(const BlochVector& target,
                                    const std::vector<PauliStateSpec>& specs,
                                    const PauliSlots& w, double distance_sq, Branch branch,
                                    std::optional<Eigen::VectorXd> pseudo, bool degenerate) {
  const StateSet states = pauli_states(specs);
  Eigen::VectorXd p(static_cast<Eigen::Index>(specs.size()));
  for (std::size_t i = 0; i < specs.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = w[slot(specs[i])];
  auto res = finalize(target, states, std::move(p), branch, std::move(pseudo));
  res.distance = std::sqrt(std::max(0.0, distance_sq));
  res.degenerate_weights = degenerate;
  return res;
}

inline void check_distinct(Axis a, Axis b) {
  if (a == b) throw ContractError("Pauli case: the two axes must differ");
}

inline void check_sign(int s) {
  if (s != 1 && s != -1) throw ContractError("Pauli case: eigenvalue sign must be +1 or -1");
}

} // namespace detail

/// States (+a, -a, s3 a'). s3 = +1 with r_a + r_a' <= 1 reproduces the target
/// up to its a'' component: D = |r_a''|, p2 = (1 - r_a - r_a')/2, p3 = r_a'.
inline ApproximationResult solve_case1(const BlochVector& target, Axis a, Axis ap, int s3) {
  detail::check_distinct(a, ap);
  detail::check_sign(s3);
  const detail::Reflection c(target);
  const auto o = detail::case1_canonical(c, a, ap, c.sign(ap, s3));

  const double ra = target[index_of(a)], t3 = s3 * target[index_of(ap)];
  const double p2 = 0.5 * (1.0 - ra - t3);
  const Eigen::Vector3d pseudo(1.0 - p2 - t3, p2, t3);
  const Branch branch =
      (pseudo.array() >= 0.0).all() ? Branch::TripleInterior : Branch::PairFallback;
  return detail::assemble(target, {{a, 1}, {a, -1}, {ap, s3}}, c.unreflect(o.w), o.distance_sq,
                          branch, Eigen::VectorXd(pseudo), false);
}

/// States (sx e_x, sy e_y, sz e_z). Feasible pseudo-probabilities give
/// D = |1 - s.r| / sqrt(3); otherwise the closest edge or vertex.
inline ApproximationResult solve_case2(const BlochVector& target, int sx, int sy, int sz) {
  detail::check_sign(sx);
  detail::check_sign(sy);
  detail::check_sign(sz);
  const detail::Reflection c(target);
  const std::array<int, 3> s{sx, sy, sz};
  const std::array<int, 3> sc{c.sign(Axis::X, sx), c.sign(Axis::Y, sy), c.sign(Axis::Z, sz)};
  const auto o = detail::case2_canonical(c, sc);

  const Eigen::Vector3d pseudo = detail::case2_pseudo(target.vec(), s);
  const Branch branch =
      (pseudo.array() >= 0.0).all() ? Branch::TripleInterior : Branch::PairFallback;
  return detail::assemble(target, {{Axis::X, sx}, {Axis::Y, sy}, {Axis::Z, sz}},
                          c.unreflect(o.w), o.distance_sq, branch, Eigen::VectorXd(pseudo),
                          false);
}

/// States (+a, -a, +a', -a'), rank 3. With Lambda = |r_a| + |r_a'| <= 1 the
/// distance is |r_a''| and two weight assignments are optimal; the one that
/// leaves -a empty is returned and degenerate_weights is set.
inline ApproximationResult solve_case3(const BlochVector& target, Axis a, Axis ap) {
  detail::check_distinct(a, ap);
  const detail::Reflection c(target);
  const auto o = detail::case3_canonical(c, a, ap);
  return detail::assemble(target, {{a, 1}, {a, -1}, {ap, 1}, {ap, -1}}, c.unreflect(o.w),
                          o.distance_sq, Branch::SubsetEnum, std::nullopt, o.degenerate);
}

/// States (+a, -a, s3 a', s4 a''), rank 4. Exact when s3 = s4 = +1 (after
/// reflection) and the target lies inside the octahedron face; otherwise the
/// best of the four triangular faces.
inline ApproximationResult solve_case4(const BlochVector& target, Axis a, Axis ap, int s3, int s4,
                                       const Tolerances& tol = {}) {
  detail::check_distinct(a, ap);
  detail::check_sign(s3);
  detail::check_sign(s4);
  const Axis app = third_axis(a, ap);
  const detail::Reflection c(target);
  const auto o = detail::case4_canonical(c, a, ap, c.sign(ap, s3), c.sign(app, s4), tol.tie);

  const Eigen::Vector4d pseudo = detail::case4_pseudo(target.vec(), a, ap, s3, s4);
  const Branch branch =
      (pseudo.array() >= 0.0).all() ? Branch::QuadExact : Branch::TripleFallback;
  return detail::assemble(target, {{a, 1}, {a, -1}, {ap, s3}, {app, s4}}, c.unreflect(o.w),
                          o.distance_sq, branch, Eigen::VectorXd(pseudo), false);
}

namespace detail {

/// Best of the fifteen 4-subsets of the six eigenstates, in slot space of the
/// reflected target. Subsets are visited in lexicographic order of slots.
inline PauliOutcome six_canonical(const Reflection& c, double tie) {
  const auto specs = six_pauli_specs();
  std::optional<PauliOutcome> best;
  for_each_combination(6, 4, [&](const std::vector<std::size_t>& idx) {
    std::array<int, 3> count{};
    for (auto i : idx) ++count[index_of(specs[i].axis)];
    std::vector<Axis> pairs;
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
      if (count[index_of(ax)] == 2) pairs.push_back(ax);

    PauliOutcome o;
    if (pairs.size() == 2) {
      o = case3_canonical(c, pairs[0], pairs[1]);
    } else {
      std::vector<PauliStateSpec> singles;
      for (auto i : idx)
        if (specs[i].axis != pairs[0]) singles.push_back(specs[i]);
      o = case4_canonical(c, pairs[0], singles[0].axis, singles[0].sign, singles[1].sign, tie);
    }
    if (!best || std::sqrt(o.distance_sq) < std::sqrt(best->distance_sq) - tie) best = o;
  });
  return *best;
}

} // namespace detail

/// All six eigenstates, weights in the order +x, -x, +y, -y, +z, -z. The
/// distance is zero exactly when |r_x| + |r_y| + |r_z| <= 1.
inline ApproximationResult six_state_solution(const BlochVector& target,
                                              const Tolerances& tol = {}) {
  const detail::Reflection c(target);
  const auto o = detail::six_canonical(c, tol.tie);
  return detail::assemble(target, six_pauli_specs(), c.unreflect(o.w), o.distance_sq,
                          Branch::SubsetEnum, std::nullopt, o.degenerate);
}

inline ApproximationResult six_state_solution(const TargetParams& t, const Tolerances& tol = {}) {
  return six_state_solution(bloch_from_params(t), tol);
}

namespace detail {

/// Re-expresses a case result computed over case_specs in the order of specs
/// (same set, different order).
inline ApproximationResult reorder(const BlochVector& target, const ApproximationResult& res,
                                   const std::vector<PauliStateSpec>& case_specs,
                                   const std::vector<PauliStateSpec>& specs) {
  PauliSlots w{};
  PauliSlots pseudo_slots{};
  for (std::size_t i = 0; i < case_specs.size(); ++i) {
    w[slot(case_specs[i])] = res.weights[i];
    if (res.pseudo_probabilities)
      pseudo_slots[slot(case_specs[i])] = (*res.pseudo_probabilities)[static_cast<Eigen::Index>(i)];
  }
  std::optional<Eigen::VectorXd> pseudo;
  if (res.pseudo_probabilities) {
    pseudo = Eigen::VectorXd(static_cast<Eigen::Index>(specs.size()));
    for (std::size_t i = 0; i < specs.size(); ++i)
      (*pseudo)[static_cast<Eigen::Index>(i)] = pseudo_slots[slot(specs[i])];
  }
  return assemble(target, specs, w, res.distance * res.distance, res.branch, std::move(pseudo),
                  res.degenerate_weights);
}

} // namespace detail

/// Dispatches a PauliProblem to the matching case; weights follow the order of
/// problem.specs.
inline ApproximationResult solve_pauli(const PauliProblem& problem, const Tolerances& tol = {}) {
  const auto& specs = problem.specs;
  const BlochVector& t = problem.target;
  std::array<int, 3> count{};
  for (const auto& s : specs) ++count[index_of(s.axis)];
  std::vector<Axis> pairs;
  for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
    if (count[index_of(ax)] == 2) pairs.push_back(ax);
  std::vector<PauliStateSpec> singles;
  for (const auto& s : specs)
    if (std::find(pairs.begin(), pairs.end(), s.axis) == pairs.end()) singles.push_back(s);
  std::sort(singles.begin(), singles.end(), [](const PauliStateSpec& l, const PauliStateSpec& r) {
    return index_of(l.axis) < index_of(r.axis);
  });

  if (specs.size() == 6)
    return detail::reorder(t, six_state_solution(t, tol), six_pauli_specs(), specs);
  if (specs.size() == 3 && pairs.empty()) {
    const auto res = solve_case2(t, singles[0].sign, singles[1].sign, singles[2].sign);
    return detail::reorder(t, res, singles, specs);
  }
  if (specs.size() == 3) {
    const Axis a = pairs[0];
    const auto res = solve_case1(t, a, singles[0].axis, singles[0].sign);
    return detail::reorder(t, res, {{a, 1}, {a, -1}, singles[0]}, specs);
  }
  if (pairs.size() == 2) {
    const auto res = solve_case3(t, pairs[0], pairs[1]);
    return detail::reorder(t, res, {{pairs[0], 1}, {pairs[0], -1}, {pairs[1], 1}, {pairs[1], -1}},
                           specs);
  }
  const Axis a = pairs[0];
  const auto res = solve_case4(t, a, singles[0].axis, singles[0].sign, singles[1].sign, tol);
  return detail::reorder(t, res, {{a, 1}, {a, -1}, singles[0], singles[1]}, specs);
}

} // namespace qapprox
