// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every solver result and oracle run produced along the way feeds
// the KKT check (AC2) and the monotone-descent check (AC9), so those two run
// last.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qapprox/qapprox.hpp"
#include "test_support.hpp"

using namespace qapprox;

namespace {

constexpr double kPi = std::numbers::pi;

struct Audit {
  std::size_t results = 0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  std::size_t oracle_runs = 0;
  std::size_t non_monotone = 0;
  double max_increase = 0.0;
} audit;

ApproximationResult record(ApproximationResult r) {
  ++audit.results;
  audit.stationarity = std::max(audit.stationarity, r.diagnostics.stationarity_residual);
  audit.complementarity = std::max(audit.complementarity, r.diagnostics.complementarity_residual);
  return r;
}

ApproximationResult solved(const BlochVector& t, const StateSet& s) { return record(solve(t, s)); }

OracleResult oracle(const BlochVector& t, const StateSet& s) {
  auto o = oracle_solve(t, s);
  ++audit.oracle_runs;
  if (!o.monotone) ++audit.non_monotone;
  audit.max_increase = std::max(audit.max_increase, o.max_increase);
  return o;
}

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// An escaping exception fails that criterion only.
void guarded(const char* id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void ac1() {
  qtest::Rng rng(1001);
  const auto t0 = std::chrono::steady_clock::now();
  double max_abs = 0.0, max_excess = -1.0;
  int bad = 0;
  for (int n = 0; n < 1000; ++n) {
    const auto s = rng.states(static_cast<std::size_t>(rng.integer(2, 8)));
    const auto t = rng.in_ball();
    const double dc = solved(t, s).distance;
    const double dor = oracle(t, s).distance;
    max_abs = std::max(max_abs, std::abs(dc - dor));
    max_excess = std::max(max_excess, dc - dor);
    if (std::abs(dc - dor) > 1e-5 || dc > dor + 1e-7) ++bad;
  }
  const double secs = seconds_since(t0);
  report("AC1", bad == 0 && secs < 30.0,
         fmt("closed form vs oracle, 1000 random instances, N in 2..8: max|dD| = %.2e (tol 1e-5), "
             "max(D_closed - D_oracle) = %.2e (tol 1e-7), violations %d, %.2f s (limit 30 s)",
             max_abs, max_excess, bad, secs));
}

void ac3() {
  struct Case {
    BlochVector r_o, r1, r2;
    Branch want;
  };
  const std::vector<Case> cases{
      {{0.5, 0.5, 0}, {1, 0, 0}, {0, 0, 0}, Branch::Interior},
      {{-0.3, 0, 0}, {1, 0, 0}, {0, 0, 0}, Branch::ClampLow},
      {{-0.3, 0, 0}, {0, 0, 0}, {1, 0, 0}, Branch::ClampHigh},
  };
  bool ok = true;
  double worst = 0.0;
  std::string seen;
  for (const auto& c : cases) {
    const auto r = record(solve_pair(c.r_o, c.r1, c.r2));
    const Vec3 e = c.r1.vec() - c.r2.vec();
    const double g = (c.r_o.vec() - c.r2.vec()).dot(e), h = e.squaredNorm();
    double want = 0.0;
    switch (c.want) {
    case Branch::Interior: want = std::sqrt((c.r_o.vec() - c.r2.vec()).squaredNorm() - g * g / h); break;
    case Branch::ClampLow: want = trace_distance(c.r_o, c.r2); break;
    default: want = trace_distance(c.r_o, c.r1); break;
    }
    worst = std::max(worst, std::abs(r.distance - want));
    ok = ok && r.branch == c.want && std::abs(r.distance - want) <= 1e-12;
    seen += (seen.empty() ? "" : ", ") + std::string(to_string(r.branch));
  }
  report("AC3", ok,
         "pair branches hit: " + seen + fmt("; max |D - branch formula| = %.2e (tol 1e-12)", worst));
}

void ac4() {
  qtest::Rng rng(1004);
  double worst = 0.0;
  bool have_pseudo = true;
  int checked = 0;
  while (checked < 100) {
    const auto t = rng.in_ball();
    const Vec3 r1 = rng.state().vec(), r2 = rng.state().vec(), r3 = rng.state().vec();
    const double h1 = (r1 - r2).squaredNorm(), h3 = (r3 - r2).squaredNorm();
    const double d = h1 * h3 - std::pow((r1 - r2).dot(r3 - r2), 2);
    if (d < 1e-3 * h1 * h3) continue;
    const Vec3 o = t.vec();
    const Eigen::Matrix3d m1 = (o - r2) * (r2 - r3).transpose() - (r2 - r3) * (o - r2).transpose();
    const Eigen::Matrix3d m2 = (r1 - r3) * (o - r1).transpose() - (o - r1) * (r1 - r3).transpose();
    const double p1 = (r1 - r2).dot(m1 * (r2 - r3)) / d;
    const double p2 = (r1 - r2).dot(m2 * (r1 - r3)) / d;
    const std::array<double, 3> want{p1, p2, 1 - p1 - p2};
    const auto r = record(solve_triple(t, BlochVector(r1), BlochVector(r2), BlochVector(r3)));
    ++checked;
    if (!r.pseudo_probabilities) {
      have_pseudo = false;
      continue;
    }
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs((*r.pseudo_probabilities)[i] - want[i]) /
                                  std::max(1.0, std::abs(want[i])));
  }

  // Collinear triples must fall back to the best of the three pairs.
  double pair_gap = 0.0;
  int fallbacks = 0;
  for (int n = 0; n < 100; ++n) {
    const Vec3 u = rng.unit();
    const Vec3 base = rng.in_ball().vec() * 0.3;
    std::vector<BlochVector> pts;
    for (int i = 0; i < 3; ++i) pts.emplace_back(base + u * rng.uniform(-0.6, 0.6));
    const auto t = rng.in_ball();
    const auto r = record(solve_triple(t, pts[0], pts[1], pts[2]));
    if (r.branch == Branch::PairFallback) ++fallbacks;
    const double best = std::min({solve_pair(t, pts[0], pts[1]).distance,
                                  solve_pair(t, pts[0], pts[2]).distance,
                                  solve_pair(t, pts[1], pts[2]).distance});
    pair_gap = std::max(pair_gap, std::abs(r.distance - best));
  }
  report("AC4", have_pseudo && worst <= 1e-9 && fallbacks == 100 && pair_gap <= 1e-12,
         fmt("100 non-degenerate triples: max relative error of p~ vs explicit formulas = %.2e (tol 1e-9); "
             "100 collinear triples: %d/100 PairFallback, max |D - best pair| = %.2e (tol 1e-12)",
             worst, fallbacks, pair_gap));
}

void ac5() {
  qtest::Rng rng(1005);
  // Targets inside the hull of four affinely independent states.
  double quad_d = 0.0, quad_res = 0.0;
  int quads = 0, not_exact = 0;
  while (quads < 200) {
    const auto s = rng.states(4);
    if (matrix_rank(s) != 4) continue;
    const auto w = rng.simplex(4);
    const auto t = mix(s, MixtureWeights(w));
    const auto r = record(solve_quad_full_rank(t, s));
    if (r.branch != Branch::QuadExact || !r.pseudo_probabilities) ++not_exact;
    quad_d = std::max(quad_d, r.distance);
    if (r.pseudo_probabilities) {
      Eigen::Vector4d rhs;
      rhs << t.vec(), 1.0;
      quad_res = std::max(quad_res,
                          (DecompositionMatrix(s).matrix() * *r.pseudo_probabilities - rhs).norm());
    }
    ++quads;
  }

  // Caratheodory reduction of random decompositions.
  double mix_res = 0.0;
  int over_rank = 0;
  for (int n = 0; n < 500; ++n) {
    const auto s = rng.states(static_cast<std::size_t>(rng.integer(1, 10)));
    const Decomposition d(s, MixtureWeights(rng.simplex(s.size())));
    const auto red = reduce(d);
    mix_res = std::max(mix_res, (mix(s, red.weights()).vec() - d.mixed_bloch().vec()).norm());
    if (static_cast<int>(red.support().size()) > matrix_rank(s)) ++over_rank;
  }

  // N = 6: subset enumeration against the oracle.
  double six_gap = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto s = rng.states(6);
    const auto t = rng.in_ball();
    six_gap = std::max(six_gap, std::abs(solved(t, s).distance - oracle(t, s).distance));
  }
  report("AC5", not_exact == 0 && quad_d <= 1e-10 && quad_res <= 1e-10 && mix_res <= 1e-10 &&
                    over_rank == 0 && six_gap <= 1e-6,
         fmt("200 rank-4 hull targets: %d not QuadExact, max D = %.2e, max |A p~ - [r;1]| = %.2e "
             "(tol 1e-10); 500 reductions: max mixture drift = %.2e (tol 1e-10), %d above rank; "
             "200 N=6 sets: max |D - D_oracle| = %.2e (tol 1e-6)",
             not_exact, quad_d, quad_res, mix_res, over_rank, six_gap));
}

std::vector<std::vector<PauliStateSpec>> pauli_configurations() {
  std::vector<std::vector<PauliStateSpec>> out;
  const std::array<Axis, 3> axes{Axis::X, Axis::Y, Axis::Z};
  for (Axis a : axes)
    for (Axis ap : axes) {
      if (ap == a) continue;
      for (int s3 : {1, -1}) out.push_back({{a, 1}, {a, -1}, {ap, s3}});
    }
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) out.push_back({{Axis::X, sx}, {Axis::Y, sy}, {Axis::Z, sz}});
  for (Axis a : axes)
    for (Axis ap : axes)
      if (index_of(ap) > index_of(a)) out.push_back({{a, 1}, {a, -1}, {ap, 1}, {ap, -1}});
  for (Axis a : axes) {
    const Axis ap = a == Axis::X ? Axis::Y : Axis::X;
    const Axis app = third_axis(a, ap);
    for (int s3 : {1, -1})
      for (int s4 : {1, -1}) out.push_back({{a, 1}, {a, -1}, {ap, s3}, {app, s4}});
  }
  out.push_back(six_pauli_specs());
  return out;
}

void ac6() {
  const auto configs = pauli_configurations();
  double worst = 0.0, case3 = 0.0;
  std::size_t comparisons = 0, case3_points = 0;
  for (int ia = 0; ia < 10; ++ia)
    for (int ik = 0; ik < 10; ++ik)
      for (int ip = 0; ip < 10; ++ip) {
        const TargetParams tp{ia / 9.0, ik / 9.0, 2 * kPi * ip / 10.0};
        const auto t = bloch_from_params(tp);
        for (const auto& specs : configs) {
          const auto closed = record(solve_pauli(PauliProblem(t, specs)));
          const auto general = solved(t, pauli_states(specs));
          worst = std::max(worst, std::abs(closed.distance - general.distance));
          ++comparisons;
        }
        if (std::abs(t.x()) + std::abs(t.y()) <= 1.0) {
          const auto r = record(solve_case3(t, Axis::X, Axis::Y));
          case3 = std::max(case3, std::abs(r.distance - std::abs(t.z())));
          ++case3_points;
        }
      }
  report("AC6", worst <= 1e-9 && case3 <= 1e-12 && case3_points > 0,
         fmt("10x10x10 (a, k, phi) grid x %zu configurations (%zu comparisons): "
             "max |D_closed - D_solve| = %.2e (tol 1e-9); Case 3 {+-x,+-y}, %zu points with "
             "Lambda <= 1: max |D - |r_oz|| = %.2e",
             configs.size(), comparisons, worst, case3_points, case3));
}

struct FixtureSweep {
  const char* name;
  SweepParam param;
  SweepRange range;
  std::vector<TargetParams> curves;  // fixed values, one curve each
  bool allow_invalid = false;
};

std::vector<FixtureSweep> fixture_sweeps() {
  const std::array<double, 4> quarter{0.2, 0.4, 0.6, 0.8};
  std::vector<FixtureSweep> out;
  auto add = [&](const char* name, SweepParam p, SweepRange r, auto make, bool allow = false) {
    FixtureSweep f{name, p, r, {}, allow};
    for (double v : quarter) f.curves.push_back(make(v));
    out.push_back(std::move(f));
  };
  const SweepRange unit{0.0, 1.0, 0.01}, turn{0.0, 2 * kPi, 2 * kPi / 100};
  add("ex1", SweepParam::A, unit, [](double k) { return TargetParams{0, k, 1.358 * kPi}; });
  add("ex2", SweepParam::K, unit, [](double a) { return TargetParams{a, 0, 0.4511 * kPi}; });
  add("ex3", SweepParam::Phi, turn, [](double k) { return TargetParams{0.7522, k, 0}; });
  {
    FixtureSweep f{"ex4", SweepParam::K, unit, {}, false};
    for (double phi : {kPi / 2, kPi, 3 * kPi / 2, 2 * kPi}) f.curves.push_back({0.3135, 0, phi});
    out.push_back(std::move(f));
  }
  add("ex5", SweepParam::Phi, turn, [](double a) { return TargetParams{a, 0.5625, 0}; });
  {
    FixtureSweep f{"ex6", SweepParam::A, unit, {}, true};
    for (double phi : {kPi / 2, kPi, 3 * kPi / 2, 2 * kPi}) f.curves.push_back({0, 0.5, phi});
    out.push_back(std::move(f));
  }
  return out;
}

void ac7() {
  bool ok = true;
  std::string detail;
  for (const auto& fs : fixture_sweeps()) {
    const auto fx = fixture(fs.name, {fs.allow_invalid});
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::size_t points = 0;
    for (const auto& fixed : fs.curves) {
      const auto grid = sweep_grid(fs.range);
      for (double v : grid) {
        SweepSpec spec;
        spec.param = fs.param;
        spec.fixed = fixed;
        const auto t = bloch_from_params(sweep_point(spec, v));
        worst = std::max(worst, std::abs(solved(t, fx.states).distance -
                                         oracle(t, fx.states).distance));
        ++points;
      }
    }
    const double secs = seconds_since(t0);
    ok = ok && worst <= 1e-6 && secs < 10.0;
    detail += fmt("%s%s %zu pts max|dD| %.1e %.2fs", detail.empty() ? "" : "; ", fs.name, points,
                  worst, secs);
  }
  report("AC7", ok, "fixture sweeps vs oracle (tol 1e-6, < 10 s each): " + detail);
}

void ac8() {
  const BlochVector up(0, 0, 1), down(0, 0, -1);
  const StateSet zz({up, down});
  double d_err = 0.0, w_err = 0.0;
  std::size_t points = 0;
  auto check = [&](const BlochVector& t) {
    const double d2 = t.x() * t.x() + t.y() * t.y();
    for (const auto& r : {record(solve_orthonormal_pair(t, up, down)), solved(t, zz)}) {
      d_err = std::max(d_err, std::abs(r.distance * r.distance - d2));
      w_err = std::max({w_err, std::abs(r.weights[0] - 0.5 * (1 + t.z())),
                        std::abs(r.weights[1] - 0.5 * (1 - t.z()))});
    }
    ++points;
  };
  for (int ia = 0; ia <= 20; ++ia)
    for (int ik = 0; ik <= 20; ++ik)
      for (int ip = 0; ip < 20; ++ip)
        check(bloch_from_params({ia / 20.0, ik / 20.0, 2 * kPi * ip / 20.0}));
  report("AC8", d_err <= 1e-12 && w_err <= 1e-12,
         fmt("{+z,-z} over %zu TargetParams points: max |D^2 - (r_ox^2 + r_oy^2)| = %.2e, "
             "max |p_+- - (1 +- r_oz)/2| = %.2e (tol 1e-12)",
             points, d_err, w_err));
}

void ac2() {
  report("AC2", audit.results > 0 && audit.stationarity <= 1e-8 && audit.complementarity <= 1e-8,
         fmt("KKT over all %zu results in this run: max stationarity = %.2e, max "
             "complementarity = %.2e (tol 1e-8)",
             audit.results, audit.stationarity, audit.complementarity));
}

void ac9() {
  qtest::Rng rng(1009);
  // Gradient against central differences.
  double grad_err = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto s = rng.states(static_cast<std::size_t>(rng.integer(2, 8)));
    const auto t = rng.in_ball();
    const Eigen::Matrix3Xd r = s.bloch_matrix();
    const Eigen::VectorXd p = rng.simplex(s.size());
    const Eigen::VectorXd g = oracle_gradient(t, r, p);
    Eigen::VectorXd fd(p.size());
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      Eigen::VectorXd hi = p, lo = p;
      hi[i] += h;
      lo[i] -= h;
      fd[i] = (oracle_objective(t, r, hi) - oracle_objective(t, r, lo)) / (2 * h);
    }
    grad_err = std::max(grad_err, (g - fd).norm() / std::max(1.0, g.norm()));
  }

  // Projection onto the 2-simplex against a 1e-3 grid search.
  constexpr int kSteps = 1000;
  double proj_excess = -1.0, proj_dev = 0.0;
  for (int n = 0; n < 20; ++n) {
    const Eigen::Vector3d v(rng.uniform(-1, 2), rng.uniform(-1, 2), rng.uniform(-1, 2));
    const Eigen::VectorXd p = simplex_project(v).vec();
    double best = 1e300;
    Eigen::Vector3d arg;
    for (int i = 0; i <= kSteps; ++i)
      for (int j = 0; i + j <= kSteps; ++j) {
        const Eigen::Vector3d q(i / double(kSteps), j / double(kSteps), (kSteps - i - j) / double(kSteps));
        const double dist = (q - v).squaredNorm();
        if (dist < best) {
          best = dist;
          arg = q;
        }
      }
    proj_excess = std::max(proj_excess, (p - v).norm() - std::sqrt(best));
    proj_dev = std::max(proj_dev, (p - arg).norm());
  }
  const bool proj_ok = proj_excess <= 1e-12 && proj_dev <= 2e-3;
  report("AC9", audit.oracle_runs > 0 && audit.non_monotone == 0 && grad_err <= 1e-6 && proj_ok,
         fmt("%zu oracle runs, %zu non-monotone (largest increase %.1e); gradient vs central "
             "differences: max relative error %.2e (tol 1e-6); simplex projection vs 1e-3 grid: "
             "excess distance %.1e, max deviation %.1e",
             audit.oracle_runs, audit.non_monotone, audit.max_increase, grad_err, proj_excess,
             proj_dev));
}

} // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  guarded("AC1", ac1);
  guarded("AC3", ac3);
  guarded("AC4", ac4);
  guarded("AC5", ac5);
  guarded("AC6", ac6);
  guarded("AC7", ac7);
  guarded("AC8", ac8);
  guarded("AC2", ac2);
  guarded("AC9", ac9);
  std::printf("%d of 9 criteria failed (%.1f s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
