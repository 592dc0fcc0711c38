#pragma once
//------------------------------------------------------------------------------
// Built-in state sets.
//
// ex1..ex6 keep the numbers exactly as printed (4 decimals) and convert them
// at load time. Printed "pure" states overshoot the unit sphere by up to a few
// 1e-5 because of that rounding; anything within kFixtureNormSlack is pulled
// back onto the sphere silently. ex6 r9 has norm ~1.55 and is refused unless
// allow_invalid_states is set, in which case it is renormalised with a warning.
//------------------------------------------------------------------------------
#include <array>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "errors.hpp"

namespace qapprox {

/// Norm overshoot tolerated as 4-decimal rounding of a unit vector.
inline constexpr double kFixtureNormSlack = 1e-3;

struct FixtureOptions {
  bool allow_invalid_states = false;
};

struct Fixture {
  std::string name;
  StateSet states;
  /// As labelled at the source, each confirmed to within kFixtureNormSlack.
  std::vector<bool> pure;
  std::vector<std::string> warnings;
};

namespace detail {

struct PrintedState {
  std::array<const char*, 3> r;
  bool pure;
};

struct PrintedKet {
  std::array<const char*, 2> amp;
};

// clang-format off
inline const std::vector<PrintedState>& printed_ex1() {
  static const std::vector<PrintedState> v{
      {{"0.7888", "0.1788", "-0.1182"}, false},
      {{"0.4715", "0.4288", "0.5066"}, false}};
  return v;
}

inline const std::vector<PrintedState>& printed_ex2() {
  static const std::vector<PrintedState> v{
      {{"-0.0347", "0.0178", "0.0088"}, false},
      {{"0.3369", "-0.7514", "-0.2106"}, false},
      {{"0.3784", "0.8012", "-0.4636"}, true}};
  return v;
}

inline const std::vector<PrintedState>& printed_ex3() {
  static const std::vector<PrintedState> v{
      {{"-0.3384", "0.2543", "0.4151"}, false},
      {{"0.6385", "0.0199", "0.5333"}, false},
      {{"0.1693", "0.0661", "0.0845"}, false},
      {{"0.5275", "-0.2657", "0.5443"}, false}};
  return v;
}

inline const std::vector<PrintedKet>& printed_ex4() {
  static const std::vector<PrintedKet> v{
      {{"0.9531-0.1605i", "-0.2363+0.1001i"}},
      {{"0.2495+0.0605i", "0.9665+0.0028i"}},
      {{"-0.6140+0.1652i", "-0.4624-0.6179i"}},
      {{"-0.3277+0.6988i", "0.6347+0.0374i"}}};
  return v;
}

inline const std::vector<PrintedState>& printed_ex5() {
  static const std::vector<PrintedState> v{
      {{"-0.4767", "0.5882", "-0.6051"}, false},
      {{"0.3041", "-0.2655", "0.1277"}, false},
      {{"0.0459", "-0.3519", "0.0202"}, false},
      {{"0.7263", "-0.1260", "-0.6758"}, true},
      {{"-0.5631", "-0.5566", "0.6108"}, true}};
  return v;
}

inline const std::vector<PrintedState>& printed_ex6() {
  static const std::vector<PrintedState> v{
      {{"-0.0192", "0.5339", "0.4067"}, false},
      {{"-0.0299", "0.0694", "0.1474"}, false},
      {{"0.1865", "-0.2202", "-0.0863"}, false},
      {{"0.4860", "-0.3405", "-0.5005"}, false},
      {{"-0.4864", "-0.4754", "-0.4707"}, false},
      {{"-0.5738", "-0.0250", "0.5583"}, false},
      {{"-0.0071", "0.0058", "-0.0298"}, false},
      {{"-0.5357", "-0.7338", "0.4177"}, true},
      {{"-0.9142", "-0.8936", "-0.8847"}, true},
      {{"0.4888", "0.8306", "0.2670"}, true}};
  return v;
}
// clang-format on

inline double parse_number(std::string_view s) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (end == str.c_str() || *end != '\0') throw ParseError("fixture", "bad number '" + str + "'");
  return v;
}

/// "a+bi" / "a-bi" with both parts present.
inline std::complex<double> parse_complex(std::string_view s) {
  if (s.empty() || s.back() != 'i') throw ParseError("fixture", "bad amplitude '" + std::string(s) + "'");
  const auto split = s.find_last_of("+-");
  if (split == 0 || split == std::string_view::npos)
    throw ParseError("fixture", "bad amplitude '" + std::string(s) + "'");
  return {parse_number(s.substr(0, split)), parse_number(s.substr(split, s.size() - split - 1))};
}

/// Bloch vector of the normalised ket (c0, c1):
///   r = (2 Re(c0 c1*), -2 Im(c0 c1*), |c0|^2 - |c1|^2) / <phi|phi>.
inline Vec3 ket_to_bloch(std::complex<double> c0, std::complex<double> c1) {
  const double n = std::norm(c0) + std::norm(c1);
  const auto c = c0 * std::conj(c1);
  return Vec3(2.0 * c.real(), -2.0 * c.imag(), std::norm(c0) - std::norm(c1)) / n;
}

inline void load_state(Fixture& f, const Vec3& v, bool pure, bool allow_invalid) {
  const std::size_t i = f.pure.size();
  const std::string what = f.name + " r" + std::to_string(i + 1);
  const double n = v.norm();
  Vec3 r = v;
  if (n > 1.0 + kFixtureNormSlack) {
    if (!allow_invalid)
      throw ValidationError(what + ": printed Bloch vector has norm " + std::to_string(n) +
                            " > 1 (pass --allow-invalid-states to renormalise it)");
    f.warnings.push_back(what + ": norm " + std::to_string(n) + " > 1, renormalised to the unit sphere");
    r /= n;
  } else if (n > 1.0) {
    r /= n;
  }
  if (pure && std::abs(n - 1.0) > kFixtureNormSlack && n <= 1.0 + kFixtureNormSlack)
    throw ValidationError(what + ": labelled pure but has norm " + std::to_string(n));
  f.pure.push_back(pure);
  f.states = StateSet([&] {
    auto s = f.states.states();
    s.push_back(BlochVector(r));
    return s;
  }());
}

inline Fixture from_printed(const std::string& name, const std::vector<PrintedState>& rows,
                            bool allow_invalid) {
  Fixture f;
  f.name = name;
  for (const auto& row : rows)
    load_state(f, Vec3(parse_number(row.r[0]), parse_number(row.r[1]), parse_number(row.r[2])),
               row.pure, allow_invalid);
  return f;
}

inline Fixture pauli_fixture(const std::string& name, const std::vector<Vec3>& v,
                             std::vector<std::string> labels) {
  Fixture f;
  f.name = name;
  std::vector<BlochVector> s;
  for (const auto& r : v) s.emplace_back(r);
  f.states = StateSet(std::move(s), std::move(labels));
  f.pure.assign(v.size(), true);
  return f;
}

} // namespace detail

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"ex1", "ex2", "ex3", "ex4", "ex5", "ex6",
                                              "pauli_xy", "pauli_xyz6"};
  return names;
}

inline Fixture fixture(const std::string& name, const FixtureOptions& opt = {}) {
  using detail::from_printed;
  if (name == "ex1") return from_printed(name, detail::printed_ex1(), opt.allow_invalid_states);
  if (name == "ex2") return from_printed(name, detail::printed_ex2(), opt.allow_invalid_states);
  if (name == "ex3") return from_printed(name, detail::printed_ex3(), opt.allow_invalid_states);
  if (name == "ex5") return from_printed(name, detail::printed_ex5(), opt.allow_invalid_states);
  if (name == "ex6") return from_printed(name, detail::printed_ex6(), opt.allow_invalid_states);
  if (name == "ex4") {
    Fixture f;
    f.name = name;
    for (const auto& ket : detail::printed_ex4())
      detail::load_state(f,
                         detail::ket_to_bloch(detail::parse_complex(ket.amp[0]),
                                              detail::parse_complex(ket.amp[1])),
                         true, opt.allow_invalid_states);
    return f;
  }
  if (name == "pauli_xy")
    return detail::pauli_fixture(name, {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY()},
                                 {"+x", "-x", "+y", "-y"});
  if (name == "pauli_xyz6")
    return detail::pauli_fixture(name,
                                 {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(),
                                  Vec3::UnitZ(), -Vec3::UnitZ()},
                                 {"+x", "-x", "+y", "-y", "+z", "-z"});
  throw ValidationError("unknown fixture '" + name + "'");
}

/// Every printed number of ex1..ex6, in file order, exactly as stored.
inline std::vector<std::string> fixture_printed_numbers() {
  std::vector<std::string> out;
  auto add = [&](const std::vector<detail::PrintedState>& rows) {
    for (const auto& row : rows)
      for (const char* c : row.r) out.emplace_back(c);
  };
  add(detail::printed_ex1());
  add(detail::printed_ex2());
  add(detail::printed_ex3());
  for (const auto& ket : detail::printed_ex4())
    for (const char* c : ket.amp) out.emplace_back(c);
  add(detail::printed_ex5());
  add(detail::printed_ex6());
  return out;
}

/// 64-bit FNV-1a over the printed numbers joined by '\n'.
inline std::uint64_t fixture_checksum() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  bool first = true;
  for (const auto& s : fixture_printed_numbers()) {
    if (!first) {
      h ^= static_cast<unsigned char>('\n');
      h *= 0x100000001b3ULL;
    }
    first = false;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

} // namespace qapprox
