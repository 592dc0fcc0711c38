#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qapprox {

/// Caller broke a documented precondition (wrong length, rank too low, ...).
class ContractError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Parameter outside its mathematical domain, e.g. a > 1 in TargetParams.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A value that parsed fine but is not a physical state / feasible weight.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input text. `where` names the offending field or line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}

  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

/// The numerical oracle ran out of iterations.
class OracleNonConvergence : public std::runtime_error {
public:
  OracleNonConvergence(const std::string& what, std::size_t iterations)
      : std::runtime_error(what), iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::size_t iterations_;
};

} // namespace qapprox
