#pragma once

#include <stdexcept>
#include <string>

namespace ifm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of the model (t > 1, T below the
// K-factor pole, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Measured probabilities that no (t, phi) can produce.
class InconsistentDataError : public Error {
 public:
  using Error::Error;
};

class UndefinedPhaseError : public Error {
 public:
  using Error::Error;
};

class UndefinedEfficiencyError : public Error {
 public:
  using Error::Error;
};

class AnalysisError : public Error {
 public:
  enum class Kind { no_feature, ambiguous_feature, not_an_edge, wrong_mode };

  AnalysisError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Malformed or invalid run configuration. line() is 0 when the problem is not
// tied to a single line (a missing key, for instance).
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ifm
