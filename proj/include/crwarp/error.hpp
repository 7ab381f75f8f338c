#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace crwarp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input spans a space of too small dimension, or vectors are dependent.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ParityError : public Error {
 public:
  using Error::Error;
};

/// log of a non-positive value, sqrt of a negative, division by ~0, overflow.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonPositiveWarp : public Error {
 public:
  using Error::Error;
};

class NotImmersed : public Error {
 public:
  using Error::Error;
};

/// No D_T / D_perp split of the tangent space passes the CR residual tests.
class CRViolation : public Error {
 public:
  using Error::Error;
};

class GaugeError : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  UnknownVariable(std::string name, std::size_t position)
      : Error("unknown identifier '" + name + "' at position " +
              std::to_string(position)),
        name_(std::move(name)),
        position_(position) {}

  const std::string& name() const { return name_; }
  std::size_t position() const { return position_; }

 private:
  std::string name_;
  std::size_t position_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::vector<std::string> expected,
             const std::string& detail);

  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// Scenario validation failure; `field` is a dotted path such as "chart.n1".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& detail)
      : Error(field + ": " + detail), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace crwarp
