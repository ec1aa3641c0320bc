#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hkgame {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed edge-list document.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Graph violates the simple/undirected/connected assumptions.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Invalid game or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Boundary matrix H(t_f) (or its social counterpart) is numerically singular,
/// so no unique open-loop solution exists at this configuration.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}

  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace hkgame
