#pragma once

#include <stdexcept>
#include <string>

namespace salfuse {

// Error categories double as the CLI exit-code taxonomy.
enum class ErrorKind {
  InvalidInput,
  DegenerateGraph,
  Convergence,
  Parse,
  Alignment,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ErrorKind::InvalidInput, what) {}
};

class DegenerateGraph : public Error {
 public:
  explicit DegenerateGraph(const std::string& what)
      : Error(ErrorKind::DegenerateGraph, what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::Convergence, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : Error(ErrorKind::Parse, file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what)
      : Error(ErrorKind::Alignment, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::Config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace salfuse
