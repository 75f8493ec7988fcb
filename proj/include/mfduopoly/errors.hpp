#pragma once

#include <stdexcept>
#include <string>

namespace mfd {

enum class ErrorKind {
  Input,
  UnsupportedDistribution,
  Solver,
  Consistency,
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

// Argument outside its documented domain.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

// Operation needs concrete atoms but got a mean-only law.
class UnsupportedDistributionError : public Error {
 public:
  explicit UnsupportedDistributionError(const std::string& what)
      : Error(ErrorKind::UnsupportedDistribution, what) {}
};

// Root bracket failure, iteration cap, residual above tolerance.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

// Two independent routes to the same quantity disagree.
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what)
      : Error(ErrorKind::Consistency, what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(ErrorKind::Io, path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace mfd
