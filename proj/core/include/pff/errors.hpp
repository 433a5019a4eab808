#pragma once

#include <stdexcept>
#include <string>

namespace pff {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user input (material, mesh, config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced while assembling an element or DOF.
class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, int index) : Error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

/// Symmetric factorization met a non-positive pivot.
class IndefiniteMatrixError : public Error {
 public:
  IndefiniteMatrixError(const std::string& what, int pivot) : Error(what), pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// Line search invoked along a direction with non-negative initial slope.
class NotDescentError : public Error {
 public:
  NotDescentError(const std::string& what, double slope) : Error(what), slope_(slope) {}
  double slope() const { return slope_; }

 private:
  double slope_;
};

/// Inner minimization of a cone split did not reach stationarity.
class ConeSplitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Requested restart state cannot be produced (e.g. the reference run failed earlier).
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace pff
