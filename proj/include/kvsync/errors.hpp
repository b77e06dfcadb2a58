#pragma once

#include <stdexcept>
#include <string>

namespace kvsync {

/// Base class for every solver-level failure raised by the library.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  /// Short machine-readable tag ("non_convergence", "singular_parameters", ...).
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Parameters at which a closed-form expansion is undefined (e.g. alpha = F = 0).
class SingularParametersError : public SolverError {
 public:
  explicit SingularParametersError(const std::string& what)
      : SolverError("singular_parameters", what) {}
};

/// A root-finding bracket that does not change sign.
class BracketError : public SolverError {
 public:
  explicit BracketError(const std::string& what) : SolverError("bracket", what) {}
};

/// Dense eigen-decomposition failed.
class EigenSolverError : public SolverError {
 public:
  EigenSolverError(double h, const std::string& what)
      : SolverError("eigen_solver", what), h_(h) {}
  double h() const noexcept { return h_; }

 private:
  double h_;
};

/// Time integration produced non-finite values or an invalid normalization.
class BlowUpError : public SolverError {
 public:
  BlowUpError(std::string kind, double time, const std::string& what)
      : SolverError(std::move(kind), what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Fixed-point iteration ran out of iterations. Carries the last iterate.
template <class State>
class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(State last, int iterations, double residual, const std::string& what)
      : SolverError("non_convergence", what),
        last_(std::move(last)),
        iterations_(iterations),
        residual_(residual) {}

  const State& last_iterate() const noexcept { return last_; }
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  State last_;
  int iterations_;
  double residual_;
};

}  // namespace kvsync
