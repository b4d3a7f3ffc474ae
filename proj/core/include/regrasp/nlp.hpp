#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace regrasp {

using VectorFunction = std::function<double(const Eigen::VectorXd&)>;
using GradientFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// One scalar function with an optional analytic gradient. Without one the
/// solver falls back to central differences with the problem's fd_step.
struct NLPFunction {
  VectorFunction value;
  GradientFunction gradient = {};
};

/// min f(x) s.t. h(x) = 0, g(x) <= 0, lower <= x <= upper.
struct NLPProblem {
  int dim = 0;
  NLPFunction objective;
  std::vector<NLPFunction> eq_constraints;
  std::vector<NLPFunction> ineq_constraints;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double fd_step = 1e-6;

  /// Throws StructuralInputError on shape or bound inconsistencies.
  void validate() const;
};

struct NLPOptions {
  int max_outer = 60;
  int max_inner = 200;
  double feas_tol = 1e-4;
  double opt_tol = 1e-6;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e8;
  /// Largest per-coordinate change in one inner step.
  double max_step = 0.5;
};

enum class SolveStatus { kConverged, kConstraintToleranceMet, kIterationLimit, kNumericFailure };

std::string to_string(SolveStatus status);
/// Inverse of to_string; throws StructuralInputError on unknown names.
SolveStatus solve_status_from_string(const std::string& name);

struct NLPSolution {
  Eigen::VectorXd x;
  double objective_value = 0.0;
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
  SolveStatus status = SolveStatus::kNumericFailure;
  int iterations = 0;  // outer iterations
  bool start_clipped = false;
  std::int64_t objective_evals = 0;
  std::int64_t constraint_evals = 0;
  /// Objective of the accepted iterate after each outer iteration.
  std::vector<double> objective_trace;

  bool feasible(double feas_tol) const {
    return max_eq_violation <= feas_tol && max_ineq_violation <= feas_tol;
  }
  bool succeeded() const {
    return status == SolveStatus::kConverged || status == SolveStatus::kConstraintToleranceMet;
  }
};

/// Local constrained minimization: augmented-Lagrangian outer loop around a
/// projected quasi-Newton solve over the box. Never throws for numeric
/// trouble; non-finite values at the start yield kNumericFailure.
///
/// When `x0` is feasible the returned objective never exceeds f(x0): the
/// solver returns the best feasible outer iterate it has seen.
NLPSolution minimize(const NLPProblem& problem, const Eigen::VectorXd& x0, const NLPOptions& opts = {});

}  // namespace regrasp
