#include "regrasp/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "regrasp/errors.hpp"

namespace regrasp {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kConstraintToleranceMet:
      return "constraint-tolerance-met";
    case SolveStatus::kIterationLimit:
      return "iteration-limit";
    case SolveStatus::kNumericFailure:
      return "numeric-failure";
  }
  return "numeric-failure";
}

SolveStatus solve_status_from_string(const std::string& name) {
  for (auto s : {SolveStatus::kConverged, SolveStatus::kConstraintToleranceMet, SolveStatus::kIterationLimit,
                 SolveStatus::kNumericFailure}) {
    if (to_string(s) == name) return s;
  }
  throw StructuralInputError("unknown solver status '" + name + "'");
}

void NLPProblem::validate() const {
  if (dim <= 0) throw StructuralInputError("nlp: dimension must be positive");
  if (!objective.value) throw StructuralInputError("nlp: objective is missing");
  if (lower.size() != dim || upper.size() != dim) throw StructuralInputError("nlp: bounds have wrong length");
  for (int i = 0; i < dim; ++i) {
    if (!(lower[i] <= upper[i])) throw StructuralInputError("nlp: lower bound exceeds upper bound");
  }
  for (const auto& c : eq_constraints) {
    if (!c.value) throw StructuralInputError("nlp: empty equality constraint");
  }
  for (const auto& c : ineq_constraints) {
    if (!c.value) throw StructuralInputError("nlp: empty inequality constraint");
  }
  if (!(fd_step > 0.0)) throw StructuralInputError("nlp: finite-difference step must be positive");
}

namespace {

struct Sample {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd eq;
  Eigen::VectorXd ineq;
  bool finite = true;

  double eq_violation() const { return eq.size() ? eq.cwiseAbs().maxCoeff() : 0.0; }
  double ineq_violation() const { return ineq.size() ? std::max(0.0, ineq.maxCoeff()) : 0.0; }
  double violation() const { return std::max(eq_violation(), ineq_violation()); }
};

struct Multipliers {
  Eigen::VectorXd eq;
  Eigen::VectorXd ineq;
  double penalty = 10.0;
};

class Evaluator {
 public:
  Evaluator(const NLPProblem& problem, NLPSolution& counters) : p_(problem), counters_(counters) {}

  Sample evaluate(const Eigen::VectorXd& x) {
    Sample s;
    s.x = x;
    s.f = p_.objective.value(x);
    ++counters_.objective_evals;
    s.eq.resize(static_cast<Eigen::Index>(p_.eq_constraints.size()));
    s.ineq.resize(static_cast<Eigen::Index>(p_.ineq_constraints.size()));
    for (std::size_t i = 0; i < p_.eq_constraints.size(); ++i) s.eq[i] = p_.eq_constraints[i].value(x);
    for (std::size_t i = 0; i < p_.ineq_constraints.size(); ++i) s.ineq[i] = p_.ineq_constraints[i].value(x);
    counters_.constraint_evals += static_cast<std::int64_t>(p_.eq_constraints.size() + p_.ineq_constraints.size());
    s.finite = std::isfinite(s.f) && s.eq.allFinite() && s.ineq.allFinite();
    return s;
  }

  double merit(const Sample& s, const Multipliers& m) const {
    double value = s.f;
    for (Eigen::Index i = 0; i < s.eq.size(); ++i) {
      value += m.eq[i] * s.eq[i] + 0.5 * m.penalty * s.eq[i] * s.eq[i];
    }
    for (Eigen::Index i = 0; i < s.ineq.size(); ++i) {
      const double shifted = std::max(0.0, m.ineq[i] + m.penalty * s.ineq[i]);
      value += (shifted * shifted - m.ineq[i] * m.ineq[i]) / (2.0 * m.penalty);
    }
    return value;
  }

  /// Gradient of the augmented Lagrangian at a sample.
  Eigen::VectorXd merit_gradient(const Sample& s, const Multipliers& m) {
    const int n = p_.dim;
    const std::size_t n_eq = p_.eq_constraints.size();
    const std::size_t n_in = p_.ineq_constraints.size();

    // Functions without analytic gradients are differenced together so
    // that callers can share work between them at each probe point.
    std::vector<const NLPFunction*> numeric;
    std::vector<double> weights;
    double center = 0.0;  // weighted sum of the numeric functions at s.x
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    auto accumulate = [&](const NLPFunction& fn, double weight, double value) {
      if (weight == 0.0) return;
      if (fn.gradient) {
        grad += weight * fn.gradient(s.x);
      } else {
        numeric.push_back(&fn);
        weights.push_back(weight);
        center += weight * value;
      }
    };
    accumulate(p_.objective, 1.0, s.f);
    for (std::size_t i = 0; i < n_eq; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      accumulate(p_.eq_constraints[i], m.eq[k] + m.penalty * s.eq[k], s.eq[k]);
    }
    for (std::size_t i = 0; i < n_in; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      accumulate(p_.ineq_constraints[i], std::max(0.0, m.ineq[k] + m.penalty * s.ineq[k]), s.ineq[k]);
    }
    if (numeric.empty()) return grad;

    const bool objective_numeric = numeric.front() == &p_.objective;
    auto combined = [&](const Eigen::VectorXd& x) {
      double total = 0.0;
      for (std::size_t k = 0; k < numeric.size(); ++k) total += weights[k] * numeric[k]->value(x);
      counters_.objective_evals += objective_numeric ? 1 : 0;
      counters_.constraint_evals += static_cast<std::int64_t>(numeric.size()) - (objective_numeric ? 1 : 0);
      return total;
    };
    const double h = p_.fd_step;
    Eigen::VectorXd probe = s.x;
    for (int i = 0; i < n; ++i) {
      const bool can_up = s.x[i] + h <= p_.upper[i];
      const bool can_down = s.x[i] - h >= p_.lower[i];
      double d;
      if (can_up && can_down) {
        probe[i] = s.x[i] + h;
        const double up = combined(probe);
        probe[i] = s.x[i] - h;
        const double down = combined(probe);
        d = (up - down) / (2.0 * h);
      } else if (can_up) {
        probe[i] = s.x[i] + h;
        d = (combined(probe) - center) / h;
      } else if (can_down) {
        probe[i] = s.x[i] - h;
        d = (center - combined(probe)) / h;
      } else {
        d = 0.0;  // fixed variable
      }
      probe[i] = s.x[i];
      grad[i] += std::isfinite(d) ? d : 0.0;
    }
    return grad;
  }

 private:
  const NLPProblem& p_;
  NLPSolution& counters_;
};

Eigen::VectorXd clip(const Eigen::VectorXd& x, const NLPProblem& p) {
  return x.cwiseMax(p.lower).cwiseMin(p.upper);
}

struct InnerResult {
  Sample sample;
  bool converged = false;
};

InnerResult inner_solve(Evaluator& ev, const NLPProblem& p, const NLPOptions& opts, Sample start,
                        const Multipliers& m) {
  const int n = p.dim;
  Sample cur = std::move(start);
  double merit = ev.merit(cur, m);
  Eigen::VectorXd grad = ev.merit_gradient(cur, m);
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  for (int it = 0; it < opts.max_inner; ++it) {
    const Eigen::VectorXd projected = clip(cur.x - grad, p) - cur.x;
    if (projected.cwiseAbs().maxCoeff() <= opts.opt_tol) return {std::move(cur), true};

    std::vector<bool> active(n, false);
    for (int i = 0; i < n; ++i) {
      active[i] = (cur.x[i] <= p.lower[i] && grad[i] > 0.0) || (cur.x[i] >= p.upper[i] && grad[i] < 0.0);
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd dir = -inv_hessian * grad;
      for (int i = 0; i < n; ++i) {
        if (active[i]) dir[i] = 0.0;
      }
      if (!(grad.dot(dir) < 0.0)) {
        inv_hessian.setIdentity();
        scaled = false;
        dir = -grad;
        for (int i = 0; i < n; ++i) {
          if (active[i]) dir[i] = 0.0;
        }
      }
      const double largest = dir.cwiseAbs().maxCoeff();
      if (!(largest > 0.0)) break;
      if (largest > opts.max_step) dir *= opts.max_step / largest;

      double alpha = 1.0;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        const Eigen::VectorXd trial_x = clip(cur.x + alpha * dir, p);
        const Eigen::VectorXd step = trial_x - cur.x;
        if (step.cwiseAbs().maxCoeff() == 0.0) break;
        Sample trial = ev.evaluate(trial_x);
        if (!trial.finite) continue;
        const double trial_merit = ev.merit(trial, m);
        if (!std::isfinite(trial_merit) || trial_merit > merit + 1e-4 * grad.dot(step)) continue;

        const Eigen::VectorXd trial_grad = ev.merit_gradient(trial, m);
        const Eigen::VectorXd y = trial_grad - grad;
        const double sy = step.dot(y);
        if (sy > 1e-12 * step.norm() * y.norm() && sy > 0.0) {
          if (!scaled) {
            inv_hessian = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
            scaled = true;
          }
          const double rho = 1.0 / sy;
          const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * step * y.transpose();
          inv_hessian = left * inv_hessian * left.transpose() + rho * step * step.transpose();
        }
        const double decrease = merit - trial_merit;
        cur = std::move(trial);
        merit = trial_merit;
        grad = trial_grad;
        accepted = true;
        if (decrease <= 1e-16 * (1.0 + std::abs(merit)) && step.cwiseAbs().maxCoeff() <= 1e-13) {
          return {std::move(cur), false};
        }
        break;
      }
      if (!accepted) {
        if (!scaled && attempt == 0 && inv_hessian.isIdentity()) break;
        inv_hessian.setIdentity();
        scaled = false;
      }
    }
    if (!accepted) return {std::move(cur), false};
  }
  return {std::move(cur), false};
}

}  // namespace

NLPSolution minimize(const NLPProblem& problem, const Eigen::VectorXd& x0, const NLPOptions& opts) {
  problem.validate();
  if (x0.size() != problem.dim) throw StructuralInputError("nlp: start point has wrong length");

  NLPSolution sol;
  Evaluator ev(problem, sol);
  const Eigen::VectorXd start_x = clip(x0, problem);
  sol.start_clipped = (start_x.array() != x0.array()).any();

  auto finish = [&](const Sample& s, SolveStatus status) {
    sol.x = s.x;
    sol.objective_value = s.f;
    sol.max_eq_violation = s.eq_violation();
    sol.max_ineq_violation = s.ineq_violation();
    sol.status = status;
    return sol;
  };

  Sample cur = ev.evaluate(start_x);
  if (!cur.finite) return finish(cur, SolveStatus::kNumericFailure);

  const bool constrained = !problem.eq_constraints.empty() || !problem.ineq_constraints.empty();
  std::optional<Sample> best;
  if (cur.violation() <= opts.feas_tol) best = cur;

  Multipliers m;
  m.eq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.eq_constraints.size()));
  m.ineq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.ineq_constraints.size()));
  m.penalty = opts.initial_penalty;

  bool converged = false;
  double previous_f = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= opts.max_outer; ++k) {
    InnerResult inner = inner_solve(ev, problem, opts, cur, m);
    cur = std::move(inner.sample);
    sol.iterations = k;

    const bool feasible = cur.violation() <= opts.feas_tol;
    if (feasible && (!best || cur.f <= best->f)) best = cur;
    sol.objective_trace.push_back(best ? best->f : std::numeric_limits<double>::quiet_NaN());

    if (feasible) {
      if (!constrained && inner.converged) {
        converged = true;
        break;
      }
      if (constrained && std::isfinite(previous_f) &&
          std::abs(cur.f - previous_f) <= opts.opt_tol * std::max(1.0, std::abs(cur.f))) {
        converged = true;
        break;
      }
    }
    previous_f = cur.f;
    if (!constrained) {
      // Nothing to update; another pass only helps if the inner solve was cut short.
      if (inner.converged) break;
      continue;
    }

    for (Eigen::Index i = 0; i < m.eq.size(); ++i) m.eq[i] += m.penalty * cur.eq[i];
    for (Eigen::Index i = 0; i < m.ineq.size(); ++i) m.ineq[i] = std::max(0.0, m.ineq[i] + m.penalty * cur.ineq[i]);
    m.penalty = std::min(m.penalty * opts.penalty_growth, opts.max_penalty);
  }

  if (best) return finish(*best, converged ? SolveStatus::kConverged : SolveStatus::kConstraintToleranceMet);
  return finish(cur, SolveStatus::kIterationLimit);
}

}  // namespace regrasp
