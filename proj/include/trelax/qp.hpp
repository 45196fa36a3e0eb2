// Copyright 2026 The tendon-relax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRELAX_QP_HPP_
#define TRELAX_QP_HPP_

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "trelax/model.hpp"
#include "trelax/types.hpp"

namespace trelax {

// Lower-bounded tension distribution problem
//
//   minimize    x' W1 x + (G' x + tau)' W2 (G' x + tau)
//   subject to  x >= t_min * 1
//
// with W1 = w1 * I strictly positive, so the Hessian
// H = 2 (W1 + G W2 G') is symmetric positive definite and the minimizer is
// unique. The torque term is kept as a soft residual rather than an equality
// constraint so the problem stays feasible under Jacobian error.
struct QpProblem {
  Matrix G;             // n_muscles x n_joints, m
  JointVector tau_nec;  // Nm
  QpWeights weights;
  double t_min = 30.0;  // N, broadcast to every muscle

  int muscle_count() const { return static_cast<int>(G.rows()); }

  void validate() const {
    if (G.rows() < 1 || G.cols() < 1) throw std::invalid_argument("qp: empty G");
    if (tau_nec.size() != G.cols()) throw std::invalid_argument("qp: tau_nec/G size mismatch");
    if (!G.allFinite() || !tau_nec.allFinite())
      throw std::invalid_argument("qp: non-finite problem data");
    if (weights.w1_scale <= 0.0 || weights.w2_scale <= 0.0)
      throw std::invalid_argument("qp: weights must be strictly positive");
    if (t_min < 0.0 || !std::isfinite(t_min)) throw std::invalid_argument("qp: bad t_min");
  }
};

struct QpSolution {
  MuscleVector x;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  std::vector<int> active_set;  // muscle indices held at the bound
};

class QpIterationLimit : public std::runtime_error {
 public:
  QpIterationLimit(MuscleVector best, double residual, int iterations)
      : std::runtime_error("qp: iteration cap exceeded, kkt residual " +
                           std::to_string(residual)),
        best_iterate_(std::move(best)),
        residual_(residual),
        iterations_(iterations) {}
  const MuscleVector& best_iterate() const { return best_iterate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  MuscleVector best_iterate_;
  double residual_;
  int iterations_;
};

inline double qp_objective(const QpProblem& p, const MuscleVector& x) {
  const JointVector r = p.G.transpose() * x + p.tau_nec;
  return p.weights.w1_scale * x.squaredNorm() + p.weights.w2_scale * r.squaredNorm();
}

inline Matrix qp_hessian(const QpProblem& p) {
  const int m = p.muscle_count();
  return 2.0 * (p.weights.w1_scale * Matrix::Identity(m, m) +
                p.weights.w2_scale * (p.G * p.G.transpose()));
}

inline MuscleVector qp_gradient(const QpProblem& p, const MuscleVector& x) {
  return 2.0 * p.weights.w1_scale * x +
         2.0 * p.weights.w2_scale * (p.G * (p.G.transpose() * x + p.tau_nec));
}

namespace detail {

// Max KKT violation: interior coordinates need a vanishing gradient, bound
// coordinates need a nonnegative multiplier, and everything must be feasible.
inline double kkt_violation(const QpProblem& p, const MuscleVector& x, double tol) {
  const MuscleVector g = qp_gradient(p, x);
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    worst = std::max(worst, p.t_min - x[i]);
    if (x[i] > p.t_min + tol)
      worst = std::max(worst, std::abs(g[i]));
    else
      worst = std::max(worst, -g[i]);
  }
  return worst;
}

}  // namespace detail

// Checks first-order optimality of x for the given problem. Returns
// {satisfied, residual} where residual is the largest violation found.
inline std::pair<bool, double> verify_kkt(const QpProblem& p, const MuscleVector& x,
                                          double tol) {
  p.validate();
  if (x.size() != p.muscle_count()) throw std::invalid_argument("qp: x size mismatch");
  const double residual = detail::kkt_violation(p, x, tol);
  return {residual <= tol, residual};
}

// Primal active-set solver. Starts from x = t_min * 1 with every bound
// active, alternates between solving the equality-constrained system on the
// free coordinates and exchanging bounds: a blocking bound enters on the
// ratio test, the bound with the most negative multiplier leaves. Ties are
// broken toward the lowest muscle index so the path is deterministic.
inline QpSolution solve_necessary_tension(const QpProblem& p, double tol = 1e-9,
                                          int max_iterations = 0) {
  p.validate();
  const int m = p.muscle_count();
  if (max_iterations <= 0) max_iterations = 10 * m;

  const Matrix h = qp_hessian(p);
  const MuscleVector c = 2.0 * p.weights.w2_scale * (p.G * p.tau_nec);

  MuscleVector x = MuscleVector::Constant(m, p.t_min);
  std::vector<char> at_bound(m, 1);
  int iterations = 0;

  while (true) {
    if (++iterations > max_iterations) {
      throw QpIterationLimit(x, detail::kkt_violation(p, x, tol), iterations - 1);
    }
    std::vector<int> free_idx;
    free_idx.reserve(m);
    for (int i = 0; i < m; ++i)
      if (!at_bound[i]) free_idx.push_back(i);
    const int nf = static_cast<int>(free_idx.size());

    // Equality-constrained minimizer over the free coordinates.
    MuscleVector candidate = x;
    if (nf > 0) {
      Matrix hff(nf, nf);
      MuscleVector rhs(nf);
      for (int a = 0; a < nf; ++a) {
        rhs[a] = -c[free_idx[a]];
        for (int b = 0; b < nf; ++b) hff(a, b) = h(free_idx[a], free_idx[b]);
        for (int i = 0; i < m; ++i)
          if (at_bound[i]) rhs[a] -= h(free_idx[a], i) * p.t_min;
      }
      const MuscleVector xf = hff.ldlt().solve(rhs);
      for (int a = 0; a < nf; ++a) candidate[free_idx[a]] = xf[a];
    }

    bool feasible = true;
    for (int a = 0; a < nf; ++a)
      if (candidate[free_idx[a]] < p.t_min) feasible = false;

    if (!feasible) {
      // Partial step to the first blocking bound.
      double alpha = 1.0;
      int blocking = -1;
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[a];
        if (candidate[i] < p.t_min) {
          const double step = (p.t_min - x[i]) / (candidate[i] - x[i]);
          if (step < alpha) {
            alpha = step;
            blocking = i;
          }
        }
      }
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[a];
        x[i] += alpha * (candidate[i] - x[i]);
      }
      if (blocking < 0) {
        // No progress possible; should not happen for an SPD Hessian.
        throw QpIterationLimit(x, detail::kkt_violation(p, x, tol), iterations);
      }
      x[blocking] = p.t_min;
      at_bound[blocking] = 1;
      continue;
    }

    x = candidate;
    const MuscleVector g = h * x + c;
    double most_negative = -tol;
    int leaving = -1;
    for (int i = 0; i < m; ++i) {
      if (at_bound[i] && g[i] < most_negative) {
        most_negative = g[i];
        leaving = i;
      }
    }
    if (leaving < 0) {
      QpSolution sol;
      sol.x = x;
      sol.objective_value = qp_objective(p, x);
      sol.kkt_residual = detail::kkt_violation(p, x, tol);
      sol.iterations = iterations;
      for (int i = 0; i < m; ++i)
        if (at_bound[i]) sol.active_set.push_back(i);
      return sol;
    }
    at_bound[leaving] = 0;
  }
}

// Independent verification oracle: projected-gradient descent with the fixed
// step 1/L, L from the Gershgorin bound on the Hessian. Stops early once the
// iterate reaches a floating-point fixed point. Test use only; it shares no
// code path with the active-set solver.
inline MuscleVector oracle_solve(const QpProblem& p, long iters = 200000) {
  p.validate();
  const int m = p.muscle_count();
  const Matrix h = qp_hessian(p);
  const MuscleVector c = 2.0 * p.weights.w2_scale * (p.G * p.tau_nec);
  double lipschitz = 0.0;
  for (int i = 0; i < m; ++i) lipschitz = std::max(lipschitz, h.row(i).cwiseAbs().sum());
  const double step = 1.0 / lipschitz;

  MuscleVector x = MuscleVector::Constant(m, p.t_min);
  MuscleVector next(m);
  for (long k = 0; k < iters; ++k) {
    next = (x - step * (h * x + c)).cwiseMax(p.t_min);
    if ((next.array() == x.array()).all()) break;  // floating-point fixed point
    x.swap(next);
  }
  return x;
}

}  // namespace trelax

#endif  // TRELAX_QP_HPP_
