#pragma once

#include "carlab/distribution.hpp"
#include "carlab/observation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace carlab {

/// One linear equality sum_w coefficients[w] * p(w) = rhs.
struct LinearRow {
  Vector<Rational> coefficients;
  Rational rhs;
};

/// {p in the simplex : every row holds}. Closed and convex by construction.
struct LinearConstraintSet {
  WorldSet space;
  std::vector<LinearRow> rows;
  std::optional<ConstraintObservation> provenance;
};

/// Rows P(U_i) = alpha_i, then homogeneous odds rows P(A) - r P(B) = 0.
LinearConstraintSet to_linear_constraints(const WorldSet& space, const ConstraintObservation& o);

struct SolverOptions {
  double tol = 1e-9;        ///< constraint residual bound
  double grad_tol = 1e-10;  ///< dual gradient (infinity norm) stopping bound
  int max_iters = 10000;
  int restarts = 100;        ///< fixed-point search starts
  std::uint64_t seed = 0;    ///< restart r uses seed + r
};

struct Feasibility {
  bool feasible = false;
  std::optional<NaiveDistribution> witness;  ///< exact feasible point when feasible
};

/// Exact decision of whether some distribution supported inside
/// `prior_support` satisfies every row.
Feasibility feasible(const Event& prior_support, const LinearConstraintSet& cs);

struct MreSolution {
  FloatDistribution posterior;
  double kl_value = 0.0;            ///< D(posterior || prior), bits
  std::vector<double> dual_weights;  ///< one per row of the constraint set
  int iterations = 0;
  double residual = 0.0;             ///< max row residual
  Event face;                        ///< support of the posterior
  bool used_fallback = false;        ///< coordinate-wise steps were needed
};

/// Natural-log dual of the I-projection over the prior's support:
/// g(lambda) = lambda.b - log sum_w prior(w) exp(lambda.c_w). Concave.
double dual_objective(const FloatDistribution& prior, const LinearConstraintSet& cs, const Vector<double>& lambda);
/// Gradient of dual_objective: b - E_{p_lambda}[c].
Vector<double> dual_gradient(const FloatDistribution& prior, const LinearConstraintSet& cs,
                             const Vector<double>& lambda);

/**
 * Minimum relative entropy projection of a prior onto a linear constraint set.
 *
 * Support analysis is exact: feasibility inside the prior's support and the
 * maximal support of the feasible face are decided with rational LPs, so the
 * minimizer is interior to its face and the dual optimum is finite. The float
 * part is a damped Newton method on the dual over a linearly independent
 * reduction of the rows, with coordinate-wise steps whenever the Hessian's
 * condition number exceeds 1e12.
 *
 * Caches the support analysis per prior support, so repeated projections onto
 * the same constraint set are cheap. Not safe for concurrent use of one
 * instance.
 */
class MreProjector {
 public:
  explicit MreProjector(LinearConstraintSet cs);

  /// Throws Infeasible, NotAbsolutelyContinuousFeasible or NoConvergence.
  MreSolution project(const FloatDistribution& prior, const SolverOptions& opts = {});

  const LinearConstraintSet& constraints() const { return cs_; }

 private:
  struct Face {
    Event support;                   // maximal support of feasible points
    Matrix<double> reduced;          // independent rows restricted to `support`
    Vector<double> reduced_rhs;
    Matrix<double> transform;        // reduced row = transform * original rows (+ const)
    NaiveDistribution witness;
  };

  const Face& face_for(const Event& prior_support);
  Face analyse(const Event& prior_support) const;

  LinearConstraintSet cs_;
  std::map<Event, Face> faces_;
};

MreSolution solve_mre(const FloatDistribution& prior, const LinearConstraintSet& cs, const SolverOptions& opts = {});
MreSolution solve_mre(const NaiveDistribution& prior, const LinearConstraintSet& cs, const SolverOptions& opts = {});

struct JeffreyLikeVerdict {
  bool jeffrey_like = false;
  /// 0: updating on the first (set, alpha) pair already meets the second;
  /// 1: updating on the second meets the first.
  std::optional<int> via;
  double first_gap = 0.0;   ///< |P(U2 | a1 U1) - a2|
  double second_gap = 0.0;  ///< |P(U1 | a2 U2) - a1| (computed only if needed)
};

/// Two-set observations only (InvalidArgument otherwise).
JeffreyLikeVerdict is_jeffrey_like(const FloatDistribution& prior, const ConstraintObservation& o,
                                   const SolverOptions& opts = {});
JeffreyLikeVerdict is_jeffrey_like(const NaiveDistribution& prior, const ConstraintObservation& o,
                                   const SolverOptions& opts = {});

}  // namespace carlab
