#pragma once

#include "carlab/distribution.hpp"
#include "carlab/mre_solver.hpp"
#include "carlab/protocol.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace carlab {

/// Verdict for the CAR condition (event observations) or its Jeffrey
/// generalization on one observation.
struct CarReport {
  std::size_t observation = 0;
  bool holds = false;
  /// Pr(X_O = o | X_W = w) for worlds in the prior's support; nullopt elsewhere.
  std::vector<std::optional<Rational>> kernel_values;
  /// Lexicographically first pair of worlds (by world order) whose kernel
  /// values must agree but do not.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  /// The posterior-level condition recomputed independently; always == holds.
  bool posterior_check = false;
};

/// V_i = {w : joint(w, o_i) > 0}.
struct ObservedSupport {
  std::vector<Event> sets;
};

ObservedSupport observed_supports(const Protocol& p);

/// Kernel-constancy test on an event observation, cross-checked against the
/// posterior comparison. Throws UnobservableObservation, AccuracyViolation.
CarReport check_car(const Protocol& p, std::size_t observation);

/// True iff the observed supports are pairwise disjoint (event alphabets).
bool car_guaranteed_for_all_priors(const Protocol& p);

/// Random search over distributions on the same run set (atoms with positive
/// joint mass) for one under which check_car fails on some observation.
std::optional<Protocol> find_car_violating_joint(const Protocol& p, std::uint64_t seed, int max_tries = 1000);

/// Per-observation coarsening probabilities c_U.
struct CoarseningKernel {
  std::vector<Rational> c;
};

struct CarFeasibility {
  bool feasible = false;                     ///< the verdict asked for
  std::optional<CoarseningKernel> kernel;    ///< witness when feasible
  bool relaxed = false;                      ///< c_U >= 0 only
  bool strictly_positive = false;            ///< every required c_U > 0 (exact, no bound)
  bool bounded_positive = false;             ///< every required c_U >= 1/D
  long denominator_bound = 1000000;
};

/**
 * Decides whether some coarsening kernel c_U >= 0 with sum_{U containing w}
 * c_U = 1 for every supported world w exists. With `require_positive`, every
 * observation must be observable: it meets the support and c_U > 0. Strict
 * positivity is decided exactly by maximizing min_U c_U; the 1/D-bounded
 * variant is reported alongside. Throws UncoveredWorld.
 */
CarFeasibility car_feasible_support(const Event& support, const std::vector<Event>& alphabet, bool require_positive,
                                    long denominator_bound = 1000000);

enum class CaseLabel { A, B, C, D, Infeasible };
std::string_view case_name(CaseLabel label);

/// Venn-pattern class of a support against three observed events, with every
/// observation required to occur with positive probability.
CaseLabel classify_three(const Event& support, const Event& u1, const Event& u2, const Event& u3);

/// Within-cell kernel constancy for a Jeffrey observation, cross-checked
/// against Jeffrey updating of the world marginal. Throws
/// UnobservableObservation, AccuracyViolation.
CarReport check_generalized_car(const Protocol& p, std::size_t observation);

/**
 * Builds the joint where an observation C_i is drawn from pr_o, then a cell U_j
 * with probability alphas(i, j), then a world from conditionals[j]:
 *   joint(w, C_i) = pr_o[i] * alphas(i, j(w)) * conditionals[j(w)](w).
 * Throws InvalidAlphas (rows not summing to 1, nonpositive entries, duplicate
 * rows), ConditionalOutsideCell, InvalidArgument (pr_o not positive).
 */
Protocol construct_car_joint(const WorldSet& space, const std::vector<Event>& cells, const Vector<Rational>& pr_o,
                             const Matrix<Rational>& alphas, const std::vector<NaiveDistribution>& conditionals);

struct Thm43Report {
  bool preconditions_met = false;
  bool regions_nonempty = false;
  bool alphas_interior = false;
  std::vector<JeffreyLikeVerdict> jeffrey_like;  ///< w.r.t. the world marginal
  std::vector<double> discrepancies;             ///< tv(sophisticated, MRE) per observation
  /// Preconditions met and some observation not Jeffrey-like.
  bool discrepancy_expected = false;
  /// When expected: every discrepancy exceeds opts.tol.
  bool discrepancy_confirmed = false;
};

/// Two constraint observations over the same pair of sets (U1, U2). Throws
/// WrongAlphabetShape otherwise; UnobservableObservation for a zero column.
Thm43Report thm43_check(const Protocol& p, const SolverOptions& opts = {});

struct FixedPointResult {
  bool compatible = false;
  FloatDistribution best_prior;
  double residual = 0.0;
  int restarts_used = 0;
  /// Certificate checks on the induced joint lambda_i MRE(Q, C_i) (only when compatible).
  bool certificate_accurate = false;
  double certificate_gap = 0.0;  ///< max_i tv(MRE(marginal, C_i), sophisticated posterior)
};

/**
 * Searches for a naive prior Q with Q = sum_i lambdas[i] MRE(Q, C_i) by damped
 * fixed-point iteration from opts.restarts random starts (start r seeded with
 * opts.seed + r). compatible == false means "not found", not "impossible".
 * Throws Infeasible when some C_i is unsatisfiable.
 */
FixedPointResult mre_car_fixed_point(const WorldSet& space, const Vector<Rational>& lambdas,
                                     const std::vector<ConstraintObservation>& observations,
                                     const SolverOptions& opts = {});

}  // namespace carlab
