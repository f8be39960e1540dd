#pragma once

#include "carlab/distribution.hpp"
#include "carlab/mre_solver.hpp"
#include "carlab/observation.hpp"
#include "carlab/protocol.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace carlab {

enum class UpdateRule { NaiveConditioning, JeffreyConditioning, MRE };

std::string_view rule_name(UpdateRule rule);
/// "naive" | "jeffrey" | "mre"; throws InvalidArgument otherwise.
UpdateRule parse_rule(std::string_view text);

NaiveDistribution naive_condition(const NaiveDistribution& prior, const EventObservation& o);

/// Jeffrey's rule: mass'(w) = alpha_i prior(w) / prior(U_i) for w in cell U_i.
/// Cells with alpha_i = 0 get no mass (even if prior(U_i) = 0). Throws
/// JeffreyUndefined when some alpha_i > 0 has prior(U_i) = 0.
NaiveDistribution jeffrey_update(const NaiveDistribution& prior, const JeffreyObservation& o);

FloatDistribution mre_update(const NaiveDistribution& prior, const ConstraintObservation& o,
                             const SolverOptions& opts = {});
FloatDistribution mre_update(const FloatDistribution& prior, const ConstraintObservation& o,
                             const SolverOptions& opts = {});

/// Naive-space update versus conditioning in the sophisticated space for one
/// observation. Exact rules compare rationals; MRE compares within opts.tol.
struct ComparisonReport {
  std::size_t observation = 0;
  UpdateRule rule = UpdateRule::NaiveConditioning;
  bool exact = true;
  std::optional<NaiveDistribution> naive_exact;  ///< set for exact rules
  FloatDistribution naive_result;                ///< float view (always set)
  NaiveDistribution sophisticated_result;
  std::optional<Rational> tv_gap_exact;          ///< set for exact rules
  double tv_gap = 0.0;
  bool agree = false;
};

/// Throws RuleKindMismatch when the rule cannot consume the observation's kind
/// (naive <-> event, jeffrey <-> jeffrey; MRE accepts every kind).
ComparisonReport compare(const Protocol& p, std::size_t observation, UpdateRule rule, const SolverOptions& opts = {});

/// The rule each observation kind calls for.
UpdateRule natural_rule(ObservationKind kind);

}  // namespace carlab
