#include "carlab/update_rules.hpp"

#include "carlab/errors.hpp"

namespace carlab {

std::string_view rule_name(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::NaiveConditioning: return "naive";
    case UpdateRule::JeffreyConditioning: return "jeffrey";
    case UpdateRule::MRE: return "mre";
  }
  return "unknown";
}

UpdateRule parse_rule(std::string_view text) {
  if (text == "naive") return UpdateRule::NaiveConditioning;
  if (text == "jeffrey") return UpdateRule::JeffreyConditioning;
  if (text == "mre") return UpdateRule::MRE;
  throw Error(ErrorCode::InvalidArgument, "unknown update rule \"" + std::string(text) + "\"");
}

UpdateRule natural_rule(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::Event: return UpdateRule::NaiveConditioning;
    case ObservationKind::Jeffrey: return UpdateRule::JeffreyConditioning;
    case ObservationKind::Constraint: return UpdateRule::MRE;
  }
  return UpdateRule::MRE;
}

NaiveDistribution naive_condition(const NaiveDistribution& prior, const EventObservation& o) {
  validate(o, prior.size());
  return condition(prior, o.set);
}

NaiveDistribution jeffrey_update(const NaiveDistribution& prior, const JeffreyObservation& o) {
  validate(o, prior.size());
  std::vector<Rational> cell_mass;
  for (std::size_t i = 0; i < o.cells.size(); ++i) {
    cell_mass.push_back(prob(prior, o.cells[i]));
    if (o.weights[i] > Rational(0) && cell_mass.back().is_zero()) {
      throw Error(ErrorCode::JeffreyUndefined,
                  "cell " + std::to_string(i + 1) + " has positive weight but prior probability 0");
    }
  }
  Vector<Rational> mass(static_cast<Eigen::Index>(prior.size()));
  for (std::size_t w = 0; w < prior.size(); ++w) {
    const std::size_t i = cell_of(o.cells, w);
    mass[static_cast<Eigen::Index>(w)] = o.weights[i].is_zero() ? Rational(0) : o.weights[i] * prior[w] / cell_mass[i];
  }
  return NaiveDistribution(prior.space(), std::move(mass));
}

FloatDistribution mre_update(const FloatDistribution& prior, const ConstraintObservation& o,
                             const SolverOptions& opts) {
  return solve_mre(prior, to_linear_constraints(prior.space(), o), opts).posterior;
}

FloatDistribution mre_update(const NaiveDistribution& prior, const ConstraintObservation& o,
                             const SolverOptions& opts) {
  return mre_update(to_float(prior), o, opts);
}

ComparisonReport compare(const Protocol& p, std::size_t observation, UpdateRule rule, const SolverOptions& opts) {
  const auto& item = p.alphabet()[observation];
  const auto kind = kind_of(item);
  if ((rule == UpdateRule::NaiveConditioning && kind != ObservationKind::Event) ||
      (rule == UpdateRule::JeffreyConditioning && kind != ObservationKind::Jeffrey)) {
    throw Error(ErrorCode::RuleKindMismatch, std::string(rule_name(rule)) + " updating cannot consume " +
                                                 kind_name(kind) + " observation \"" + name_of(item) + "\"");
  }
  const auto prior = marginal_worlds(p);
  auto sophisticated = sophisticated_posterior(p, observation);

  if (rule == UpdateRule::MRE) {
    ConstraintObservation constraints;
    if (const auto* e = std::get_if<EventObservation>(&item)) {
      constraints = as_constraints(*e);
    } else if (const auto* j = std::get_if<JeffreyObservation>(&item)) {
      constraints = as_constraints(*j);
    } else {
      constraints = std::get<ConstraintObservation>(item);
    }
    auto naive = mre_update(prior, constraints, opts);
    const double gap = tv_distance(naive, sophisticated);
    return ComparisonReport{observation, rule, false, std::nullopt, std::move(naive), std::move(sophisticated),
                            std::nullopt, gap, gap <= opts.tol};
  }

  NaiveDistribution naive = rule == UpdateRule::NaiveConditioning
                                ? naive_condition(prior, std::get<EventObservation>(item))
                                : jeffrey_update(prior, std::get<JeffreyObservation>(item));
  const Rational gap = tv_distance(naive, sophisticated);
  auto naive_float = to_float(naive);
  return ComparisonReport{observation, rule, true, std::move(naive), std::move(naive_float), std::move(sophisticated),
                          gap, to_double(gap), gap.is_zero()};
}

}  // namespace carlab
