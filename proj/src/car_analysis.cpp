#include "carlab/car_analysis.hpp"

#include "carlab/errors.hpp"
#include "carlab/exact_lp.hpp"
#include "carlab/update_rules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

namespace carlab {

namespace {

Rational column_mass(const Protocol& p, std::size_t o) {
  Rational total(0);
  for (std::size_t w = 0; w < p.world_count(); ++w) total += p.mass(w, o);
  return total;
}

void require_observable(const Protocol& p, std::size_t o) {
  if (!(column_mass(p, o) > Rational(0))) {
    throw Error(ErrorCode::UnobservableObservation,
                "observation \"" + name_of(p.alphabet()[o]) + "\" has probability 0");
  }
}

// Lexicographically first pair (w, w') with w < w', same group, both
// supported, and different kernel values. group(w) < 0 excludes w.
std::optional<std::pair<std::size_t, std::size_t>> first_violation(
    const std::vector<std::optional<Rational>>& kernel, const std::function<long(std::size_t)>& group) {
  for (std::size_t w = 0; w < kernel.size(); ++w) {
    if (!kernel[w] || group(w) < 0) continue;
    for (std::size_t v = w + 1; v < kernel.size(); ++v) {
      if (!kernel[v] || group(v) != group(w)) continue;
      if (*kernel[v] != *kernel[w]) return std::make_pair(w, v);
    }
  }
  return std::nullopt;
}

}  // namespace

ObservedSupport observed_supports(const Protocol& p) {
  ObservedSupport out;
  for (std::size_t o = 0; o < p.observation_count(); ++o) {
    Event v(p.world_count());
    for (std::size_t w = 0; w < p.world_count(); ++w) {
      if (p.mass(w, o) > Rational(0)) v.insert(w);
    }
    out.sets.push_back(std::move(v));
  }
  return out;
}

CarReport check_car(const Protocol& p, std::size_t observation) {
  const auto& ev = p.alphabet().event(observation);
  require_observable(p, observation);
  for (std::size_t w = 0; w < p.world_count(); ++w) {
    if (!ev.set.contains(w) && p.mass(w, observation) > Rational(0)) {
      throw Error(ErrorCode::AccuracyViolation, "observation \"" + ev.name + "\" occurs at world \"" +
                                                    p.space().label(w) + "\" outside its set");
    }
  }
  CarReport report;
  report.observation = observation;
  report.kernel_values = kernel_column(p, observation);
  report.witness = first_violation(report.kernel_values, [&](std::size_t w) { return ev.set.contains(w) ? 0L : -1L; });
  report.holds = !report.witness.has_value();
  report.posterior_check = sophisticated_posterior(p, observation) == condition(marginal_worlds(p), ev.set);
  if (report.holds != report.posterior_check) {
    throw Error(ErrorCode::Internal, "kernel test and posterior test disagree on \"" + ev.name + "\"");
  }
  return report;
}

bool car_guaranteed_for_all_priors(const Protocol& p) {
  if (p.alphabet().kind() != ObservationKind::Event) {
    throw Error(ErrorCode::RuleKindMismatch, "the all-priors CAR guarantee concerns event observations");
  }
  const auto supports = observed_supports(p);
  for (std::size_t i = 0; i < supports.sets.size(); ++i) {
    for (std::size_t j = i + 1; j < supports.sets.size(); ++j) {
      if (supports.sets[i].intersects(supports.sets[j])) return false;
    }
  }
  return true;
}

std::optional<Protocol> find_car_violating_joint(const Protocol& p, std::uint64_t seed, int max_tries) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> weight(1, 30);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Matrix<Rational> joint = Matrix<Rational>::Constant(p.joint().rows(), p.joint().cols(), Rational(0));
    Rational total(0);
    for (Eigen::Index w = 0; w < joint.rows(); ++w) {
      for (Eigen::Index o = 0; o < joint.cols(); ++o) {
        if (p.joint()(w, o) > Rational(0)) {
          joint(w, o) = Rational(weight(rng));
          total += joint(w, o);
        }
      }
    }
    for (Eigen::Index w = 0; w < joint.rows(); ++w) {
      for (Eigen::Index o = 0; o < joint.cols(); ++o) joint(w, o) /= total;
    }
    Protocol candidate(p.space(), p.alphabet(), std::move(joint));
    for (std::size_t o = 0; o < candidate.observation_count(); ++o) {
      if (column_mass(candidate, o).is_zero()) continue;
      if (!check_car(candidate, o).holds) return candidate;
    }
  }
  return std::nullopt;
}

CarFeasibility car_feasible_support(const Event& support, const std::vector<Event>& alphabet, bool require_positive,
                                    long denominator_bound) {
  if (support.empty()) throw Error(ErrorCode::InvalidArgument, "support must be nonempty");
  if (denominator_bound <= 0) throw Error(ErrorCode::InvalidArgument, "denominator bound must be positive");
  const auto worlds = support.indices();
  for (std::size_t w : worlds) {
    const bool covered = std::any_of(alphabet.begin(), alphabet.end(), [&](const Event& u) { return u.contains(w); });
    if (!covered) throw Error(ErrorCode::UncoveredWorld, "supported world " + std::to_string(w) + " lies in no observation");
  }
  const auto n = static_cast<Eigen::Index>(alphabet.size());
  const auto eqs = static_cast<Eigen::Index>(worlds.size());

  CarFeasibility out;
  out.denominator_bound = denominator_bound;

  // Relaxed: c >= 0 with the per-world sums.
  Matrix<Rational> a(eqs, n);
  Vector<Rational> b = Vector<Rational>::Constant(eqs, Rational(1));
  for (Eigen::Index r = 0; r < eqs; ++r) {
    for (Eigen::Index u = 0; u < n; ++u) a(r, u) = Rational(alphabet[static_cast<std::size_t>(u)].contains(worlds[static_cast<std::size_t>(r)]) ? 1 : 0);
  }
  auto relaxed = lp::feasible_point(a, b);
  out.relaxed = relaxed.has_value();

  const bool all_observable = std::all_of(alphabet.begin(), alphabet.end(), [&](const Event& u) { return u.intersects(support); });

  std::optional<Vector<Rational>> strict;
  if (out.relaxed && all_observable) {
    // Variables [c (n) | t | s (n) | r]: c_U - t - s_U = 0, t + r = 1, maximize t.
    const Eigen::Index cols = 2 * n + 2;
    Matrix<Rational> sa = Matrix<Rational>::Constant(eqs + n + 1, cols, Rational(0));
    Vector<Rational> sb = Vector<Rational>::Constant(eqs + n + 1, Rational(0));
    sa.block(0, 0, eqs, n) = a;
    sb.head(eqs) = b;
    for (Eigen::Index u = 0; u < n; ++u) {
      sa(eqs + u, u) = Rational(1);
      sa(eqs + u, n) = Rational(-1);
      sa(eqs + u, n + 1 + u) = Rational(-1);
    }
    sa(eqs + n, n) = Rational(1);
    sa(eqs + n, cols - 1) = Rational(1);
    sb[eqs + n] = Rational(1);
    Vector<Rational> cost = Vector<Rational>::Constant(cols, Rational(0));
    cost[n] = Rational(-1);
    const auto result = lp::minimize(sa, sb, cost);
    if (result.status == lp::LpStatus::Optimal && result.x[n] > Rational(0)) {
      out.strictly_positive = true;
      strict = result.x.head(n);
    }

    // Bounded: c_U - s_U = 1/D.
    Matrix<Rational> ba = Matrix<Rational>::Constant(eqs + n, 2 * n, Rational(0));
    Vector<Rational> bb(eqs + n);
    ba.block(0, 0, eqs, n) = a;
    bb.head(eqs) = b;
    for (Eigen::Index u = 0; u < n; ++u) {
      ba(eqs + u, u) = Rational(1);
      ba(eqs + u, n + u) = Rational(-1);
      bb[eqs + u] = Rational(1, denominator_bound);
    }
    out.bounded_positive = lp::feasible_point(ba, bb).has_value();
  }

  out.feasible = require_positive ? out.strictly_positive : out.relaxed;
  if (out.feasible) {
    const Vector<Rational>& c = strict ? *strict : *relaxed;
    out.kernel = CoarseningKernel{std::vector<Rational>(c.data(), c.data() + c.size())};
  }
  return out;
}

std::string_view case_name(CaseLabel label) {
  switch (label) {
    case CaseLabel::A: return "a";
    case CaseLabel::B: return "b";
    case CaseLabel::C: return "c";
    case CaseLabel::D: return "d";
    case CaseLabel::Infeasible: return "infeasible";
  }
  return "unknown";
}

CaseLabel classify_three(const Event& support, const Event& u1, const Event& u2, const Event& u3) {
  const auto lp_verdict = car_feasible_support(support, {u1, u2, u3}, true);
  if (!lp_verdict.feasible) return CaseLabel::Infeasible;

  // Venn code per supported world: bit 0 = U1, bit 1 = U2, bit 2 = U3.
  std::set<int> codes;
  for (std::size_t w : support.indices()) {
    codes.insert((u1.contains(w) ? 1 : 0) | (u2.contains(w) ? 2 : 0) | (u3.contains(w) ? 4 : 0));
  }
  const auto within = [&](std::initializer_list<int> allowed) {
    return std::all_of(codes.begin(), codes.end(),
                       [&](int c) { return std::find(allowed.begin(), allowed.end(), c) != allowed.end(); });
  };
  if (within({7})) return CaseLabel::A;
  if (within({3, 5, 6})) return CaseLabel::B;
  if (within({1, 2, 4})) return CaseLabel::C;
  if (within({1, 6}) || within({2, 5}) || within({4, 3})) return CaseLabel::D;
  throw Error(ErrorCode::Internal, "feasible support pattern outside cases (a)-(d)");
}

CarReport check_generalized_car(const Protocol& p, std::size_t observation) {
  const auto& jo = p.alphabet().jeffrey(observation);
  require_observable(p, observation);
  const Rational total = column_mass(p, observation);
  for (std::size_t i = 0; i < jo.cells.size(); ++i) {
    Rational in_cell(0);
    for (std::size_t w : jo.cells[i].indices()) in_cell += p.mass(w, observation);
    if (in_cell / total != jo.weights[i]) {
      throw Error(ErrorCode::AccuracyViolation, "observation \"" + jo.name + "\" misstates the probability of cell " +
                                                    std::to_string(i + 1));
    }
  }
  CarReport report;
  report.observation = observation;
  report.kernel_values = kernel_column(p, observation);
  report.witness = first_violation(report.kernel_values,
                                   [&](std::size_t w) { return static_cast<long>(cell_of(jo.cells, w)); });
  report.holds = !report.witness.has_value();
  report.posterior_check = sophisticated_posterior(p, observation) == jeffrey_update(marginal_worlds(p), jo);
  if (report.holds != report.posterior_check) {
    throw Error(ErrorCode::Internal, "kernel test and posterior test disagree on \"" + jo.name + "\"");
  }
  return report;
}

Protocol construct_car_joint(const WorldSet& space, const std::vector<Event>& cells, const Vector<Rational>& pr_o,
                             const Matrix<Rational>& alphas, const std::vector<NaiveDistribution>& conditionals) {
  if (!is_partition(cells, space.size())) throw Error(ErrorCode::NotAPartition, "cells do not partition the worlds");
  const auto k = alphas.rows();
  const auto n = alphas.cols();
  if (n != static_cast<Eigen::Index>(cells.size())) throw Error(ErrorCode::InvalidAlphas, "alphas need one column per cell");
  if (pr_o.size() != k) throw Error(ErrorCode::InvalidArgument, "pr_O needs one entry per observation");
  if (conditionals.size() != cells.size()) {
    throw Error(ErrorCode::InvalidArgument, "one conditional distribution per cell is required");
  }
  Rational pr_total(0);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(pr_o[i] > Rational(0))) throw Error(ErrorCode::InvalidArgument, "every observation needs positive probability");
    pr_total += pr_o[i];
    Rational row(0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(alphas(i, j) > Rational(0))) throw Error(ErrorCode::InvalidAlphas, "alphas must be strictly positive");
      row += alphas(i, j);
    }
    if (row != Rational(1)) {
      throw Error(ErrorCode::InvalidAlphas, "alpha row " + std::to_string(i + 1) + " sums to " + row.str());
    }
    for (Eigen::Index r = 0; r < i; ++r) {
      if (alphas.row(r) == alphas.row(i)) throw Error(ErrorCode::InvalidAlphas, "duplicate alpha rows");
    }
  }
  if (pr_total != Rational(1)) throw Error(ErrorCode::InvalidArgument, "pr_O does not sum to 1");
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (!(conditionals[j].space() == space)) throw Error(ErrorCode::InvalidArgument, "conditional over a different world set");
    if (prob(conditionals[j], cells[j]) != Rational(1)) {
      throw Error(ErrorCode::ConditionalOutsideCell, "conditional " + std::to_string(j + 1) + " charges worlds outside its cell");
    }
  }

  std::vector<Observation> items;
  for (Eigen::Index i = 0; i < k; ++i) {
    JeffreyObservation jo{"C" + std::to_string(i + 1), cells, {}};
    for (Eigen::Index j = 0; j < n; ++j) jo.weights.push_back(alphas(i, j));
    items.emplace_back(std::move(jo));
  }
  Matrix<Rational> joint(static_cast<Eigen::Index>(space.size()), k);
  for (std::size_t w = 0; w < space.size(); ++w) {
    const auto j = static_cast<Eigen::Index>(cell_of(cells, w));
    for (Eigen::Index i = 0; i < k; ++i) {
      joint(static_cast<Eigen::Index>(w), i) = pr_o[i] * alphas(i, j) * conditionals[static_cast<std::size_t>(j)][w];
    }
  }
  Protocol out(space, ObservationAlphabet(std::move(items), space.size()), std::move(joint));
  if (!validate_accuracy(out).ok()) throw Error(ErrorCode::Internal, "constructed joint is not accurate");
  return out;
}

Thm43Report thm43_check(const Protocol& p, const SolverOptions& opts) {
  const auto& alphabet = p.alphabet();
  if (alphabet.kind() != ObservationKind::Constraint || alphabet.size() != 2) {
    throw Error(ErrorCode::WrongAlphabetShape, "expected exactly two constraint observations");
  }
  const auto& c1 = alphabet.constraint(0);
  const auto& c2 = alphabet.constraint(1);
  if (c1.sets.size() != 2 || c2.sets.size() != 2 || !c1.odds.empty() || !c2.odds.empty() || c1.sets != c2.sets) {
    throw Error(ErrorCode::WrongAlphabetShape, "both observations must constrain the same two sets U1, U2");
  }
  require_observable(p, 0);
  require_observable(p, 1);

  const Event& u1 = c1.sets[0];
  const Event& u2 = c1.sets[1];
  Thm43Report report;
  report.regions_nonempty = !(u1 - u2).empty() && !(u1 & u2).empty() && !(u2 - u1).empty() && !(u1 | u2).complement().empty();
  report.alphas_interior = true;
  for (const auto* c : {&c1, &c2}) {
    for (const auto& a : c->targets) report.alphas_interior = report.alphas_interior && a > Rational(0) && a < Rational(1);
  }
  report.preconditions_met = report.regions_nonempty && report.alphas_interior;

  const auto prior = marginal_worlds(p);
  bool any_not_jeffrey_like = false;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& c = alphabet.constraint(i);
    report.jeffrey_like.push_back(is_jeffrey_like(prior, c, opts));
    any_not_jeffrey_like = any_not_jeffrey_like || !report.jeffrey_like.back().jeffrey_like;
    report.discrepancies.push_back(tv_distance(mre_update(prior, c, opts), sophisticated_posterior(p, i)));
  }
  report.discrepancy_expected = report.preconditions_met && any_not_jeffrey_like;
  report.discrepancy_confirmed =
      report.discrepancy_expected &&
      std::all_of(report.discrepancies.begin(), report.discrepancies.end(), [&](double g) { return g > opts.tol; });
  return report;
}

FixedPointResult mre_car_fixed_point(const WorldSet& space, const Vector<Rational>& lambdas,
                                     const std::vector<ConstraintObservation>& observations,
                                     const SolverOptions& opts) {
  const std::size_t k = observations.size();
  if (k == 0 || static_cast<std::size_t>(lambdas.size()) != k) {
    throw Error(ErrorCode::InvalidArgument, "need one lambda per observation");
  }
  Rational lambda_total(0);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < Rational(0)) throw Error(ErrorCode::InvalidArgument, "lambdas must be nonnegative");
    lambda_total += lambdas[i];
  }
  if (lambda_total != Rational(1)) throw Error(ErrorCode::InvalidArgument, "lambdas must sum to 1");

  std::vector<ConstraintObservation> named = observations;
  for (std::size_t i = 0; i < k; ++i) {
    if (named[i].name.empty()) named[i].name = "C" + std::to_string(i + 1);
  }
  std::vector<MreProjector> projectors;
  for (const auto& c : named) {
    auto cs = to_linear_constraints(space, c);
    if (!feasible(space.all(), cs).feasible) {
      throw Error(ErrorCode::Infeasible, "observation \"" + c.name + "\" cannot be satisfied");
    }
    projectors.emplace_back(std::move(cs));
  }
  std::vector<double> weight(k);
  for (std::size_t i = 0; i < k; ++i) weight[i] = to_double(lambdas[static_cast<Eigen::Index>(i)]);

  const auto n = static_cast<Eigen::Index>(space.size());
  // Q -> sum_i lambda_i MRE(Q, C_i); also returns the individual projections.
  const auto step = [&](const FloatDistribution& q, std::vector<FloatDistribution>* parts) {
    Vector<double> next = Vector<double>::Zero(n);
    for (std::size_t i = 0; i < k; ++i) {
      if (weight[i] == 0.0) continue;
      auto projected = projectors[i].project(q, opts).posterior;
      next += weight[i] * projected.mass();
      if (parts) parts->push_back(std::move(projected));
    }
    return FloatDistribution(space, next / next.sum());
  };

  FixedPointResult best{false, uniform<double>(space), std::numeric_limits<double>::infinity(), 0};
  constexpr int kMaxSteps = 2000;
  constexpr int kPatience = 60;
  constexpr double kTarget = 1e-14;
  for (int r = 0; r < opts.restarts; ++r) {
    best.restarts_used = r + 1;
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(r));
    std::exponential_distribution<double> draw(1.0);
    Vector<double> start(n);
    for (Eigen::Index w = 0; w < n; ++w) start[w] = 0.05 + draw(rng);
    FloatDistribution q(space, start / start.sum());

    double eta = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    double restart_best = std::numeric_limits<double>::infinity();
    int since_improvement = 0;
    try {
      for (int it = 0; it < kMaxSteps; ++it) {
        const auto image = step(q, nullptr);
        const double residual = tv_distance(q, image);
        if (residual < restart_best * 0.999) {
          restart_best = residual;
          since_improvement = 0;
        } else if (++since_improvement > kPatience) {
          break;
        }
        if (residual < best.residual) {
          best.residual = residual;
          best.best_prior = q;
        }
        if (residual <= kTarget) break;
        if (residual > previous) eta = std::max(eta * 0.5, 1.0 / 16);
        previous = residual;
        Vector<double> mixed = (1.0 - eta) * q.mass() + eta * image.mass();
        q = FloatDistribution(space, mixed / mixed.sum());
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Infeasible) throw;
      // Support collapsed or the solver stalled: abandon this start.
    }
    if (best.residual <= opts.tol) break;
  }

  if (best.residual <= opts.tol) {
    std::vector<FloatDistribution> parts;
    step(best.best_prior, &parts);
    Matrix<double> joint = Matrix<double>::Zero(n, static_cast<Eigen::Index>(k));
    std::vector<Observation> items;
    std::size_t part = 0;
    for (std::size_t i = 0; i < k; ++i) {
      items.emplace_back(named[i]);
      if (weight[i] == 0.0) continue;
      joint.col(static_cast<Eigen::Index>(i)) = weight[i] * parts[part++].mass();
    }
    joint /= joint.sum();
    FloatProtocol induced(space, ObservationAlphabet(std::move(items), space.size()), std::move(joint));
    best.certificate_accurate = validate_accuracy(induced, opts.tol).ok();
    const auto marginal = marginal_worlds(induced);
    best.certificate_gap = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (weight[i] == 0.0) continue;
      const auto naive = mre_update(marginal, named[i], opts);
      best.certificate_gap = std::max(best.certificate_gap, tv_distance(naive, sophisticated_posterior(induced, i)));
    }
    best.compatible = best.certificate_accurate && best.certificate_gap <= 2 * opts.tol;
  }
  return best;
}

}  // namespace carlab
