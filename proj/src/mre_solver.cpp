#include "carlab/mre_solver.hpp"

#include "carlab/errors.hpp"
#include "carlab/exact_lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace carlab {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kDualWeightLimit = 700.0;  // exp() overflow guard

Vector<Rational> indicator(const Event& u) {
  Vector<Rational> v(static_cast<Eigen::Index>(u.universe_size()));
  for (std::size_t i = 0; i < u.universe_size(); ++i) v[static_cast<Eigen::Index>(i)] = Rational(u.contains(i) ? 1 : 0);
  return v;
}

// {x >= 0 on `cols`, rows hold, sum x = 1} as an equality system.
void restricted_system(const LinearConstraintSet& cs, const std::vector<std::size_t>& cols, Matrix<Rational>& a,
                       Vector<Rational>& b) {
  const auto m = static_cast<Eigen::Index>(cs.rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());
  a.resize(m + 1, n);
  b.resize(m + 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) a(j, k) = cs.rows[static_cast<std::size_t>(j)].coefficients[static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)])];
    b[j] = cs.rows[static_cast<std::size_t>(j)].rhs;
  }
  for (Eigen::Index k = 0; k < n; ++k) a(m, k) = Rational(1);
  b[m] = Rational(1);
}

std::optional<NaiveDistribution> witness_on(const Event& support, const LinearConstraintSet& cs) {
  const auto cols = support.indices();
  if (cols.empty()) return std::nullopt;
  Matrix<Rational> a;
  Vector<Rational> b;
  restricted_system(cs, cols, a, b);
  auto x = lp::feasible_point(a, b);
  if (!x) return std::nullopt;
  Vector<Rational> mass = Vector<Rational>::Constant(static_cast<Eigen::Index>(cs.space.size()), Rational(0));
  for (std::size_t k = 0; k < cols.size(); ++k) mass[static_cast<Eigen::Index>(cols[k])] = (*x)[static_cast<Eigen::Index>(k)];
  return NaiveDistribution(cs.space, std::move(mass));
}

// Worlds that are positive in some feasible point: for world w solve the
// homogenized system {x >= 0, sum_s (c_js - b_j) x_s = 0, x_w = 1}.
Event maximal_support(const Event& support, const LinearConstraintSet& cs, const NaiveDistribution& witness) {
  Event positive = witness.support();
  const auto cols = support.indices();
  const auto m = static_cast<Eigen::Index>(cs.rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());
  for (std::size_t target = 0; target < cols.size(); ++target) {
    if (positive.contains(cols[target])) continue;
    Matrix<Rational> a(m + 1, n);
    Vector<Rational> b = Vector<Rational>::Constant(m + 1, Rational(0));
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& row = cs.rows[static_cast<std::size_t>(j)];
      for (Eigen::Index k = 0; k < n; ++k) a(j, k) = row.coefficients[static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)])] - row.rhs;
    }
    for (Eigen::Index k = 0; k < n; ++k) a(m, k) = Rational(static_cast<std::size_t>(k) == target ? 1 : 0);
    b[m] = Rational(1);
    if (auto x = lp::feasible_point(a, b)) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if ((*x)[k] > Rational(0)) positive.insert(cols[static_cast<std::size_t>(k)]);
      }
    }
  }
  return positive;
}

struct DualState {
  Vector<double> p;  // probabilities on the face
  double value = 0;  // log Z - lambda.b (convex form)
  Vector<double> grad;
};

DualState evaluate(const Vector<double>& log_prior, const Matrix<double>& rows, const Vector<double>& rhs,
                   const Vector<double>& lambda) {
  DualState s;
  Vector<double> logits = log_prior;
  if (rows.rows() > 0) logits += rows.transpose() * lambda;
  const double top = logits.maxCoeff();
  s.p = (logits.array() - top).exp().matrix();
  const double z = s.p.sum();
  s.p /= z;
  s.value = top + std::log(z) - (rows.rows() > 0 ? lambda.dot(rhs) : 0.0);
  s.grad = rows.rows() > 0 ? Vector<double>(rows * s.p - rhs) : Vector<double>();
  return s;
}

Matrix<double> hessian(const Matrix<double>& rows, const Vector<double>& p) {
  const Vector<double> mean = rows * p;
  return rows * p.asDiagonal() * rows.transpose() - mean * mean.transpose();
}

}  // namespace

LinearConstraintSet to_linear_constraints(const WorldSet& space, const ConstraintObservation& o) {
  validate(o, space.size());
  LinearConstraintSet cs{space, {}, o};
  for (std::size_t i = 0; i < o.sets.size(); ++i) cs.rows.push_back({indicator(o.sets[i]), o.targets[i]});
  for (const auto& odd : o.odds) {
    Vector<Rational> c = indicator(odd.numerator);
    const Vector<Rational> d = indicator(odd.denominator);
    for (Eigen::Index w = 0; w < c.size(); ++w) c[w] -= odd.ratio * d[w];
    cs.rows.push_back({std::move(c), Rational(0)});
  }
  return cs;
}

Feasibility feasible(const Event& prior_support, const LinearConstraintSet& cs) {
  if (prior_support.universe_size() != cs.space.size()) {
    throw Error(ErrorCode::InvalidArgument, "support is over a different world set");
  }
  auto w = witness_on(prior_support, cs);
  if (!w) return {false, std::nullopt};
  return {true, std::move(w)};
}

double dual_objective(const FloatDistribution& prior, const LinearConstraintSet& cs, const Vector<double>& lambda) {
  const auto m = static_cast<Eigen::Index>(cs.rows.size());
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> logits;
  for (std::size_t w = 0; w < prior.size(); ++w) {
    if (!(prior[w] > 0)) continue;
    double s = std::log(prior[w]);
    for (Eigen::Index j = 0; j < m; ++j) s += lambda[j] * to_double(cs.rows[static_cast<std::size_t>(j)].coefficients[static_cast<Eigen::Index>(w)]);
    logits.push_back(s);
    top = std::max(top, s);
  }
  double z = 0;
  for (double s : logits) z += std::exp(s - top);
  double lin = 0;
  for (Eigen::Index j = 0; j < m; ++j) lin += lambda[j] * to_double(cs.rows[static_cast<std::size_t>(j)].rhs);
  return lin - (top + std::log(z));
}

Vector<double> dual_gradient(const FloatDistribution& prior, const LinearConstraintSet& cs,
                             const Vector<double>& lambda) {
  const auto m = static_cast<Eigen::Index>(cs.rows.size());
  Vector<double> logits = Vector<double>::Constant(static_cast<Eigen::Index>(prior.size()),
                                                   -std::numeric_limits<double>::infinity());
  for (std::size_t w = 0; w < prior.size(); ++w) {
    if (!(prior[w] > 0)) continue;
    double s = std::log(prior[w]);
    for (Eigen::Index j = 0; j < m; ++j) s += lambda[j] * to_double(cs.rows[static_cast<std::size_t>(j)].coefficients[static_cast<Eigen::Index>(w)]);
    logits[static_cast<Eigen::Index>(w)] = s;
  }
  const double top = logits.maxCoeff();
  Vector<double> p = (logits.array() - top).exp().matrix();
  p /= p.sum();
  Vector<double> grad(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& row = cs.rows[static_cast<std::size_t>(j)];
    double mean = 0;
    for (Eigen::Index w = 0; w < p.size(); ++w) mean += p[w] * to_double(row.coefficients[w]);
    grad[j] = to_double(row.rhs) - mean;
  }
  return grad;
}

MreProjector::MreProjector(LinearConstraintSet cs) : cs_(std::move(cs)) {
  for (const auto& row : cs_.rows) {
    if (static_cast<std::size_t>(row.coefficients.size()) != cs_.space.size()) {
      throw Error(ErrorCode::ValidationError, "constraint row length does not match world set");
    }
  }
}

const MreProjector::Face& MreProjector::face_for(const Event& prior_support) {
  auto it = faces_.find(prior_support);
  if (it == faces_.end()) it = faces_.emplace(prior_support, analyse(prior_support)).first;
  return it->second;
}

MreProjector::Face MreProjector::analyse(const Event& prior_support) const {
  auto witness = witness_on(prior_support, cs_);
  if (!witness) {
    if (witness_on(cs_.space.all(), cs_)) {
      throw Error(ErrorCode::NotAbsolutelyContinuousFeasible,
                  "constraints are satisfiable only by distributions charging worlds the prior rules out");
    }
    throw Error(ErrorCode::Infeasible, "no distribution satisfies the constraints");
  }
  const Event support = maximal_support(prior_support, cs_, *witness);
  const auto cols = support.indices();
  const auto n = static_cast<Eigen::Index>(cols.size());
  const auto m = static_cast<Eigen::Index>(cs_.rows.size());

  // Row echelon form of [ones; rows] restricted to the face, tracking how each
  // surviving row combines the original ones.
  struct Pending {
    Vector<Rational> coeff;
    Rational rhs;
    Vector<Rational> combo;
    Eigen::Index pivot = -1;
  };
  std::vector<Pending> pivots;
  pivots.push_back({Vector<Rational>::Constant(n, Rational(1)), Rational(1), Vector<Rational>::Constant(m, Rational(0)), 0});
  std::vector<Pending> kept;
  for (Eigen::Index j = 0; j < m; ++j) {
    Pending row{Vector<Rational>(n), cs_.rows[static_cast<std::size_t>(j)].rhs, Vector<Rational>::Constant(m, Rational(0)), -1};
    for (Eigen::Index k = 0; k < n; ++k) row.coeff[k] = cs_.rows[static_cast<std::size_t>(j)].coefficients[static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)])];
    row.combo[j] = Rational(1);
    for (const auto& pv : pivots) {
      if (row.coeff[pv.pivot].is_zero()) continue;
      const Rational f = row.coeff[pv.pivot] / pv.coeff[pv.pivot];
      for (Eigen::Index k = 0; k < n; ++k) row.coeff[k] -= f * pv.coeff[k];
      row.rhs -= f * pv.rhs;
      for (Eigen::Index k = 0; k < m; ++k) row.combo[k] -= f * pv.combo[k];
    }
    Eigen::Index lead = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!row.coeff[k].is_zero()) {
        lead = k;
        break;
      }
    }
    if (lead < 0) {
      if (!row.rhs.is_zero()) throw Error(ErrorCode::Internal, "row reduction contradicts exact feasibility");
      continue;
    }
    row.pivot = lead;
    pivots.push_back(row);
    kept.push_back(row);
  }

  Face face{support, Matrix<double>(static_cast<Eigen::Index>(kept.size()), n),
            Vector<double>(static_cast<Eigen::Index>(kept.size())),
            Matrix<double>(static_cast<Eigen::Index>(kept.size()), m), *witness};
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    for (Eigen::Index k = 0; k < n; ++k) face.reduced(ri, k) = to_double(kept[r].coeff[k]);
    face.reduced_rhs[ri] = to_double(kept[r].rhs);
    for (Eigen::Index k = 0; k < m; ++k) face.transform(ri, k) = to_double(kept[r].combo[k]);
    const double scale = face.reduced.row(ri).cwiseAbs().maxCoeff();
    face.reduced.row(ri) /= scale;
    face.reduced_rhs[ri] /= scale;
    face.transform.row(ri) /= scale;
  }
  return face;
}

MreSolution MreProjector::project(const FloatDistribution& prior, const SolverOptions& opts) {
  if (!(prior.space() == cs_.space)) throw Error(ErrorCode::InvalidArgument, "prior is over a different world set");
  const Face& face = face_for(prior.support());
  const auto cols = face.support.indices();
  const auto n = static_cast<Eigen::Index>(cols.size());
  const Matrix<double>& rows = face.reduced;
  const Vector<double>& rhs = face.reduced_rhs;

  Vector<double> log_prior(n);
  double face_mass = 0;
  for (Eigen::Index k = 0; k < n; ++k) face_mass += prior[cols[static_cast<std::size_t>(k)]];
  for (Eigen::Index k = 0; k < n; ++k) log_prior[k] = std::log(prior[cols[static_cast<std::size_t>(k)]] / face_mass);

  Vector<double> lambda = Vector<double>::Zero(rows.rows());
  DualState state = evaluate(log_prior, rows, rhs, lambda);
  int iterations = 0;
  bool used_fallback = false;
  while (rows.rows() > 0 && state.grad.lpNorm<Eigen::Infinity>() > opts.grad_tol) {
    if (iterations >= opts.max_iters) break;
    ++iterations;
    const Matrix<double> h = hessian(rows, state.p);
    Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(h, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    bool progressed = false;
    if (lo > 0 && hi / lo <= kConditionLimit) {
      const Vector<double> step = h.ldlt().solve(-state.grad);
      const double slope = state.grad.dot(step);
      double t = 1.0;
      while (t > 1e-12) {
        DualState trial = evaluate(log_prior, rows, rhs, lambda + t * step);
        // Near the optimum the value change drowns in rounding; a full step
        // that halves the gradient is accepted on that evidence alone.
        const bool gradient_drop = t == 1.0 && trial.grad.lpNorm<Eigen::Infinity>() <
                                                   0.5 * state.grad.lpNorm<Eigen::Infinity>();
        if (trial.value <= state.value + 1e-4 * t * slope || gradient_drop) {
          lambda += t * step;
          progressed = trial.value < state.value || trial.grad.lpNorm<Eigen::Infinity>() < state.grad.lpNorm<Eigen::Infinity>();
          state = std::move(trial);
          break;
        }
        t *= 0.5;
      }
    } else {
      used_fallback = true;
      for (Eigen::Index j = 0; j < rows.rows(); ++j) {
        const Vector<double> mean = rows * state.p;
        const double curvature = (rows.row(j).array().square() * state.p.transpose().array()).sum() - mean[j] * mean[j];
        if (!(curvature > 1e-300)) continue;
        const double g = state.grad[j];
        double t = 1.0;
        while (t > 1e-12) {
          Vector<double> trial_lambda = lambda;
          trial_lambda[j] -= t * g / curvature;
          DualState trial = evaluate(log_prior, rows, rhs, trial_lambda);
          if (trial.value <= state.value - 1e-4 * t * g * g / curvature) {
            lambda = std::move(trial_lambda);
            progressed = progressed || trial.value < state.value;
            state = std::move(trial);
            break;
          }
          t *= 0.5;
        }
      }
    }
    if (lambda.size() > 0 && lambda.lpNorm<Eigen::Infinity>() > kDualWeightLimit) {
      throw Error(ErrorCode::NoConvergence, "dual weights diverged beyond the exp() range");
    }
    if (!progressed) break;  // stalled at machine precision
  }

  Vector<double> mass = Vector<double>::Zero(static_cast<Eigen::Index>(prior.size()));
  for (Eigen::Index k = 0; k < n; ++k) mass[static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)])] = state.p[k];
  FloatDistribution posterior(prior.space(), mass);

  double residual = 0;
  for (const auto& row : cs_.rows) {
    double lhs = 0;
    for (Eigen::Index w = 0; w < mass.size(); ++w) lhs += to_double(row.coefficients[w]) * mass[w];
    residual = std::max(residual, std::abs(lhs - to_double(row.rhs)));
  }
  if (residual > opts.tol) {
    std::ostringstream msg;
    msg << "MRE solve stopped after " << iterations << " iterations with residual " << residual
        << " (dual gradient " << (rows.rows() > 0 ? state.grad.lpNorm<Eigen::Infinity>() : 0.0) << ")";
    throw Error(ErrorCode::NoConvergence, msg.str());
  }

  MreSolution out{posterior, relative_entropy(posterior, prior), {}, iterations, residual, face.support, used_fallback};
  const Vector<double> weights = face.transform.rows() > 0 ? Vector<double>(face.transform.transpose() * lambda)
                                                           : Vector<double>::Zero(static_cast<Eigen::Index>(cs_.rows.size()));
  out.dual_weights.assign(weights.data(), weights.data() + weights.size());
  const double witness_kl = relative_entropy(face.witness, prior);
  if (out.kl_value > witness_kl + opts.tol + 1e-12) {
    throw Error(ErrorCode::Internal, "MRE optimum exceeds the relative entropy of a feasible point");
  }
  return out;
}

MreSolution solve_mre(const FloatDistribution& prior, const LinearConstraintSet& cs, const SolverOptions& opts) {
  MreProjector projector(cs);
  return projector.project(prior, opts);
}

MreSolution solve_mre(const NaiveDistribution& prior, const LinearConstraintSet& cs, const SolverOptions& opts) {
  return solve_mre(to_float(prior), cs, opts);
}

JeffreyLikeVerdict is_jeffrey_like(const FloatDistribution& prior, const ConstraintObservation& o,
                                   const SolverOptions& opts) {
  if (o.sets.size() != 2 || !o.odds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "the Jeffrey-like test is defined for two-set observations only");
  }
  const auto single = [&](std::size_t i) {
    return ConstraintObservation{o.name, {o.sets[i]}, {o.targets[i]}, {}};
  };
  JeffreyLikeVerdict verdict;
  const auto first = solve_mre(prior, to_linear_constraints(prior.space(), single(0)), opts);
  verdict.first_gap = std::abs(prob(first.posterior, o.sets[1]) - to_double(o.targets[1]));
  if (verdict.first_gap <= opts.tol) {
    verdict.jeffrey_like = true;
    verdict.via = 0;
    return verdict;
  }
  const auto second = solve_mre(prior, to_linear_constraints(prior.space(), single(1)), opts);
  verdict.second_gap = std::abs(prob(second.posterior, o.sets[0]) - to_double(o.targets[0]));
  if (verdict.second_gap <= opts.tol) {
    verdict.jeffrey_like = true;
    verdict.via = 1;
  }
  return verdict;
}

JeffreyLikeVerdict is_jeffrey_like(const NaiveDistribution& prior, const ConstraintObservation& o,
                                   const SolverOptions& opts) {
  return is_jeffrey_like(to_float(prior), o, opts);
}

}  // namespace carlab
