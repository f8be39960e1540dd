#pragma once

#include "carlab/distribution.hpp"
#include "carlab/errors.hpp"
#include "carlab/observation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carlab {

/// The sophisticated space restricted to single-observation runs: a joint
/// distribution over (world, observation) pairs, stored as a
/// worlds x observations matrix.
template <typename Scalar>
class BasicProtocol {
 public:
  using scalar_type = Scalar;

  BasicProtocol(WorldSet space, ObservationAlphabet alphabet, Matrix<Scalar> joint)
      : space_(std::move(space)), alphabet_(std::move(alphabet)), joint_(std::move(joint)) {
    if (static_cast<std::size_t>(joint_.rows()) != space_.size() ||
        static_cast<std::size_t>(joint_.cols()) != alphabet_.size()) {
      throw Error(ErrorCode::ValidationError, "joint matrix shape does not match worlds x observations");
    }
    if (alphabet_.universe_size() != space_.size()) {
      throw Error(ErrorCode::ValidationError, "alphabet is over a different world set");
    }
    Scalar total(0);
    for (Eigen::Index w = 0; w < joint_.rows(); ++w) {
      for (Eigen::Index o = 0; o < joint_.cols(); ++o) {
        if (joint_(w, o) < Scalar(0)) throw Error(ErrorCode::ValidationError, "negative joint mass");
        total += joint_(w, o);
      }
    }
    const Scalar gap = total - Scalar(1);
    if (gap > detail::mass_tolerance<Scalar>() || -gap > detail::mass_tolerance<Scalar>()) {
      throw Error(ErrorCode::ValidationError, "joint masses do not sum to 1");
    }
  }

  const WorldSet& space() const { return space_; }
  const ObservationAlphabet& alphabet() const { return alphabet_; }
  const Matrix<Scalar>& joint() const { return joint_; }
  const Scalar& mass(std::size_t world, std::size_t observation) const {
    return joint_(static_cast<Eigen::Index>(world), static_cast<Eigen::Index>(observation));
  }
  std::size_t world_count() const { return space_.size(); }
  std::size_t observation_count() const { return alphabet_.size(); }

  friend bool operator==(const BasicProtocol& a, const BasicProtocol& b) {
    if (!(a.space_ == b.space_) || a.joint_ != b.joint_ || a.alphabet_.size() != b.alphabet_.size()) return false;
    for (std::size_t i = 0; i < a.alphabet_.size(); ++i) {
      if (name_of(a.alphabet_[i]) != name_of(b.alphabet_[i]) || !same_content(a.alphabet_[i], b.alphabet_[i])) {
        return false;
      }
    }
    return true;
  }

 private:
  WorldSet space_;
  ObservationAlphabet alphabet_;
  Matrix<Scalar> joint_;
};

using Protocol = BasicProtocol<Rational>;
using FloatProtocol = BasicProtocol<double>;

/// joint(w, o) = prior(w) * kernel(w, o). `kernel` is worlds x observations;
/// every row must sum to exactly 1 (RowNotNormalized otherwise).
Protocol from_kernel(const NaiveDistribution& prior, ObservationAlphabet alphabet, const Matrix<Rational>& kernel);

/// Pr(X_O = o | X_W = w) on the support of the world marginal; nullopt off it.
std::vector<std::optional<Rational>> kernel_column(const Protocol& p, std::size_t observation);

struct AccuracyIssue {
  std::size_t observation = 0;
  std::optional<std::size_t> world;  ///< event observations: world outside the observed set
  std::optional<std::size_t> row;    ///< Jeffrey/constraint observations: violated target row
  double found = 0.0;
  double expected = 0.0;
  std::string detail;
};

struct AccuracyReport {
  std::vector<AccuracyIssue> violations;
  bool ok() const { return violations.empty(); }
};

template <typename Scalar>
Distribution<Scalar> marginal_worlds(const BasicProtocol<Scalar>& p) {
  Vector<Scalar> mass = p.joint().rowwise().sum();
  return Distribution<Scalar>(p.space(), std::move(mass));
}

/// Column sums: Pr(X_O = o) for each observation index.
template <typename Scalar>
Vector<Scalar> marginal_observations(const BasicProtocol<Scalar>& p) {
  return p.joint().colwise().sum().transpose();
}

/// Pr(X_W = . | X_O = o). Throws UnobservableObservation for a zero column.
template <typename Scalar>
Distribution<Scalar> sophisticated_posterior(const BasicProtocol<Scalar>& p, std::size_t o) {
  if (o >= p.observation_count()) throw Error(ErrorCode::InvalidArgument, "observation index out of range");
  const Vector<Scalar> column = p.joint().col(static_cast<Eigen::Index>(o));
  const Scalar total = column.sum();
  if (!(total > Scalar(0))) {
    throw Error(ErrorCode::UnobservableObservation,
                "observation \"" + name_of(p.alphabet()[o]) + "\" has probability 0");
  }
  return normalize(p.space(), column);
}

/// The protocol conditioned on X_O = o: only column o keeps (renormalized) mass.
template <typename Scalar>
BasicProtocol<Scalar> condition_on_observation(const BasicProtocol<Scalar>& p, std::size_t o) {
  const auto posterior = sophisticated_posterior(p, o);
  Matrix<Scalar> joint = Matrix<Scalar>::Constant(p.joint().rows(), p.joint().cols(), Scalar(0));
  joint.col(static_cast<Eigen::Index>(o)) = posterior.mass();
  return BasicProtocol<Scalar>(p.space(), p.alphabet(), std::move(joint));
}

namespace detail {

template <typename Scalar>
Scalar column_prob(const Vector<Scalar>& column, const Event& u) {
  Scalar total(0);
  for (Eigen::Index w = 0; w < column.size(); ++w) {
    if (u.contains(static_cast<std::size_t>(w))) total += column[w];
  }
  return total;
}

template <typename Scalar>
Scalar from_rational(const Rational& r) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return r;
  } else {
    return static_cast<Scalar>(to_double(r));
  }
}

template <typename Scalar>
bool within(const Scalar& a, const Scalar& b, const Scalar& tol) {
  const Scalar d = a - b;
  return !(d > tol) && !(-d > tol);
}

}  // namespace detail

/// Accuracy audit. Event observations must never co-occur with worlds outside
/// their set; Jeffrey/constraint observations must satisfy their targets
/// conditional on being made. `tol` is 0 for exact protocols.
template <typename Scalar>
AccuracyReport validate_accuracy(const BasicProtocol<Scalar>& p, Scalar tol = Scalar(0)) {
  AccuracyReport report;
  const auto& alphabet = p.alphabet();
  for (std::size_t o = 0; o < alphabet.size(); ++o) {
    const Vector<Scalar> column = p.joint().col(static_cast<Eigen::Index>(o));
    const Scalar total = column.sum();
    const auto& item = alphabet[o];
    if (const auto* ev = std::get_if<EventObservation>(&item)) {
      for (std::size_t w = 0; w < p.world_count(); ++w) {
        if (!ev->set.contains(w) && column[static_cast<Eigen::Index>(w)] > tol) {
          report.violations.push_back({o, w, std::nullopt, to_double(column[static_cast<Eigen::Index>(w)]), 0.0,
                                       "world \"" + p.space().label(w) + "\" lies outside observed set \"" +
                                           ev->name + "\""});
        }
      }
      continue;
    }
    if (!(total > Scalar(0))) continue;
    std::vector<Event> sets;
    std::vector<Rational> targets;
    std::vector<OddsConstraint> odds;
    if (const auto* jo = std::get_if<JeffreyObservation>(&item)) {
      sets = jo->cells;
      targets = jo->weights;
    } else {
      const auto& co = std::get<ConstraintObservation>(item);
      sets = co.sets;
      targets = co.targets;
      odds = co.odds;
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const Scalar conditional = detail::column_prob(column, sets[i]) / total;
      const Scalar expected = detail::from_rational<Scalar>(targets[i]);
      if (!detail::within(conditional, expected, tol)) {
        report.violations.push_back({o, std::nullopt, i, to_double(conditional), to_double(expected),
                                     "Pr(X_W in set " + std::to_string(i) + " | " + name_of(item) +
                                         ") differs from its stated target"});
      }
    }
    for (std::size_t k = 0; k < odds.size(); ++k) {
      const Scalar lhs = detail::column_prob(column, odds[k].numerator) / total;
      const Scalar rhs = detail::from_rational<Scalar>(odds[k].ratio) * detail::column_prob(column, odds[k].denominator) / total;
      if (!detail::within(lhs, rhs, tol)) {
        report.violations.push_back({o, std::nullopt, sets.size() + k, to_double(lhs), to_double(rhs),
                                     "odds constraint " + std::to_string(k) + " of " + name_of(item) +
                                         " does not hold conditionally"});
      }
    }
  }
  return report;
}

/// One sampled run: the actual world and the (single) observation made.
struct RunSample {
  std::size_t world = 0;
  std::size_t observation = 0;
  friend bool operator==(const RunSample&, const RunSample&) = default;
};

/// Identifier of the sampling algorithm recorded in reports: sample i uses the
/// i-th SplitMix64 output for `seed` as a 64-bit uniform u and inverts the
/// exact cumulative joint (atoms in world-major order) at u / 2^64.
inline constexpr std::string_view kSamplerAlgorithm = "splitmix64-counter+exact-inverse-cdf/v1";

/// The i-th SplitMix64 output for a generator seeded with `seed`.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i);

std::vector<RunSample> sample_runs(const Protocol& p, std::uint64_t seed, std::size_t n);

/// Same output as sample_runs, generated in `threads` contiguous chunks.
std::vector<RunSample> sample_runs_parallel(const Protocol& p, std::uint64_t seed, std::size_t n,
                                            unsigned threads);

}  // namespace carlab
