#pragma once

#include "carlab/errors.hpp"
#include "carlab/rational.hpp"
#include "carlab/world_set.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

namespace carlab {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

/// Slack allowed when validating a distribution's total mass. Exact for
/// rationals; binary64 results come out of iterative solvers.
template <typename Scalar>
Scalar mass_tolerance() {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return Scalar(0);
  } else {
    return Scalar(1e-9);
  }
}

}  // namespace detail

/// A probability distribution over a finite world set. Zero-mass worlds are
/// kept in the vector. Masses are nonnegative and sum to one (exactly when
/// Scalar is Rational).
template <typename Scalar>
class Distribution {
 public:
  using scalar_type = Scalar;

  Distribution(WorldSet space, Vector<Scalar> mass) : space_(std::move(space)), mass_(std::move(mass)) {
    if (static_cast<std::size_t>(mass_.size()) != space_.size()) {
      throw Error(ErrorCode::ValidationError, "mass vector size does not match world set");
    }
    Scalar total(0);
    for (Eigen::Index i = 0; i < mass_.size(); ++i) {
      if (mass_[i] < Scalar(0)) {
        throw Error(ErrorCode::ValidationError, "negative mass at world \"" + space_.label(i) + "\"");
      }
      total += mass_[i];
    }
    if (abs(total - Scalar(1)) > detail::mass_tolerance<Scalar>()) {
      throw Error(ErrorCode::ValidationError, "masses do not sum to 1");
    }
  }

  const WorldSet& space() const { return space_; }
  const Vector<Scalar>& mass() const { return mass_; }
  std::size_t size() const { return space_.size(); }
  const Scalar& operator[](std::size_t i) const { return mass_[static_cast<Eigen::Index>(i)]; }
  const Scalar& at(const std::string& label) const { return (*this)[space_.index_of(label)]; }

  Event support() const {
    Event s(size());
    for (std::size_t i = 0; i < size(); ++i) {
      if ((*this)[i] > Scalar(0)) s.insert(i);
    }
    return s;
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.space_ == b.space_ && a.mass_ == b.mass_;
  }

 private:
  static Scalar abs(const Scalar& x) { return x < Scalar(0) ? Scalar(-x) : x; }

  WorldSet space_;
  Vector<Scalar> mass_;
};

using NaiveDistribution = Distribution<Rational>;
using FloatDistribution = Distribution<double>;

/// Scales nonnegative weights to unit total. Throws AllZeroWeights.
template <typename Scalar>
Distribution<Scalar> normalize(const WorldSet& space, const Vector<Scalar>& weights) {
  if (static_cast<std::size_t>(weights.size()) != space.size()) {
    throw Error(ErrorCode::ValidationError, "weight vector size does not match world set");
  }
  Scalar total(0);
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] < Scalar(0)) throw Error(ErrorCode::ValidationError, "negative weight");
    total += weights[i];
  }
  if (!(total > Scalar(0))) throw Error(ErrorCode::AllZeroWeights, "every weight is zero");
  Vector<Scalar> mass = weights;
  for (Eigen::Index i = 0; i < mass.size(); ++i) mass[i] /= total;
  if constexpr (!std::is_same_v<Scalar, Rational>) {
    // Renormalize once more so the float total is as close to 1 as rounding allows.
    mass /= mass.sum();
  }
  return Distribution<Scalar>(space, std::move(mass));
}

template <typename Scalar>
Distribution<Scalar> uniform(const WorldSet& space) {
  return normalize<Scalar>(space, Vector<Scalar>::Constant(static_cast<Eigen::Index>(space.size()), Scalar(1)));
}

template <typename Scalar>
Distribution<Scalar> point_mass(const WorldSet& space, std::size_t world) {
  Vector<Scalar> mass = Vector<Scalar>::Constant(static_cast<Eigen::Index>(space.size()), Scalar(0));
  mass[static_cast<Eigen::Index>(world)] = Scalar(1);
  return Distribution<Scalar>(space, std::move(mass));
}

template <typename Scalar>
Scalar prob(const Distribution<Scalar>& d, const Event& u) {
  if (u.universe_size() != d.size()) throw Error(ErrorCode::InvalidArgument, "event over a different world set");
  Scalar total(0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (u.contains(i)) total += d[i];
  }
  return total;
}

/// Ordinary conditioning. Throws ZeroProbabilityEvent when prob(d, u) == 0.
template <typename Scalar>
Distribution<Scalar> condition(const Distribution<Scalar>& d, const Event& u) {
  const Scalar pu = prob(d, u);
  if (!(pu > Scalar(0))) throw Error(ErrorCode::ZeroProbabilityEvent, "conditioning event has probability 0");
  Vector<Scalar> mass = Vector<Scalar>::Constant(static_cast<Eigen::Index>(d.size()), Scalar(0));
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (u.contains(i)) mass[static_cast<Eigen::Index>(i)] = d[i] / pu;
  }
  if constexpr (!std::is_same_v<Scalar, Rational>) mass /= mass.sum();
  return Distribution<Scalar>(d.space(), std::move(mass));
}

/// Relative entropy D(p || q) in bits, with 0 log(0/c) = 0. Returns +inf when
/// p is not absolutely continuous with respect to q.
template <typename ScalarP, typename ScalarQ>
double relative_entropy(const Distribution<ScalarP>& p, const Distribution<ScalarQ>& q) {
  if (!(p.space() == q.space())) throw Error(ErrorCode::InvalidArgument, "distributions over different world sets");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = to_double(p[i]);
    if (!(p[i] > ScalarP(0))) continue;
    if (!(q[i] > ScalarQ(0))) return std::numeric_limits<double>::infinity();
    total += pi * std::log2(pi / to_double(q[i]));
  }
  return total;
}

/// Total variation distance, (1/2) sum |p - q|.
template <typename Scalar>
Scalar tv_distance(const Distribution<Scalar>& p, const Distribution<Scalar>& q) {
  if (!(p.space() == q.space())) throw Error(ErrorCode::InvalidArgument, "distributions over different world sets");
  Scalar total(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Scalar diff = p[i] - q[i];
    total += diff < Scalar(0) ? Scalar(-diff) : diff;
  }
  return total / Scalar(2);
}

inline FloatDistribution to_float(const NaiveDistribution& d) {
  Vector<double> mass(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) mass[static_cast<Eigen::Index>(i)] = to_double(d[i]);
  return FloatDistribution(d.space(), std::move(mass));
}

inline const FloatDistribution& to_float(const FloatDistribution& d) { return d; }

/// Mixed-regime total variation: the exact side is converted to binary64.
inline double tv_distance(const FloatDistribution& p, const NaiveDistribution& q) {
  return tv_distance(p, to_float(q));
}

}  // namespace carlab
