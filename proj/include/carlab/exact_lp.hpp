#pragma once

#include "carlab/distribution.hpp"
#include "carlab/rational.hpp"

#include <optional>

namespace carlab::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector<Rational> x;  ///< optimal basic solution when status == Optimal
  Rational objective;
};

/// Exact two-phase simplex (Bland's rule, so it always terminates):
///   minimize c.x  subject to  A x = b,  x >= 0.
LpResult minimize(const Matrix<Rational>& a, const Vector<Rational>& b, const Vector<Rational>& c);

/// A basic feasible point of {A x = b, x >= 0}, or nullopt when empty.
std::optional<Vector<Rational>> feasible_point(const Matrix<Rational>& a, const Vector<Rational>& b);

}  // namespace carlab::lp
