#include "carlab/exact_lp.hpp"

#include "carlab/errors.hpp"

#include <vector>

namespace carlab::lp {

namespace {

// Dense simplex tableau [B^-1 A | B^-1 b] with an explicit basis.
class Tableau {
 public:
  Tableau(const Matrix<Rational>& a, const Vector<Rational>& b)
      : rows_(a.rows()), structural_(a.cols()), cols_(a.cols() + a.rows()), t_(a.rows(), a.cols() + a.rows() + 1) {
    t_.setConstant(Rational(0));
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const bool flip = b[i] < Rational(0);
      for (Eigen::Index j = 0; j < structural_; ++j) t_(i, j) = flip ? Rational(-a(i, j)) : a(i, j);
      t_(i, structural_ + i) = Rational(1);
      t_(i, cols_) = flip ? Rational(-b[i]) : b[i];
      basis_[static_cast<std::size_t>(i)] = structural_ + i;
    }
    active_.assign(static_cast<std::size_t>(rows_), true);
  }

  // Runs simplex on `cost` over columns [0, allowed). Returns false if unbounded.
  bool optimize(const Vector<Rational>& cost, Eigen::Index allowed) {
    for (;;) {
      const Vector<Rational> reduced = reduced_costs(cost);
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (reduced[j] < Rational(0)) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      Eigen::Index leaving = -1;
      Rational best_ratio;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (!active_[static_cast<std::size_t>(i)] || !(t_(i, entering) > Rational(0))) continue;
        const Rational ratio = t_(i, cols_) / t_(i, entering);
        if (leaving < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
    }
  }

  Rational objective(const Vector<Rational>& cost) const {
    Rational value(0);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      value += cost[basis_[static_cast<std::size_t>(i)]] * t_(i, cols_);
    }
    return value;
  }

  // After phase 1 reached zero: pivot zero-level artificials out of the basis,
  // dropping rows that turn out to be redundant.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!active_[static_cast<std::size_t>(i)] || basis_[static_cast<std::size_t>(i)] < structural_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < structural_; ++j) {
        if (!t_(i, j).is_zero()) {
          col = j;
          break;
        }
      }
      if (col < 0) {
        active_[static_cast<std::size_t>(i)] = false;
      } else {
        pivot(i, col);
      }
    }
  }

  Vector<Rational> solution() const {
    Vector<Rational> x = Vector<Rational>::Constant(structural_, Rational(0));
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const auto var = basis_[static_cast<std::size_t>(i)];
      if (active_[static_cast<std::size_t>(i)] && var < structural_) x[var] = t_(i, cols_);
    }
    return x;
  }

  Eigen::Index structural() const { return structural_; }
  Eigen::Index columns() const { return cols_; }

 private:
  Vector<Rational> reduced_costs(const Vector<Rational>& cost) const {
    Vector<Rational> reduced = cost;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const Rational& cb = cost[basis_[static_cast<std::size_t>(i)]];
      if (cb.is_zero()) continue;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (!t_(i, j).is_zero()) reduced[j] -= cb * t_(i, j);
      }
    }
    return reduced;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const Rational p = t_(r, c);
    for (Eigen::Index j = 0; j <= cols_; ++j) {
      if (!t_(r, j).is_zero()) t_(r, j) /= p;
    }
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == r || t_(i, c).is_zero()) continue;
      const Rational factor = t_(i, c);
      for (Eigen::Index j = 0; j <= cols_; ++j) {
        if (!t_(r, j).is_zero()) t_(i, j) -= factor * t_(r, j);
      }
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::Index cols_;
  Matrix<Rational> t_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
};

}  // namespace

LpResult minimize(const Matrix<Rational>& a, const Vector<Rational>& b, const Vector<Rational>& c) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw Error(ErrorCode::InvalidArgument, "LP dimensions do not agree");
  }
  Tableau tableau(a, b);
  Vector<Rational> phase1 = Vector<Rational>::Constant(tableau.columns(), Rational(0));
  for (Eigen::Index j = tableau.structural(); j < tableau.columns(); ++j) phase1[j] = Rational(1);
  tableau.optimize(phase1, tableau.columns());
  if (!tableau.objective(phase1).is_zero()) return {LpStatus::Infeasible, {}, Rational(0)};
  tableau.expel_artificials();

  Vector<Rational> phase2 = Vector<Rational>::Constant(tableau.columns(), Rational(0));
  phase2.head(a.cols()) = c;
  if (!tableau.optimize(phase2, tableau.structural())) return {LpStatus::Unbounded, {}, Rational(0)};
  return {LpStatus::Optimal, tableau.solution(), tableau.objective(phase2)};
}

std::optional<Vector<Rational>> feasible_point(const Matrix<Rational>& a, const Vector<Rational>& b) {
  auto result = minimize(a, b, Vector<Rational>::Constant(a.cols(), Rational(0)));
  if (result.status != LpStatus::Optimal) return std::nullopt;
  return std::move(result.x);
}

}  // namespace carlab::lp
