#include "carlab/mre_solver.hpp"
#include "carlab/scenarios.hpp"
#include "carlab/update_rules.hpp"

#include "support.hpp"
#include "unit_helpers.hpp"

#include <cmath>

using namespace carlab;
using namespace unit;

namespace {

Vector<Rational> row(std::initializer_list<long> values) {
  Vector<Rational> v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (long x : values) v[i++] = Rational(x);
  return v;
}

}  // namespace

TEST_CASE("linear encoding") {
  const WorldSet three{"1", "2", "3"};
  const auto cs = to_linear_constraints(three, ConstraintObservation{"c", {three.event({"1", "2"})}, {R("2/5")}, {}});
  REQUIRE(cs.rows.size() == 1);
  CHECK(cs.rows[0].coefficients == row({1, 1, 0}));
  CHECK(cs.rows[0].rhs == R("2/5"));

  const auto jb = judy_benjamin(Rational(3));
  const auto odds = to_linear_constraints(jb.prior.space(), jb.observations.constraint(0));
  REQUIRE(odds.rows.size() == 1);
  CHECK(odds.rows[0].coefficients == row({0, 0, 1, -3}));
  CHECK(odds.rows[0].rhs == Rational(0));

  CHECK(to_linear_constraints(three, ConstraintObservation{"none", {}, {}, {}}).rows.empty());
}

TEST_CASE("feasibility") {
  const WorldSet three{"1", "2", "3"};
  const Event u = three.event({"1", "2"});
  const auto point4 = to_linear_constraints(three, ConstraintObservation{"c", {u}, {R("2/5")}, {}});
  const auto result = feasible(three.event({"2", "3"}), point4);
  REQUIRE(result.feasible);
  CHECK(prob(*result.witness, u) == R("2/5"));
  CHECK(result.witness->support().is_subset_of(three.event({"2", "3"})));

  LinearConstraintSet clash = point4;
  clash.rows.push_back(LinearRow{row({1, 1, 0}), R("3/5")});
  CHECK_FALSE(feasible(three.all(), clash).feasible);

  const auto certain = to_linear_constraints(three, ConstraintObservation{"c", {u}, {R("1")}, {}});
  CHECK_FALSE(feasible(three.event({"3"}), certain).feasible);
  CHECK(error_of([&] { solve_mre(point_mass<Rational>(three, 2), certain); }) ==
        ErrorCode::NotAbsolutelyContinuousFeasible);
  CHECK(error_of([&] { solve_mre(uniform<Rational>(three), clash); }) == ErrorCode::Infeasible);
}

TEST_CASE("solve_mre basics") {
  const WorldSet space{"1", "2", "3", "4"};
  const auto u = uniform<Rational>(space);
  const auto satisfied = to_linear_constraints(space, ConstraintObservation{"c", {space.event({"1", "2"})}, {R("1/2")}, {}});
  const auto same = solve_mre(u, satisfied);
  CHECK(same.kl_value == doctest::Approx(0.0).scale(1.0));
  CHECK(tv_distance(same.posterior, u) <= 1e-12);

  // Single-set MRE tilts uniformly inside and outside the set.
  const auto tilt = solve_mre(u, to_linear_constraints(space, ConstraintObservation{"c", {space.event({"1", "2"})},
                                                                                    {R("3/5")}, {}}));
  CHECK(tilt.posterior[0] == doctest::Approx(0.3));
  CHECK(tilt.posterior[2] == doctest::Approx(0.2));
  CHECK(tilt.residual <= 1e-9);
  CHECK(tilt.kl_value == doctest::Approx(0.6 * std::log2(1.2) + 0.4 * std::log2(0.8)));

  // Boundary face: P({1,2}) = 1 zeroes worlds 3 and 4 exactly.
  const auto edge = solve_mre(u, to_linear_constraints(space, ConstraintObservation{"c", {space.event({"1", "2"})},
                                                                                    {R("1")}, {}}));
  CHECK(edge.posterior[2] == 0.0);
  CHECK(edge.posterior[3] == 0.0);
  CHECK(edge.face == space.event({"1", "2"}));
}

TEST_CASE("MRE reproduces Jeffrey on partitions") {
  testsupport::Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<std::size_t>(testsupport::uniform_int(rng, 2, 6));
    const auto space = testsupport::numbered_worlds(n);
    const auto cells = testsupport::random_partition(rng, n, 4);
    const auto prior = testsupport::random_positive(rng, space);
    Vector<Rational> w(static_cast<Eigen::Index>(cells.size()));
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = Rational(testsupport::uniform_int(rng, 0, 5));
    w[0] += Rational(1);
    const WorldSet cell_space = testsupport::numbered_worlds(cells.size(), "c");
    const auto weights = normalize(cell_space, w);
    std::vector<Rational> alphas;
    for (std::size_t j = 0; j < cells.size(); ++j) alphas.push_back(weights[j]);
    const JeffreyObservation jo{"j", cells, alphas};
    CHECK(tv_distance(mre_update(prior, as_constraints(jo)), jeffrey_update(prior, jo)) <= 1e-9);
  }
}

TEST_CASE("dual gradient matches finite differences") {
  const auto jb = judy_benjamin(Rational(3));
  const auto cs = to_linear_constraints(jb.prior.space(), jb.observations.constraint(0));
  const auto prior = to_float(jb.prior);
  for (double l : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
    Vector<double> lambda(1);
    lambda << l;
    const double h = 1e-6;
    Vector<double> up = lambda, down = lambda;
    up[0] += h;
    down[0] -= h;
    const double fd = (dual_objective(prior, cs, up) - dual_objective(prior, cs, down)) / (2 * h);
    CHECK(dual_gradient(prior, cs, lambda)[0] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("projector caches faces per prior support") {
  const WorldSet space{"1", "2", "3", "4"};
  MreProjector projector(
      to_linear_constraints(space, ConstraintObservation{"c", {space.event({"1", "2"}), space.event({"2", "3"})},
                                                         {R("1/2"), R("1/4")}, {}}));
  testsupport::Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    const auto prior = testsupport::random_positive(rng, space);
    const auto sol = projector.project(to_float(prior));
    CHECK(sol.residual <= 1e-9);
    CHECK(tv_distance(sol.posterior, solve_mre(prior, projector.constraints()).posterior) <= 1e-12);
  }
}

TEST_CASE("Judy Benjamin against the closed form") {
  for (const char* a : {"1/2", "2", "3", "5"}) {
    const auto jb = judy_benjamin(R(a));
    const auto post = mre_update(jb.prior, jb.observations.constraint(0));
    const double blue = post[0] + post[1];
    CHECK(blue > 0.5 + 1e-6);
    CHECK(blue == doctest::Approx(testsupport::judy_closed_form_blue(to_double(R(a)))).epsilon(1e-9));
    CHECK(post[2] == doctest::Approx(to_double(R(a)) * post[3]).epsilon(1e-9));
  }
  const auto even = judy_benjamin(Rational(1));
  const auto post = mre_update(even.prior, even.observations.constraint(0));
  CHECK(std::abs(post[0] + post[1] - 0.5) <= 1e-9);
}

TEST_CASE("Jeffrey-like test") {
  const WorldSet space{"1", "2", "3", "4"};
  const auto u = uniform<Rational>(space);
  const Event u1 = space.event({"1", "2"});
  const Event u2 = space.event({"2", "3"});
  const auto yes = is_jeffrey_like(u, ConstraintObservation{"c", {u1, u2}, {R("3/5"), R("1/2")}, {}});
  CHECK(yes.jeffrey_like);
  CHECK(yes.via == std::optional<int>(0));
  const auto no = is_jeffrey_like(u, ConstraintObservation{"c", {u1, u2}, {R("3/5"), R("2/5")}, {}});
  CHECK_FALSE(no.jeffrey_like);
  CHECK(no.first_gap == doctest::Approx(0.1));
  CHECK(no.second_gap == doctest::Approx(0.1));

  testsupport::Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const auto prior = testsupport::random_positive(rng, space);
    CHECK(is_jeffrey_like(prior, ConstraintObservation{"c", {u1, u2}, {prob(prior, u1), prob(prior, u2)}, {}})
              .jeffrey_like);
  }
  CHECK(error_of([&] { is_jeffrey_like(u, ConstraintObservation{"c", {u1}, {R("1/2")}, {}}); }) ==
        ErrorCode::InvalidArgument);
}
