#include "carlab/distribution.hpp"

#include "unit_helpers.hpp"

#include <cmath>
#include <limits>

using namespace carlab;
using namespace unit;

namespace {

Vector<Rational> weights(std::initializer_list<long> values) {
  Vector<Rational> v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (long x : values) v[i++] = Rational(x);
  return v;
}

}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(R("2/4") == Rational(1, 2));
  CHECK(R("-3") == Rational(-3));
  CHECK(R("7/21").str() == "1/3");
  CHECK(error_of([] { R(" 7/21"); }) == ErrorCode::ParseError);
  CHECK(Rational(0).str() == "0/1");
  CHECK(error_of([] { R("1/0"); }) == ErrorCode::ParseError);
  CHECK(error_of([] { R("1/2/3"); }) == ErrorCode::ParseError);
  CHECK(error_of([] { R("x"); }) == ErrorCode::ParseError);
  CHECK(error_of([] { R(""); }) == ErrorCode::ParseError);
}

TEST_CASE("world sets and events") {
  const WorldSet space{"a", "b", "c"};
  CHECK(space.size() == 3);
  CHECK(space.index_of("c") == 2);
  CHECK(error_of([&] { space.index_of("z"); }) == ErrorCode::ValidationError);
  CHECK(error_of([] { WorldSet{"a", "a"}; }) == ErrorCode::ValidationError);
  CHECK(error_of([] { WorldSet{std::vector<std::string>{}}; }) == ErrorCode::ValidationError);
  CHECK(error_of([] { WorldSet{"a", ""}; }) == ErrorCode::ValidationError);

  const Event ab = space.event({"a", "b"});
  const Event bc = space.event({"b", "c"});
  CHECK((ab & bc) == space.event({"b"}));
  CHECK((ab | bc) == space.all());
  CHECK((ab - bc) == space.event({"a"}));
  CHECK(ab.complement() == space.event({"c"}));
  CHECK(ab.intersects(bc));
  CHECK_FALSE(space.event({"a"}).intersects(space.event({"c"})));
  CHECK(space.event({"b"}).is_subset_of(ab));
  CHECK(space.none().empty());
  CHECK(ab.indices() == std::vector<std::size_t>{0, 1});
}

TEST_CASE("normalize") {
  const WorldSet space{"1", "2", "3"};
  CHECK(normalize(space, weights({1, 1, 1})) == dist(space, {"1/3", "1/3", "1/3"}));
  const auto d = normalize(space, weights({2, 0, 2}));
  CHECK(d == dist(space, {"1/2", "0", "1/2"}));
  CHECK(d.support() == space.event({"1", "3"}));
  CHECK(error_of([&] { normalize(space, weights({0, 0, 0})); }) == ErrorCode::AllZeroWeights);
  CHECK(error_of([&] { normalize(space, weights({1, -1, 1})); }) == ErrorCode::ValidationError);
}

TEST_CASE("distributions reject bad masses") {
  const WorldSet space{"1", "2"};
  CHECK(error_of([&] { dist(space, {"1/2", "1/3"}); }) == ErrorCode::ValidationError);
  CHECK(error_of([&] { dist(space, {"3/2", "-1/2"}); }) == ErrorCode::ValidationError);
  CHECK(error_of([&] { dist(space, {"1"}); }) == ErrorCode::ValidationError);
}

TEST_CASE("prob") {
  const WorldSet space{"a", "b", "c"};
  const auto u = uniform<Rational>(space);
  CHECK(prob(u, space.event({"a", "b"})) == Rational(2, 3));
  const auto d = dist(space, {"1/7", "2/7", "4/7"});
  CHECK(prob(d, space.all()) == Rational(1));
  CHECK(prob(d, space.none()) == Rational(0));
}

TEST_CASE("condition") {
  const WorldSet space{"w_a", "w_b", "w_c"};
  const auto u = uniform<Rational>(space);
  const auto c = condition(u, space.event({"w_a", "w_c"}));
  CHECK(c == dist(space, {"1/2", "0", "1/2"}));
  const auto d = dist(space, {"1/7", "2/7", "4/7"});
  CHECK(condition(d, space.all()) == d);
  CHECK(error_of([&] { condition(point_mass<Rational>(space, 0), space.event({"w_b", "w_c"})); }) ==
        ErrorCode::ZeroProbabilityEvent);
}

TEST_CASE("relative entropy in bits") {
  const WorldSet space{"1", "2"};
  const auto p = dist(space, {"1/2", "1/2"});
  const auto q = dist(space, {"1/4", "3/4"});
  CHECK(relative_entropy(p, p) == 0.0);
  // 1/2 log2(2) + 1/2 log2(2/3) = 1 - log2(3)/2
  CHECK(relative_entropy(p, q) == doctest::Approx(1.0 - 0.5 * std::log2(3.0)).epsilon(1e-12));
  CHECK(relative_entropy(p, q) == doctest::Approx(0.20752).epsilon(1e-4));
  const auto left = point_mass<Rational>(space, 0);
  const auto right = point_mass<Rational>(space, 1);
  CHECK(std::isinf(relative_entropy(left, right)));
  // Zero-mass worlds of p contribute nothing.
  CHECK(relative_entropy(left, p) == doctest::Approx(1.0));
}

TEST_CASE("total variation") {
  const WorldSet space{"1", "2"};
  const auto p = dist(space, {"1/2", "1/2"});
  CHECK(tv_distance(p, p) == Rational(0));
  CHECK(tv_distance(point_mass<Rational>(space, 0), point_mass<Rational>(space, 1)) == Rational(1));
  CHECK(tv_distance(p, dist(space, {"1/3", "2/3"})) == Rational(1, 6));
  CHECK(tv_distance(to_float(p), dist(space, {"1/3", "2/3"})) == doctest::Approx(1.0 / 6));
}

TEST_CASE("float distributions tolerate rounding") {
  const WorldSet space{"1", "2", "3"};
  Vector<double> v(3);
  v << 0.1, 0.2, 0.7000000000000001;
  CHECK_NOTHROW(FloatDistribution(space, v));
  v << 0.1, 0.2, 0.8;
  CHECK_THROWS_AS(FloatDistribution(space, v), Error);
}
