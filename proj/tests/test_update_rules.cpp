#include "carlab/scenarios.hpp"
#include "carlab/update_rules.hpp"

#include "support.hpp"
#include "unit_helpers.hpp"

using namespace carlab;
using namespace unit;

TEST_CASE("rule names") {
  CHECK(parse_rule("naive") == UpdateRule::NaiveConditioning);
  CHECK(parse_rule("jeffrey") == UpdateRule::JeffreyConditioning);
  CHECK(parse_rule("mre") == UpdateRule::MRE);
  CHECK(rule_name(UpdateRule::MRE) == "mre");
  CHECK(error_of([] { parse_rule("bayes"); }) == ErrorCode::InvalidArgument);
  CHECK(natural_rule(ObservationKind::Event) == UpdateRule::NaiveConditioning);
  CHECK(natural_rule(ObservationKind::Jeffrey) == UpdateRule::JeffreyConditioning);
  CHECK(natural_rule(ObservationKind::Constraint) == UpdateRule::MRE);
}

TEST_CASE("naive conditioning") {
  const auto prisoners = three_prisoners(Rational(1, 2));
  const auto prior = marginal_worlds(prisoners);
  CHECK(naive_condition(prior, prisoners.alphabet().event(0)) == dist(prior.space(), {"1/2", "0", "1/2"}));

  const auto monty = monty_hall(Rational(1, 2));
  const auto& opens3 = monty.alphabet().event(monty.alphabet().index_of("opens-3"));
  CHECK(naive_condition(marginal_worlds(monty), opens3) == dist(monty.space(), {"1/2", "1/2", "0"}));

  CHECK(naive_condition(prior, EventObservation{"all", prior.space().all()}) == prior);
  CHECK(error_of([&] {
          naive_condition(point_mass<Rational>(prior.space(), 1), prisoners.alphabet().event(0));
        }) == ErrorCode::ZeroProbabilityEvent);
}

TEST_CASE("Jeffrey conditioning") {
  const WorldSet space{"1", "2", "3", "4"};
  const auto u = uniform<Rational>(space);
  const JeffreyObservation o{"j", {space.event({"1", "2"}), space.event({"3", "4"})}, {R("7/10"), R("3/10")}};
  CHECK(jeffrey_update(u, o) == dist(space, {"7/20", "7/20", "3/20", "3/20"}));

  const WorldSet three{"1", "2", "3"};
  const JeffreyObservation singletons{
      "s", {three.event({"1"}), three.event({"2"}), three.event({"3"})}, {R("1/2"), R("1/2"), R("0")}};
  try {
    jeffrey_update(point_mass<Rational>(three, 0), singletons);
    FAIL("expected JeffreyUndefined");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JeffreyUndefined);
    // The offending cell is named by its 1-based position.
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  // A zero weight on a null cell is fine.
  const JeffreyObservation harmless{
      "h", {three.event({"1"}), three.event({"2"}), three.event({"3"})}, {R("1"), R("0"), R("0")}};
  CHECK(jeffrey_update(point_mass<Rational>(three, 0), harmless) == point_mass<Rational>(three, 0));
}

TEST_CASE("Jeffrey with a unit weight is conditioning") {
  testsupport::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<std::size_t>(testsupport::uniform_int(rng, 1, 6));
    const auto space = testsupport::numbered_worlds(n);
    const auto cells = testsupport::random_partition(rng, n, 4);
    const auto prior = testsupport::random_with_zeros(rng, space);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (prob(prior, cells[j]).is_zero()) continue;
      std::vector<Rational> weights(cells.size(), Rational(0));
      weights[j] = Rational(1);
      CHECK(jeffrey_update(prior, JeffreyObservation{"j", cells, weights}) ==
            naive_condition(prior, EventObservation{"e", cells[j]}));
    }
  }
}

TEST_CASE("MRE updating") {
  const WorldSet space{"1", "2", "3", "4"};
  const auto u = uniform<Rational>(space);
  const JeffreyObservation jo{"j", {space.event({"1", "2"}), space.event({"3", "4"})}, {R("7/10"), R("3/10")}};
  CHECK(tv_distance(mre_update(u, as_constraints(jo)), jeffrey_update(u, jo)) <= 1e-9);

  const ConstraintObservation satisfied{"c", {space.event({"1", "3"})}, {R("1/2")}, {}};
  const auto same = mre_update(u, satisfied);
  CHECK(tv_distance(same, u) <= 1e-12);

  const auto jb = judy_benjamin(Rational(3));
  const auto post = mre_update(jb.prior, jb.observations.constraint(0));
  CHECK(post[0] + post[1] > 0.5);

  // Event observations become P(U) = 1, which is conditioning.
  const EventObservation e{"e", space.event({"2", "3", "4"})};
  CHECK(tv_distance(mre_update(u, as_constraints(e)), naive_condition(u, e)) <= 1e-9);
}

TEST_CASE("compare on the prisoners puzzle") {
  const auto half = three_prisoners(Rational(1, 2));
  const auto report = compare(half, 0, UpdateRule::NaiveConditioning);
  CHECK(report.exact);
  CHECK_FALSE(report.agree);
  CHECK(report.tv_gap_exact == std::optional<Rational>(Rational(1, 6)));
  CHECK(report.tv_gap == doctest::Approx(1.0 / 6));
  CHECK(report.naive_exact == std::optional<NaiveDistribution>(dist(half.space(), {"1/2", "0", "1/2"})));
  CHECK(report.sophisticated_result == dist(half.space(), {"1/3", "0", "2/3"}));

  const auto one = three_prisoners(Rational(1));
  CHECK(compare(one, 0, UpdateRule::NaiveConditioning).agree);
  CHECK_FALSE(compare(one, 1, UpdateRule::NaiveConditioning).agree);

  // MRE on an event observation is conditioning, so it agrees with the exact rule.
  const auto mre = compare(half, 0, UpdateRule::MRE);
  CHECK_FALSE(mre.exact);
  CHECK(mre.tv_gap == doctest::Approx(1.0 / 6).epsilon(1e-9));

  CHECK(error_of([&] { compare(half, 0, UpdateRule::JeffreyConditioning); }) == ErrorCode::RuleKindMismatch);
}

TEST_CASE("compare with a disjoint alphabet always agrees") {
  testsupport::Rng rng(23);
  const WorldSet space{"1", "2", "3", "4"};
  const ObservationAlphabet alphabet({EventObservation{"low", space.event({"1", "2"})},
                                      EventObservation{"high", space.event({"3", "4"})}},
                                     4);
  const auto kernel = matrix({{"1", "0"}, {"1", "0"}, {"0", "1"}, {"0", "1"}});
  for (int i = 0; i < 100; ++i) {
    const auto p = from_kernel(testsupport::random_with_zeros(rng, space), alphabet, kernel);
    const auto pr_o = marginal_observations(p);
    for (std::size_t o = 0; o < 2; ++o) {
      if (pr_o[static_cast<Eigen::Index>(o)].is_zero()) continue;
      CHECK(compare(p, o, UpdateRule::NaiveConditioning).agree);
    }
  }
}
