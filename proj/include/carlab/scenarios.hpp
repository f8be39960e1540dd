#pragma once

#include "carlab/distribution.hpp"
#include "carlab/observation.hpp"
#include "carlab/protocol.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace carlab {

/// A naive-space problem without a protocol: a prior and what may be observed.
struct PriorAndObservations {
  NaiveDistribution prior;
  ObservationAlphabet observations;
};

struct ScenarioSpec {
  std::string name;
  std::map<std::string, Rational> parameters;
  std::variant<Protocol, PriorAndObservations> build;
};

/// Worlds car-1..car-3 (uniform); the contestant picked door 1. q is the
/// host's probability of opening door 3 when the car is behind door 1.
/// Observations: opens-2 = {car-1, car-3}, opens-3 = {car-1, car-2}.
Protocol monty_hall(const Rational& q);

/// Worlds w_a, w_b, w_c (w_x: x is not executed), uniform. q is the jailer's
/// probability of naming b in w_a. Observations: says-b = {w_a, w_c},
/// says-c = {w_a, w_b}.
Protocol three_prisoners(const Rational& q);

/// Uniform prior on Blue-HQ, Blue-2nd, Red-HQ, Red-2nd and the odds row
/// p(Red-HQ) = alpha * p(Red-2nd). Throws InvalidArgument unless alpha > 0.
PriorAndObservations judy_benjamin(const Rational& alpha);

/// Sensor i is picked with probability pr_s[i], independently of the world;
/// it reports the cell of partitions[i] containing the world:
///   joint(w, U) = prior(w) * sum_{i : U in partitions[i], w in U} pr_s[i].
/// Observations are the distinct cells, in order of first appearance.
/// Throws NotAPartition.
Protocol sensor_mar(const std::vector<std::vector<Event>>& partitions, const Vector<Rational>& pr_s,
                    const NaiveDistribution& prior);

/// Built-ins by name: "monty-hall" (q, default 1/2), "three-prisoners" (q),
/// "judy-benjamin" (alpha, default 3), "mar" (s = Pr(no information), default
/// 1/2, over three uniform worlds). Throws InvalidArgument for unknown names
/// or parameters.
ScenarioSpec build_scenario(const std::string& name, const std::map<std::string, Rational>& parameters = {});

std::vector<std::string> scenario_names();

}  // namespace carlab
