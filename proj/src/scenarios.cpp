#include "carlab/scenarios.hpp"

#include "carlab/errors.hpp"

#include <algorithm>

namespace carlab {

namespace {

void require_probability(const Rational& q, const char* what) {
  if (q < Rational(0) || q > Rational(1)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must lie in [0, 1], got " + q.str());
  }
}

Protocol checked(Protocol p) {
  if (!validate_accuracy(p).ok()) throw Error(ErrorCode::Internal, "scenario builder produced an inaccurate protocol");
  return p;
}

// Three uniform worlds, two event observations, kernel
//   w0 -> (o0: first, o1: 1 - first), w1 -> o1, w2 -> o0.
Protocol two_announcements(std::vector<std::string> worlds, std::string o0, Event s0, std::string o1, Event s1,
                           const Rational& first) {
  WorldSet space(std::move(worlds));
  std::vector<Observation> items{EventObservation{std::move(o0), std::move(s0)},
                                 EventObservation{std::move(o1), std::move(s1)}};
  Matrix<Rational> kernel(3, 2);
  kernel << first, Rational(1) - first, Rational(0), Rational(1), Rational(1), Rational(0);
  return checked(from_kernel(uniform<Rational>(space), ObservationAlphabet(std::move(items), 3), kernel));
}

std::string cell_name(const WorldSet& space, const Event& cell) {
  std::string out = "{";
  for (std::size_t w : cell.indices()) {
    if (out.size() > 1) out += ",";
    out += space.label(w);
  }
  return out + "}";
}

}  // namespace

Protocol monty_hall(const Rational& q) {
  require_probability(q, "q");
  return two_announcements({"car-1", "car-2", "car-3"}, "opens-2", Event(3, {0, 2}), "opens-3", Event(3, {0, 1}),
                           Rational(1) - q);
}

Protocol three_prisoners(const Rational& q) {
  require_probability(q, "q");
  return two_announcements({"w_a", "w_b", "w_c"}, "says-b", Event(3, {0, 2}), "says-c", Event(3, {0, 1}), q);
}

PriorAndObservations judy_benjamin(const Rational& alpha) {
  if (!(alpha > Rational(0))) throw Error(ErrorCode::InvalidArgument, "alpha must be positive, got " + alpha.str());
  WorldSet space({"Blue-HQ", "Blue-2nd", "Red-HQ", "Red-2nd"});
  ConstraintObservation odds{"hq-odds", {}, {}, {OddsConstraint{Event(4, {2}), Event(4, {3}), alpha}}};
  return PriorAndObservations{uniform<Rational>(space), ObservationAlphabet({std::move(odds)}, 4)};
}

Protocol sensor_mar(const std::vector<std::vector<Event>>& partitions, const Vector<Rational>& pr_s,
                    const NaiveDistribution& prior) {
  const std::size_t n = prior.size();
  if (partitions.empty() || static_cast<std::size_t>(pr_s.size()) != partitions.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one sensor probability per partition");
  }
  Rational total(0);
  for (Eigen::Index i = 0; i < pr_s.size(); ++i) {
    if (pr_s[i] < Rational(0)) throw Error(ErrorCode::InvalidArgument, "sensor probabilities must be nonnegative");
    total += pr_s[i];
  }
  if (total != Rational(1)) throw Error(ErrorCode::InvalidArgument, "sensor probabilities must sum to 1");
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    if (!is_partition(partitions[i], n)) {
      throw Error(ErrorCode::NotAPartition, "sensor " + std::to_string(i + 1) + " does not partition the worlds");
    }
  }

  std::vector<Event> cells;
  for (const auto& partition : partitions) {
    for (const auto& cell : partition) {
      if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
    }
  }
  Matrix<Rational> joint = Matrix<Rational>::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cells.size()),
                                                      Rational(0));
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    for (const auto& cell : partitions[i]) {
      const auto o = static_cast<Eigen::Index>(std::find(cells.begin(), cells.end(), cell) - cells.begin());
      for (std::size_t w : cell.indices()) {
        joint(static_cast<Eigen::Index>(w), o) += prior[w] * pr_s[static_cast<Eigen::Index>(i)];
      }
    }
  }
  std::vector<Observation> items;
  for (const auto& cell : cells) items.emplace_back(EventObservation{cell_name(prior.space(), cell), cell});
  return checked(Protocol(prior.space(), ObservationAlphabet(std::move(items), n), std::move(joint)));
}

std::vector<std::string> scenario_names() { return {"monty-hall", "three-prisoners", "judy-benjamin", "mar"}; }

ScenarioSpec build_scenario(const std::string& name, const std::map<std::string, Rational>& parameters) {
  const auto allowed = [&](const std::string& key, const Rational& fallback) {
    for (const auto& [k, v] : parameters) {
      if (k != key) throw Error(ErrorCode::InvalidArgument, "scenario \"" + name + "\" has no parameter \"" + k + "\"");
    }
    const auto it = parameters.find(key);
    return std::map<std::string, Rational>{{key, it == parameters.end() ? fallback : it->second}};
  };
  if (name == "monty-hall") {
    auto ps = allowed("q", Rational(1, 2));
    auto p = monty_hall(ps.at("q"));
    return {name, std::move(ps), std::move(p)};
  }
  if (name == "three-prisoners") {
    auto ps = allowed("q", Rational(1, 2));
    auto p = three_prisoners(ps.at("q"));
    return {name, std::move(ps), std::move(p)};
  }
  if (name == "judy-benjamin") {
    auto ps = allowed("alpha", Rational(3));
    auto p = judy_benjamin(ps.at("alpha"));
    return {name, std::move(ps), std::move(p)};
  }
  if (name == "mar") {
    auto ps = allowed("s", Rational(1, 2));
    const Rational s = ps.at("s");
    require_probability(s, "s");
    WorldSet space({"w1", "w2", "w3"});
    Vector<Rational> pr_s(2);
    pr_s << s, Rational(1) - s;
    auto p = sensor_mar({{space.all()}, {Event(3, {0}), Event(3, {1}), Event(3, {2})}}, pr_s, uniform<Rational>(space));
    return {name, std::move(ps), std::move(p)};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scenario \"" + name + "\"");
}

}  // namespace carlab
