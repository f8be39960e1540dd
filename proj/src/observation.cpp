#include "carlab/observation.hpp"

#include "carlab/errors.hpp"

#include <set>

namespace carlab {

ObservationKind kind_of(const Observation& o) {
  return static_cast<ObservationKind>(o.index());
}

const std::string& name_of(const Observation& o) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, o);
}

std::string kind_name(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::Event: return "event";
    case ObservationKind::Jeffrey: return "jeffrey";
    case ObservationKind::Constraint: return "constraint";
  }
  return "unknown";
}

bool same_content(const Observation& a, const Observation& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ea = std::get_if<EventObservation>(&a)) {
    return ea->set == std::get<EventObservation>(b).set;
  }
  if (const auto* ja = std::get_if<JeffreyObservation>(&a)) {
    const auto& jb = std::get<JeffreyObservation>(b);
    return ja->cells == jb.cells && ja->weights == jb.weights;
  }
  const auto& ca = std::get<ConstraintObservation>(a);
  const auto& cb = std::get<ConstraintObservation>(b);
  if (ca.sets != cb.sets || ca.targets != cb.targets || ca.odds.size() != cb.odds.size()) return false;
  for (std::size_t i = 0; i < ca.odds.size(); ++i) {
    if (ca.odds[i].numerator != cb.odds[i].numerator || ca.odds[i].denominator != cb.odds[i].denominator ||
        ca.odds[i].ratio != cb.odds[i].ratio) {
      return false;
    }
  }
  return true;
}

bool is_partition(const std::vector<Event>& cells, std::size_t universe_size) {
  if (cells.empty()) return false;
  Event covered(universe_size);
  for (const auto& c : cells) {
    if (c.universe_size() != universe_size || c.empty() || c.intersects(covered)) return false;
    covered = covered | c;
  }
  return covered.count() == universe_size;
}

std::size_t cell_of(const std::vector<Event>& cells, std::size_t world) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].contains(world)) return i;
  }
  throw Error(ErrorCode::NotAPartition, "world not covered by any cell");
}

void validate(const EventObservation& o, std::size_t universe_size) {
  if (o.set.universe_size() != universe_size) {
    throw Error(ErrorCode::ValidationError, "observation \"" + o.name + "\" is over a different world set");
  }
  if (o.set.empty()) throw Error(ErrorCode::ValidationError, "event observation \"" + o.name + "\" is empty");
}

void validate(const JeffreyObservation& o, std::size_t universe_size) {
  if (o.cells.size() != o.weights.size()) {
    throw Error(ErrorCode::ValidationError, "observation \"" + o.name + "\": cells/weights length mismatch");
  }
  if (!is_partition(o.cells, universe_size)) {
    throw Error(ErrorCode::NotAPartition, "observation \"" + o.name + "\": cells do not partition the worlds");
  }
  Rational total(0);
  for (const auto& a : o.weights) {
    if (a < Rational(0)) throw Error(ErrorCode::InvalidAlphas, "observation \"" + o.name + "\": negative weight");
    total += a;
  }
  if (total != Rational(1)) {
    throw Error(ErrorCode::InvalidAlphas, "observation \"" + o.name + "\": weights sum to " + total.str());
  }
}

void validate(const ConstraintObservation& o, std::size_t universe_size) {
  if (o.sets.size() != o.targets.size()) {
    throw Error(ErrorCode::ValidationError, "observation \"" + o.name + "\": sets/alphas length mismatch");
  }
  for (std::size_t i = 0; i < o.sets.size(); ++i) {
    if (o.sets[i].universe_size() != universe_size || o.sets[i].empty()) {
      throw Error(ErrorCode::ValidationError, "observation \"" + o.name + "\": empty or foreign set");
    }
    if (o.targets[i] < Rational(0) || o.targets[i] > Rational(1)) {
      throw Error(ErrorCode::InvalidAlphas, "observation \"" + o.name + "\": target outside [0,1]");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (o.sets[i] == o.sets[j] && o.targets[i] == o.targets[j]) {
        throw Error(ErrorCode::ValidationError, "observation \"" + o.name + "\": duplicate (set, alpha) pair");
      }
    }
  }
  for (const auto& odd : o.odds) {
    if (odd.numerator.universe_size() != universe_size || odd.denominator.universe_size() != universe_size ||
        odd.numerator.empty() || odd.denominator.empty()) {
      throw Error(ErrorCode::ValidationError, "observation \"" + o.name + "\": malformed odds constraint");
    }
    if (odd.ratio < Rational(0)) {
      throw Error(ErrorCode::InvalidAlphas, "observation \"" + o.name + "\": negative odds ratio");
    }
  }
}

ConstraintObservation as_constraints(const JeffreyObservation& o) {
  return ConstraintObservation{o.name, o.cells, o.weights, {}};
}

ConstraintObservation as_constraints(const EventObservation& o) {
  return ConstraintObservation{o.name, {o.set}, {Rational(1)}, {}};
}

ObservationAlphabet::ObservationAlphabet(std::vector<Observation> items, std::size_t universe_size)
    : items_(std::move(items)), universe_size_(universe_size) {
  if (items_.empty()) throw Error(ErrorCode::ValidationError, "observation alphabet is empty");
  kind_ = kind_of(items_.front());
  std::set<std::string> names;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    if (kind_of(item) != kind_) {
      throw Error(ErrorCode::ValidationError, "observation alphabet mixes observation kinds");
    }
    const auto& name = name_of(item);
    if (name.empty()) throw Error(ErrorCode::ValidationError, "observation without a name");
    if (!names.insert(name).second) {
      throw Error(ErrorCode::ValidationError, "duplicate observation name \"" + name + "\"");
    }
    std::visit([&](const auto& x) { validate(x, universe_size); }, item);
    for (std::size_t j = 0; j < i; ++j) {
      if (same_content(items_[j], item)) {
        throw Error(ErrorCode::ValidationError, "observations \"" + name_of(items_[j]) + "\" and \"" + name +
                                                    "\" have identical content");
      }
    }
  }
  if (kind_ == ObservationKind::Jeffrey) {
    const auto& cells = std::get<JeffreyObservation>(items_.front()).cells;
    for (const auto& item : items_) {
      if (std::get<JeffreyObservation>(item).cells != cells) {
        throw Error(ErrorCode::ValidationError, "Jeffrey observations must share one partition");
      }
    }
  }
}

std::size_t ObservationAlphabet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (name_of(items_[i]) == name) return i;
  }
  throw Error(ErrorCode::ValidationError, "unknown observation \"" + name + "\"");
}

const EventObservation& ObservationAlphabet::event(std::size_t i) const {
  if (const auto* o = std::get_if<EventObservation>(&items_.at(i))) return *o;
  throw Error(ErrorCode::RuleKindMismatch, "observation \"" + name_of(items_.at(i)) + "\" is not an event");
}

const JeffreyObservation& ObservationAlphabet::jeffrey(std::size_t i) const {
  if (const auto* o = std::get_if<JeffreyObservation>(&items_.at(i))) return *o;
  throw Error(ErrorCode::RuleKindMismatch,
              "observation \"" + name_of(items_.at(i)) + "\" is not a Jeffrey observation");
}

const ConstraintObservation& ObservationAlphabet::constraint(std::size_t i) const {
  if (const auto* o = std::get_if<ConstraintObservation>(&items_.at(i))) return *o;
  throw Error(ErrorCode::RuleKindMismatch,
              "observation \"" + name_of(items_.at(i)) + "\" is not a constraint observation");
}

}  // namespace carlab
