#pragma once

#include "carlab/rational.hpp"
#include "carlab/world_set.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace carlab {

/// "The actual world is in `set`."
struct EventObservation {
  std::string name;
  Event set;
};

/// Jeffrey observation: cell `cells[i]` of a partition of W receives
/// probability `weights[i]`; weights sum to one.
struct JeffreyObservation {
  std::string name;
  std::vector<Event> cells;
  std::vector<Rational> weights;
};

/// Homogeneous odds constraint: P(numerator) = ratio * P(denominator).
struct OddsConstraint {
  Event numerator;
  Event denominator;
  Rational ratio;
};

/// Arbitrary linear targets P(sets[i]) = targets[i]; sets may overlap and
/// need not cover W. Odds constraints ride along as homogeneous rows.
struct ConstraintObservation {
  std::string name;
  std::vector<Event> sets;
  std::vector<Rational> targets;
  std::vector<OddsConstraint> odds;

  std::size_t row_count() const { return sets.size() + odds.size(); }
};

using Observation = std::variant<EventObservation, JeffreyObservation, ConstraintObservation>;

enum class ObservationKind { Event, Jeffrey, Constraint };

ObservationKind kind_of(const Observation& o);
const std::string& name_of(const Observation& o);
std::string kind_name(ObservationKind kind);

/// Same mathematical content (names are ignored).
bool same_content(const Observation& a, const Observation& b);

void validate(const EventObservation& o, std::size_t universe_size);
void validate(const JeffreyObservation& o, std::size_t universe_size);
void validate(const ConstraintObservation& o, std::size_t universe_size);

/// True when `cells` are nonempty, pairwise disjoint and cover the universe.
bool is_partition(const std::vector<Event>& cells, std::size_t universe_size);

/// Index of the cell containing `world`. Cells must form a partition.
std::size_t cell_of(const std::vector<Event>& cells, std::size_t world);

/// A Jeffrey observation viewed as a constraint observation (one row per cell).
ConstraintObservation as_constraints(const JeffreyObservation& o);
/// An event observation viewed as the single constraint P(set) = 1.
ConstraintObservation as_constraints(const EventObservation& o);

/// The set O of possible observations. Homogeneous in kind; names and
/// contents are unique; Jeffrey items share one partition.
class ObservationAlphabet {
 public:
  ObservationAlphabet() = default;
  ObservationAlphabet(std::vector<Observation> items, std::size_t universe_size);

  std::size_t size() const { return items_.size(); }
  const Observation& operator[](std::size_t i) const { return items_.at(i); }
  const std::vector<Observation>& items() const { return items_; }
  ObservationKind kind() const { return kind_; }
  std::size_t universe_size() const { return universe_size_; }

  /// Throws ValidationError when no observation has that name.
  std::size_t index_of(const std::string& name) const;

  const EventObservation& event(std::size_t i) const;
  const JeffreyObservation& jeffrey(std::size_t i) const;
  const ConstraintObservation& constraint(std::size_t i) const;

 private:
  std::vector<Observation> items_;
  ObservationKind kind_ = ObservationKind::Event;
  std::size_t universe_size_ = 0;
};

}  // namespace carlab
