#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace carlab {

/// A subset of a finite world set, stored as a membership mask.
class Event {
 public:
  Event() = default;
  explicit Event(std::size_t universe_size) : mask_(universe_size, false) {}
  Event(std::size_t universe_size, std::initializer_list<std::size_t> members);
  static Event from_indices(std::size_t universe_size, const std::vector<std::size_t>& members);
  static Event full(std::size_t universe_size) {
    Event e(universe_size);
    e.mask_.assign(universe_size, true);
    return e;
  }

  std::size_t universe_size() const { return mask_.size(); }
  bool contains(std::size_t i) const { return i < mask_.size() && mask_[i]; }
  void insert(std::size_t i);
  void erase(std::size_t i);
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::size_t> indices() const;

  bool is_subset_of(const Event& other) const;
  bool intersects(const Event& other) const;

  friend Event operator&(const Event& a, const Event& b);
  friend Event operator|(const Event& a, const Event& b);
  /// Set difference a - b.
  friend Event operator-(const Event& a, const Event& b);
  Event complement() const;

  friend bool operator==(const Event&, const Event&) = default;
  friend auto operator<=>(const Event&, const Event&) = default;

 private:
  std::vector<bool> mask_;
};

/// The ordered set of world labels. Cheap to copy; label order fixes the
/// index <-> label mapping for every vector indexed by worlds.
class WorldSet {
 public:
  WorldSet() = default;
  explicit WorldSet(std::vector<std::string> labels);
  WorldSet(std::initializer_list<std::string> labels)
      : WorldSet(std::vector<std::string>(labels)) {}

  std::size_t size() const { return impl_ ? impl_->labels.size() : 0; }
  const std::string& label(std::size_t i) const { return impl_->labels.at(i); }
  const std::vector<std::string>& labels() const { return impl_->labels; }
  /// Throws ValidationError for unknown labels.
  std::size_t index_of(const std::string& label) const;
  bool has(const std::string& label) const { return impl_ && impl_->index.count(label) > 0; }

  Event event(const std::vector<std::string>& labels) const;
  Event all() const { return Event::full(size()); }
  Event none() const { return Event(size()); }

  friend bool operator==(const WorldSet& a, const WorldSet& b) {
    return a.impl_ == b.impl_ || (a.impl_ && b.impl_ && a.impl_->labels == b.impl_->labels);
  }

 private:
  struct Impl {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
  };
  std::shared_ptr<const Impl> impl_;
};

}  // namespace carlab
