#include "carlab/world_set.hpp"

#include "carlab/errors.hpp"

#include <algorithm>

namespace carlab {

namespace {

void require_same_universe(const Event& a, const Event& b) {
  if (a.universe_size() != b.universe_size()) {
    throw Error(ErrorCode::InvalidArgument, "events over different world sets");
  }
}

}  // namespace

Event::Event(std::size_t universe_size, std::initializer_list<std::size_t> members)
    : mask_(universe_size, false) {
  for (std::size_t i : members) insert(i);
}

Event Event::from_indices(std::size_t universe_size, const std::vector<std::size_t>& members) {
  Event e(universe_size);
  for (std::size_t i : members) e.insert(i);
  return e;
}

void Event::insert(std::size_t i) {
  if (i >= mask_.size()) throw Error(ErrorCode::InvalidArgument, "world index out of range");
  mask_[i] = true;
}

void Event::erase(std::size_t i) {
  if (i >= mask_.size()) throw Error(ErrorCode::InvalidArgument, "world index out of range");
  mask_[i] = false;
}

std::size_t Event::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<std::size_t> Event::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) out.push_back(i);
  }
  return out;
}

bool Event::is_subset_of(const Event& other) const {
  require_same_universe(*this, other);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i] && !other.mask_[i]) return false;
  }
  return true;
}

bool Event::intersects(const Event& other) const {
  require_same_universe(*this, other);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i] && other.mask_[i]) return true;
  }
  return false;
}

Event operator&(const Event& a, const Event& b) {
  require_same_universe(a, b);
  Event out(a.universe_size());
  for (std::size_t i = 0; i < a.mask_.size(); ++i) out.mask_[i] = a.mask_[i] && b.mask_[i];
  return out;
}

Event operator|(const Event& a, const Event& b) {
  require_same_universe(a, b);
  Event out(a.universe_size());
  for (std::size_t i = 0; i < a.mask_.size(); ++i) out.mask_[i] = a.mask_[i] || b.mask_[i];
  return out;
}

Event operator-(const Event& a, const Event& b) {
  require_same_universe(a, b);
  Event out(a.universe_size());
  for (std::size_t i = 0; i < a.mask_.size(); ++i) out.mask_[i] = a.mask_[i] && !b.mask_[i];
  return out;
}

Event Event::complement() const {
  Event out(mask_.size());
  for (std::size_t i = 0; i < mask_.size(); ++i) out.mask_[i] = !mask_[i];
  return out;
}

WorldSet::WorldSet(std::vector<std::string> labels) {
  if (labels.empty()) throw Error(ErrorCode::ValidationError, "world set must be nonempty");
  auto impl = std::make_shared<Impl>();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) throw Error(ErrorCode::ValidationError, "empty world label");
    if (!impl->index.emplace(labels[i], i).second) {
      throw Error(ErrorCode::ValidationError, "duplicate world label \"" + labels[i] + "\"");
    }
  }
  impl->labels = std::move(labels);
  impl_ = std::move(impl);
}

std::size_t WorldSet::index_of(const std::string& label) const {
  if (impl_) {
    if (auto it = impl_->index.find(label); it != impl_->index.end()) return it->second;
  }
  throw Error(ErrorCode::ValidationError, "unknown world \"" + label + "\"");
}

Event WorldSet::event(const std::vector<std::string>& labels) const {
  Event e(size());
  for (const auto& l : labels) e.insert(index_of(l));
  return e;
}

}  // namespace carlab
