#include "palms/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "palms/error.hpp"

namespace palms {

ClassLabel label_from_int(long value) {
  if (value == 0) return ClassLabel::kZero;
  if (value == 1) return ClassLabel::kOne;
  throw DataError("label must be 0 or 1, got " + std::to_string(value));
}

Dataset::Dataset(std::size_t n_features, std::vector<LabeledPoint> points)
    : n_features_(n_features), points_(std::move(points)) {
  std::unordered_set<PointId> seen;
  seen.reserve(points_.size());
  for (const auto& p : points_) {
    if (p.x.size() != n_features_) {
      throw DataError("point " + std::to_string(p.id) + " has " + std::to_string(p.x.size()) +
                      " features, expected " + std::to_string(n_features_));
    }
    for (double v : p.x) {
      if (!std::isfinite(v)) {
        throw DataError("point " + std::to_string(p.id) + " has a non-finite feature");
      }
    }
    if (!seen.insert(p.id).second) {
      throw DataError("duplicate point id " + std::to_string(p.id));
    }
  }
}

std::size_t Dataset::count(ClassLabel y) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(points_.begin(), points_.end(), [y](const auto& p) { return p.y == y; }));
}

bool Dataset::contains(PointId id) const noexcept {
  return std::any_of(points_.begin(), points_.end(), [id](const auto& p) { return p.id == id; });
}

std::size_t Dataset::index_of(PointId id) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].id == id) return i;
  }
  throw DataError("point id " + std::to_string(id) + " not in dataset");
}

namespace {

std::unordered_set<PointId> as_set(std::span<const PointId> ids) {
  return {ids.begin(), ids.end()};
}

}  // namespace

Dataset Dataset::subset(std::span<const PointId> ids) const {
  const auto keep = as_set(ids);
  std::vector<LabeledPoint> out;
  for (const auto& p : points_) {
    if (keep.count(p.id)) out.push_back(p);
  }
  Dataset d;
  d.n_features_ = n_features_;
  d.points_ = std::move(out);
  return d;
}

Dataset Dataset::without(std::span<const PointId> ids) const {
  const auto drop = as_set(ids);
  std::vector<LabeledPoint> out;
  out.reserve(points_.size());
  for (const auto& p : points_) {
    if (!drop.count(p.id)) out.push_back(p);
  }
  Dataset d;
  d.n_features_ = n_features_;
  d.points_ = std::move(out);
  return d;
}

Dataset Dataset::prefix(std::size_t n) const {
  Dataset d;
  d.n_features_ = n_features_;
  d.points_.assign(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(
                                                          std::min(n, points_.size())));
  return d;
}

Dataset Dataset::without_index(std::size_t index) const {
  Dataset d;
  d.n_features_ = n_features_;
  d.points_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i != index) d.points_.push_back(points_[i]);
  }
  return d;
}

Dataset Dataset::concat(const Dataset& other) const {
  if (!empty() && !other.empty() && other.n_features_ != n_features_) {
    throw DataError("cannot concatenate datasets with different feature counts");
  }
  std::vector<LabeledPoint> all = points_;
  all.insert(all.end(), other.points_.begin(), other.points_.end());
  return Dataset(empty() ? other.n_features_ : n_features_, std::move(all));
}

Dataset Dataset::with_point(LabeledPoint p) const {
  if (contains(p.id)) throw DataError("point id " + std::to_string(p.id) + " already present");
  if (p.x.size() != n_features_) throw DataError("feature count mismatch");
  Dataset d = *this;
  d.points_.push_back(std::move(p));
  return d;
}

std::vector<PointId> Dataset::ids() const {
  std::vector<PointId> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.id);
  return out;
}

}  // namespace palms
