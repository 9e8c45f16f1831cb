#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace palms {

using FeatureVector = std::vector<double>;
using PointId = std::size_t;

/// Binary class label. The solver maps kZero to -1 and kOne to +1.
enum class ClassLabel : std::uint8_t { kZero = 0, kOne = 1 };

inline int to_sign(ClassLabel y) noexcept { return y == ClassLabel::kOne ? 1 : -1; }
inline int to_int(ClassLabel y) noexcept { return static_cast<int>(y); }
/// Throws DataError unless value is 0 or 1.
ClassLabel label_from_int(long value);

struct LabeledPoint {
  PointId id = 0;
  FeatureVector x;
  ClassLabel y = ClassLabel::kZero;

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// An ordered collection of labeled points sharing one feature dimension.
///
/// Construction validates that every point has `n_features` finite entries and
/// that ids are unique. Instances are immutable afterwards.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t n_features, std::vector<LabeledPoint> points);

  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const LabeledPoint> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  std::size_t count(ClassLabel y) const noexcept;
  bool contains(PointId id) const noexcept;
  /// Position of `id` within this dataset; throws DataError when absent.
  std::size_t index_of(PointId id) const;

  /// Points whose ids are in `ids`, in this dataset's order.
  Dataset subset(std::span<const PointId> ids) const;
  /// Points whose ids are not in `ids`, in this dataset's order.
  Dataset without(std::span<const PointId> ids) const;
  /// First `n` points.
  Dataset prefix(std::size_t n) const;
  /// All points except the one at position `index`.
  Dataset without_index(std::size_t index) const;
  /// Concatenation; ids must stay unique.
  Dataset concat(const Dataset& other) const;
  Dataset with_point(LabeledPoint p) const;

  std::vector<PointId> ids() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_features_ = 0;
  std::vector<LabeledPoint> points_;
};

}  // namespace palms
