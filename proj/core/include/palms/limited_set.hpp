#pragma once

#include <cstddef>
#include <vector>

#include "palms/dataset.hpp"

namespace palms {

struct LimitedSetParams {
  std::size_t k = 20;
  double rho = 0.3;

  void validate() const;
};

struct LimitedSetReport {
  std::vector<PointId> member_ids;
  double fraction = 0.0;
  LimitedSetParams params;
};

/// True when the minority count among the k nearest reference points (Euclidean,
/// the query's own id excluded, distance ties to the smaller id) exceeds rho * k.
bool is_limited(const LabeledPoint& point, const Dataset& reference,
                const LimitedSetParams& params);

LimitedSetReport limited_set(const Dataset& test, const Dataset& reference,
                             const LimitedSetParams& params);

double limited_fraction(const Dataset& test, const Dataset& reference,
                        const LimitedSetParams& params);

}  // namespace palms
