#include "palms/limited_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palms/error.hpp"
#include "palms/svm.hpp"

namespace palms {

void LimitedSetParams::validate() const {
  if (k < 1) throw UsageError("k must be at least 1");
  if (!(rho > 0.0) || rho > 0.5) throw UsageError("rho must lie in (0, 0.5]");
}

bool is_limited(const LabeledPoint& point, const Dataset& reference,
                const LimitedSetParams& params) {
  params.validate();
  std::vector<std::pair<double, std::size_t>> cand;  // (distance, position)
  cand.reserve(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i].id == point.id) continue;
    cand.emplace_back(squared_distance(point.x, reference[i].x), i);
  }
  if (cand.size() < params.k) {
    throw DataError("reference set has " + std::to_string(cand.size()) +
                    " candidate neighbors, k=" + std::to_string(params.k) + " required");
  }
  const auto closer = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return reference[a.second].id < reference[b.second].id;
  };
  std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(params.k - 1),
                   cand.end(), closer);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < params.k; ++i) {
    if (reference[cand[i].second].y == ClassLabel::kOne) ++ones;
  }
  const std::size_t minority = std::min(ones, params.k - ones);
  return static_cast<double>(minority) > params.rho * static_cast<double>(params.k);
}

LimitedSetReport limited_set(const Dataset& test, const Dataset& reference,
                             const LimitedSetParams& params) {
  params.validate();
  if (test.empty()) throw DataError("limited set of an empty test set");
  LimitedSetReport report;
  report.params = params;
  for (const auto& p : test) {
    if (is_limited(p, reference, params)) report.member_ids.push_back(p.id);
  }
  report.fraction =
      static_cast<double>(report.member_ids.size()) / static_cast<double>(test.size());
  return report;
}

double limited_fraction(const Dataset& test, const Dataset& reference,
                        const LimitedSetParams& params) {
  return limited_set(test, reference, params).fraction;
}

}  // namespace palms
