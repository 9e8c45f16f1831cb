#include "palms/splits.hpp"

#include <string>

#include "palms/error.hpp"

namespace palms {

Split stratified_sample(const Dataset& data, std::size_t per_class, SeededRng& rng) {
  std::vector<PointId> chosen;
  for (ClassLabel y : {ClassLabel::kZero, ClassLabel::kOne}) {
    std::vector<PointId> members;
    for (const auto& p : data) {
      if (p.y == y) members.push_back(p.id);
    }
    if (members.size() < per_class) {
      throw DataError("class " + std::to_string(to_int(y)) + " has " +
                      std::to_string(members.size()) + " points, " +
                      std::to_string(per_class) + " required");
    }
    for (std::size_t pos : rng.sample_without_replacement(members.size(), per_class)) {
      chosen.push_back(members[pos]);
    }
  }
  return {data.subset(chosen), data.without(chosen)};
}

}  // namespace palms
