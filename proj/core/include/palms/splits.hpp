#pragma once

#include <cstddef>

#include "palms/dataset.hpp"
#include "palms/rng.hpp"

namespace palms {

struct Split {
  Dataset selected;
  Dataset rest;
};

/// Draws `per_class` points of each class uniformly without replacement.
/// Both outputs keep the source order. Throws DataError naming the class when a
/// class has fewer than `per_class` points.
Split stratified_sample(const Dataset& data, std::size_t per_class, SeededRng& rng);

/// Balanced held-out test set; `selected` is the test set.
inline Split stratified_test_split(const Dataset& data, std::size_t per_class, SeededRng& rng) {
  return stratified_sample(data, per_class, rng);
}

/// Stratified initial labeled sample; `selected` is the init set, `rest` the pool.
inline Split stratified_initial_sample(const Dataset& data, std::size_t per_class,
                                       SeededRng& rng) {
  return stratified_sample(data, per_class, rng);
}

}  // namespace palms
