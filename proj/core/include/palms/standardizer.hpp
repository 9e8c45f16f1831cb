#pragma once

#include <vector>

#include "palms/dataset.hpp"

namespace palms {

/// Per-feature z-score transform. Zero-variance features get scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  FeatureVector apply(const FeatureVector& x) const;
};

Standardizer fit_standardizer(const Dataset& data);
Dataset apply_standardizer(const Standardizer& s, const Dataset& data);

}  // namespace palms
