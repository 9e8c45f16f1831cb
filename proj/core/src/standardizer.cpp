#include "palms/standardizer.hpp"

#include <cmath>

#include "palms/error.hpp"

namespace palms {

FeatureVector Standardizer::apply(const FeatureVector& x) const {
  if (x.size() != mean.size()) throw DataError("standardizer: feature count mismatch");
  FeatureVector out(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) out[f] = (x[f] - mean[f]) / scale[f];
  return out;
}

Standardizer fit_standardizer(const Dataset& data) {
  if (data.empty()) throw DataError("cannot fit a standardizer on an empty dataset");
  const std::size_t n = data.n_features();
  const double count = static_cast<double>(data.size());
  Standardizer s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto& p : data) {
    for (std::size_t f = 0; f < n; ++f) s.mean[f] += p.x[f];
  }
  for (double& m : s.mean) m /= count;
  for (const auto& p : data) {
    for (std::size_t f = 0; f < n; ++f) {
      const double d = p.x[f] - s.mean[f];
      s.scale[f] += d * d;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / count);
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& data) {
  if (!data.empty() && data.n_features() != s.mean.size()) {
    throw DataError("standardizer: feature count mismatch");
  }
  std::vector<LabeledPoint> pts;
  pts.reserve(data.size());
  for (const auto& p : data) pts.push_back({p.id, s.apply(p.x), p.y});
  return Dataset(s.mean.size(), std::move(pts));
}

}  // namespace palms
