#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "palms/active_learning.hpp"
#include "palms/limited_set.hpp"
#include "palms/model_selection.hpp"
#include "palms/svm.hpp"

namespace {

using namespace palms;

Dataset clusters(std::size_t n, std::size_t n_features, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<LabeledPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const bool one = i % 2 == 1;
    FeatureVector x(n_features);
    for (auto& v : x) v = noise(gen);
    x[0] += one ? 0.75 : -0.75;
    pts.push_back({i, std::move(x), one ? ClassLabel::kOne : ClassLabel::kZero});
  }
  return Dataset(n_features, std::move(pts));
}

void BM_TrainSvc(benchmark::State& state) {
  const auto d = clusters(static_cast<std::size_t>(state.range(0)), 8);
  const ModelParams p{1.0, 1.0 / 8};
  for (auto _ : state) benchmark::DoNotOptimize(train_svc(d, p));
}
BENCHMARK(BM_TrainSvc)->Arg(16)->Arg(59)->Arg(200);

void BM_TrainSvcHardModel(benchmark::State& state) {
  const auto d = clusters(static_cast<std::size_t>(state.range(0)), 8);
  const ModelParams p{1e4, 1e-4 / 8};
  for (auto _ : state) benchmark::DoNotOptimize(train_svc(d, p));
}
BENCHMARK(BM_TrainSvcHardModel)->Arg(16)->Arg(59);

void BM_GridLoocv(benchmark::State& state) {
  const auto d = clusters(static_cast<std::size_t>(state.range(0)), 8);
  const auto grid = ModelGrid::standard(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_model(d, grid, SelectionMethod::kPalmsFwc, 1.5));
  }
}
BENCHMARK(BM_GridLoocv)->Arg(14)->Arg(34)->Arg(59)->Unit(benchmark::kMillisecond);

void BM_AcquireNext(benchmark::State& state) {
  const auto train = clusters(59, 8, 2);
  const auto pool = clusters(static_cast<std::size_t>(state.range(0)), 8, 3);
  const auto model = train_svc(train, {1.0, 1.0 / 8});
  for (auto _ : state) benchmark::DoNotOptimize(acquire_next(model, pool));
}
BENCHMARK(BM_AcquireNext)->Arg(700)->Arg(5000);

void BM_LimitedFraction(benchmark::State& state) {
  const auto test = clusters(100, 8, 4);
  const auto reference = clusters(static_cast<std::size_t>(state.range(0)), 8, 5);
  for (auto _ : state) benchmark::DoNotOptimize(limited_fraction(test, reference, {}));
}
BENCHMARK(BM_LimitedFraction)->Arg(100)->Arg(3000);

}  // namespace
BENCHMARK_MAIN();
