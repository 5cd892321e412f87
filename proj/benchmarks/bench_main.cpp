#include "knnclust/graph.hpp"
#include "knnclust/identify.hpp"
#include "knnclust/kde.hpp"
#include "knnclust/model.hpp"

#include <benchmark/benchmark.h>

using namespace knnclust;

namespace {

DensityModel uniform_cube(int d)
{
  return make_ball_mixture(d, { { std::vector<double>(d, 0.0), 1.0, 1.0 } });
}

void knn_backend(benchmark::State& state, KnnBackend backend)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const auto cloud = sample(uniform_cube(d), n, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(knn_sets(cloud, 20, backend));
  state.SetComplexityN(state.range(0));
}

void BM_KnnBrute(benchmark::State& s) { knn_backend(s, KnnBackend::BruteForce); }
void BM_KnnKdTree(benchmark::State& s) { knn_backend(s, KnnBackend::KdTree); }

BENCHMARK(BM_KnnBrute)->ArgsProduct({ { 500, 2000, 8000 }, { 2, 5 } })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnKdTree)->ArgsProduct({ { 500, 2000, 8000 }, { 2, 5 } })->Unit(benchmark::kMillisecond);

void BM_GraphFromLists(benchmark::State& state)
{
  const auto cloud = sample(uniform_cube(2), 4000, 11);
  const auto lists = knn_sets(cloud, static_cast<std::size_t>(state.range(0)));
  const auto flavor = state.range(1) == 0 ? Flavor::Mutual : Flavor::Symmetric;
  for (auto _ : state) {
    auto g = build_knn_graph(lists, flavor);
    benchmark::DoNotOptimize(connected_components(g));
  }
}
BENCHMARK(BM_GraphFromLists)->ArgsProduct({ { 10, 100, 1000 }, { 0, 1 } })->Unit(benchmark::kMillisecond);

void BM_Kde(benchmark::State& state)
{
  const auto cloud = sample(uniform_cube(2), static_cast<std::size_t>(state.range(0)), 13);
  for (auto _ : state)
    benchmark::DoNotOptimize(kde_at_samples(cloud, 0.1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Kde)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_NoisyPipeline(benchmark::State& state)
{
  const auto model = make_ball_mixture(2,
                                       { { { 0.0, 0.0 }, 0.3, 0.45 }, { { 3.0, 0.0 }, 0.3, 0.45 } },
                                       Background{ Box{ { -1.5, -1.5 }, { 4.5, 1.5 } }, 0.1 });
  const auto cloud = sample(model, static_cast<std::size_t>(state.range(0)), 17);
  const std::size_t k = cloud.size() / 10;
  for (auto _ : state)
    benchmark::DoNotOptimize(identify_noisy(cloud, k, Flavor::Mutual, 0.5, 0.1, 0.2, 0.02));
}
BENCHMARK(BM_NoisyPipeline)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
