#include <benchmark/benchmark.h>

#include "hdlss/estimators.hpp"
#include "hdlss/synth.hpp"

namespace {

using namespace hdlss;

Eigen::MatrixXd draw(int n, int p) {
  const Eigen::MatrixXd sigma = build_cov(CovSpec{CovKind::equicorrelation, 1.0, 0.5, p});
  return sample_mvn(Eigen::VectorXd::Zero(p), sigma, static_cast<std::size_t>(n), 17);
}

void BM_McdFast(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const Eigen::MatrixXd X = draw(n, p);
  const int h = default_h(n, p).h;
  McdOptions opts;
  opts.n_starts = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd_fast(X, h, opts));
  }
}
BENCHMARK(BM_McdFast)->Args({50, 2})->Args({100, 5})->Args({200, 10})->Unit(benchmark::kMillisecond);

void BM_McdExact(benchmark::State& state) {
  const Eigen::MatrixXd X = draw(static_cast<int>(state.range(0)), 2);
  const int h = default_h(static_cast<int>(state.range(0)), 2).h;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd_exact(X, h));
  }
}
BENCHMARK(BM_McdExact)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_Univariate(benchmark::State& state) {
  const Eigen::MatrixXd X = draw(static_cast<int>(state.range(0)), 1);
  const auto kind = static_cast<UnivariateKind>(state.range(1));
  const std::span<const double> x(X.data(), static_cast<std::size_t>(X.size()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(univariate(x, kind));
  }
}
BENCHMARK(BM_Univariate)->ArgsProduct({{60, 600}, {0, 1, 2, 3}});

void BM_SampleMvn(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Eigen::MatrixXd sigma = build_cov(CovSpec{CovKind::ar1, 1.0, 0.75, p});
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_mvn(Eigen::VectorXd::Zero(p), sigma, 90, 3));
  }
}
BENCHMARK(BM_SampleMvn)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

} // namespace
