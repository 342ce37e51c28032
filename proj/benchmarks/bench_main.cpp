#include <benchmark/benchmark.h>

#include <random>

#include "fcmarket/dataset.hpp"
#include "fcmarket/knapsack.hpp"
#include "fcmarket/model.hpp"
#include "fcmarket/session.hpp"
#include "fcmarket/solver.hpp"

using namespace fcmarket;

namespace {

KnapsackInstance random_instance(int items, std::int64_t capacity) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> w(1, 50);
  std::uniform_real_distribution<double> v(0.0, 10.0);
  KnapsackInstance k;
  k.capacity = capacity;
  for (int i = 0; i < items; ++i) {
    k.weights.push_back(w(rng));
    k.values.push_back(v(rng));
  }
  return k;
}

std::vector<GroupInfo> groups(int n, int m) {
  std::vector<GroupInfo> g;
  for (int i = 0; i < n; ++i) {
    GroupInfo x;
    x.group_id = i;
    x.owner_agent = i + 1;
    x.price = 1.0 + i % 5;
    x.begin = i * m;
    x.end = (i + 1) * m;
    g.push_back(x);
  }
  return g;
}

}  // namespace

static void BM_Knapsack(benchmark::State& state) {
  const auto k = random_instance(static_cast<int>(state.range(0)), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(knapsack(k));
  state.SetComplexityN(state.range(0) * state.range(1));
}
BENCHMARK(BM_Knapsack)->Args({20, 200})->Args({100, 5000})->Args({500, 50000})->Complexity(benchmark::oN);

static void BM_ProxKnapsack(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), m = 8;
  const auto g = groups(n, m);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd a(n * m);
  for (auto& v : a) v = nd(rng);
  const double budget = 0.25 * n * 3.0;
  for (auto _ : state) benchmark::DoNotOptimize(prox_knapsack(a, 0.1, g, budget, 100));
}
BENCHMARK(BM_ProxKnapsack)->Arg(10)->Arg(100)->Arg(500);

static void BM_FitBudgetConstrained(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_features = static_cast<int>(state.range(0));
  for (int id = 1; id <= 10; ++id) spec.buyer_feature_ids.push_back(id);
  for (int id = 4; id <= spec.n_features; id += 4) spec.active_ids.push_back(id);
  spec.seed = 1;
  const auto data = synthesize(spec, static_cast<std::size_t>(2 * spec.n_features));
  SessionConfig sc;
  sc.horizon = 0;
  const auto task = build_task(data.frame, 0, sc);
  ModelSpec ms;
  ms.spline = {3, 5, KnotRule::quantile};
  const auto d = PreparedDesign::fit(task.X, task.y, task.features, ms);
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.budget = 0.25 * spec.n_features;
  const BudgetLassoProblem problem(d.train(), task.y, cfg.loss);
  for (auto _ : state) benchmark::DoNotOptimize(problem.fit(cfg));
}
BENCHMARK(BM_FitBudgetConstrained)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
