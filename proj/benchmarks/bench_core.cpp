// Microbenchmarks for the training hot path: batched jet evaluation, the
// loss/gradient evaluator, whole L-BFGS iterations, and collocation sampling.

#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "wpinn/loss.hpp"
#include "wpinn/model_problems.hpp"
#include "wpinn/optimize.hpp"
#include "wpinn/rng.hpp"
#include "wpinn/sampling.hpp"

namespace {

using namespace wpinn;

constexpr double kPi = std::numbers::pi;

NetworkArchitecture paper_arch(int dim) {
  NetworkArchitecture arch;
  arch.input_dim = dim;
  arch.hidden = {20, 20, 20, 20};
  return arch;
}

void bench_jet_batch(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const NetworkArchitecture arch = paper_arch(2);
  const TanhNetwork net(arch);
  const Eigen::VectorXd params = glorot_init(arch, 1);
  std::mt19937_64 rng(mix_seed(7));
  const Eigen::MatrixXd points = sample_interior(2, n, rng);
  JetTape tape;
  for (auto _ : state) {
    const JetBatch& batch = net.eval_batch(params, points, 2, tape);
    benchmark::DoNotOptimize(batch.value.sum());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_jet_batch)->Arg(64)->Arg(512)->Arg(4096);

void bench_loss_gradient(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const LinearPDEProblem problem = laplace_eigen(2, {2.0 * kPi});
  const NetworkArchitecture arch = paper_arch(2);
  LossEvaluator eval(problem, arch,
                     LossStrategy::optimal_weight(optimal_lambda(*problem.closed_form_bounds)));
  std::mt19937_64 rng(mix_seed(11));
  eval.set_points(sample_interior(2, n, rng), sample_boundary(2, n / 4 + 1, rng));
  const Eigen::VectorXd params = glorot_init(arch, 3);
  Eigen::VectorXd grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.evaluate(params, grad).total);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_loss_gradient)->Arg(64)->Arg(512)->Arg(4096);

void bench_lbfgs_iterations(benchmark::State& state) {
  const LinearPDEProblem problem = laplace_eigen(2, {2.0 * kPi});
  const NetworkArchitecture arch = paper_arch(2);
  LossEvaluator eval(problem, arch,
                     LossStrategy::optimal_weight(optimal_lambda(*problem.closed_form_bounds)));
  std::mt19937_64 rng(mix_seed(13));
  eval.set_points(sample_interior(2, 256, rng), sample_boundary(2, 64, rng));
  const Objective objective = eval.as_log_objective();
  const Eigen::VectorXd params = glorot_init(arch, 5);
  LBFGSConfig config;
  config.max_iterations = 10;
  config.grad_tolerance = 0.0;
  for (auto _ : state) {
    const OptimizeResult result = lbfgs_minimize(objective, params, config);
    benchmark::DoNotOptimize(result.objective);
  }
  state.SetItemsProcessed(state.iterations() * 10);  // items = optimizer steps
}
BENCHMARK(bench_lbfgs_iterations);

void bench_sampling(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(mix_seed(17));
  for (auto _ : state) {
    const Eigen::MatrixXd interior = sample_interior(2, n, rng);
    const Eigen::MatrixXd boundary = sample_boundary(2, n / 4 + 1, rng);
    benchmark::DoNotOptimize(interior.sum() + boundary.sum());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_sampling)->Arg(1024)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
