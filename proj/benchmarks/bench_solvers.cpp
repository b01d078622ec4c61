#include <benchmark/benchmark.h>

#include "opnorm/cbminnorm.hpp"
#include "opnorm/random.hpp"

namespace {

using namespace opnorm;

std::vector<ComplexMatrix> coefficients(int n, int d) {
  SeededGenerator g = SeededGenerator(42).fork(static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(d));
  std::vector<ComplexMatrix> x;
  for (int j = 0; j < n; ++j) x.push_back(random_ginibre(g, d, d));
  return x;
}

std::vector<AlgebraElement> elements(const std::vector<ComplexMatrix>& x) {
  std::vector<AlgebraElement> out;
  for (const auto& m : x) out.push_back(AlgebraElement::from_matrix(m));
  return out;
}

void BM_LambdaMax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SeededGenerator g(7);
  const ComplexMatrix h = random_hermitian(g, n);
  ConicProgram p;
  const int t = p.add_variable(1.0);
  const int b = p.add_block(n);
  p.set_constant(b, -h);
  for (int a = 0; a < n; ++a) p.add_term(b, t, a, a, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p).primal_value);
}
BENCHMARK(BM_LambdaMax)->Arg(4)->Arg(8)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_DecLinf(benchmark::State& state) {
  const auto x = elements(coefficients(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  for (auto _ : state) benchmark::DoNotOptimize(dec_norm_linf(x).value);
}
BENCHMARK(BM_DecLinf)->ArgsProduct({{2, 3, 4}, {2, 3}})->Args({4, 6})->Unit(benchmark::kMillisecond);

void BM_SeeSaw(benchmark::State& state) {
  const auto x = coefficients(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  SeeSawOptions o;
  o.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(seesaw_min_norm(x, o).lower_bound);
}
BENCHMARK(BM_SeeSaw)->ArgsProduct({{2, 3, 4}, {2, 3}})->Args({4, 6})->Unit(benchmark::kMillisecond);

void BM_CbAgreement(benchmark::State& state) {
  const auto x = coefficients(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(cb_norm_linf(x).agree);
}
BENCHMARK(BM_CbAgreement)->Args({3, 2})->Args({4, 3})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
