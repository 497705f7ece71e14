// Serial reference kernels against their OpenMP counterparts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "diraclab/fock_kernels.hpp"

namespace {

using namespace diraclab;

std::vector<cplx> random_coefficients(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (cplx& c : out) c = {normal(rng), normal(rng)};
  return out;
}

CMatrix random_matrix(int n, unsigned seed) {
  const std::vector<cplx> c = random_coefficients(n * n, seed);
  return Eigen::Map<const CMatrix>(c.data(), n, n);
}

template <auto Kernel>
void apply_field(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const std::vector<cplx> create = random_coefficients(modes, 1);
  const std::vector<cplx> annihilate = random_coefficients(modes, 2);
  const std::vector<cplx> in = random_coefficients(1 << modes, 3);
  std::vector<cplx> out(in.size());
  for (auto _ : state) {
    Kernel(modes, create, annihilate, in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.size()));
}

template <auto Kernel>
void field_matrix(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const std::vector<cplx> create = random_coefficients(modes, 1);
  const std::vector<cplx> annihilate = random_coefficients(modes, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(modes, create, annihilate));
}

template <auto Kernel>
void second_quantize(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const CMatrix one_body = random_matrix(modes, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(modes, one_body));
}

template <auto Kernel>
void principal_minor_sum(benchmark::State& state) {
  const CMatrix x = random_matrix(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x));
}

}  // namespace

BENCHMARK(apply_field<kernels::serial::apply_field>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(apply_field<kernels::omp::apply_field>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(field_matrix<kernels::serial::field_matrix>)->Arg(10)->Arg(14);
BENCHMARK(field_matrix<kernels::omp::field_matrix>)->Arg(10)->Arg(14);
BENCHMARK(second_quantize<kernels::serial::second_quantize>)->Arg(8)->Arg(12);
BENCHMARK(second_quantize<kernels::omp::second_quantize>)->Arg(8)->Arg(12);
BENCHMARK(principal_minor_sum<kernels::serial::principal_minor_sum>)->Arg(8)->Arg(12);
BENCHMARK(principal_minor_sum<kernels::omp::principal_minor_sum>)->Arg(8)->Arg(12);

BENCHMARK_MAIN();
