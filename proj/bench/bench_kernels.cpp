// Serial reference vs OpenMP kernels, and direct vs FFT convolution for the
// truncated AR(inf) filter.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "arfima/core_model.hpp"
#include "arfima/kernels.hpp"
#include "arfima/likelihood.hpp"

namespace {

using namespace arfima;

std::vector<double> noise(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> N;
  std::vector<double> v(n);
  for (auto& x : v) x = N(eng);
  return v;
}

// P = n, as in the default fit.
template <bool Omp>
void BM_ConvolveDirect(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto z = noise(2 * n);
  const auto pi = fi_pi_coeffs(0.3, static_cast<long>(n)).coeffs;
  std::vector<double> c(n);
  for (auto _ : st) {
    if constexpr (Omp) kernels::omp::convolve_direct(z, pi, c);
    else kernels::serial::convolve_direct(z, pi, c);
    benchmark::DoNotOptimize(c.data());
  }
  st.SetComplexityN(st.range(0));
}

void BM_ConvolveFft(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const AugmentedSeries a{noise(n, 1), noise(n, 2)};
  const auto pi = fi_pi_coeffs(0.3, static_cast<long>(n));
  for (auto _ : st) {
    auto c = compute_c(a, pi);
    benchmark::DoNotOptimize(c.data());
  }
  st.SetComplexityN(st.range(0));
}

template <bool Omp>
void BM_SumLogDensityT(benchmark::State& st) {
  const auto c = noise(static_cast<std::size_t>(st.range(0)));
  InnovationSpec t;
  t.family = InnovationFamily::student_t;
  t.shape = {5.0};
  for (auto _ : st) {
    double v = Omp ? kernels::omp::sum_log_density(c, 0.1, 1.2, t)
                   : kernels::serial::sum_log_density(c, 0.1, 1.2, t);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Omp>
void BM_DfaFluctuation(benchmark::State& st) {
  auto prof = noise(static_cast<std::size_t>(st.range(0)));
  for (std::size_t i = 1; i < prof.size(); ++i) prof[i] += prof[i - 1];
  for (auto _ : st) {
    double v = Omp ? kernels::omp::dfa_fluctuation_sq(prof, 64, 2)
                   : kernels::serial::dfa_fluctuation_sq(prof, 64, 2);
    benchmark::DoNotOptimize(v);
  }
}

void BM_ApproxLoglik(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  LikelihoodContext ctx(AugmentedSeries::with_mean_presample(noise(n), n));
  MemoryParams m;
  m.d = 0.3;
  m.phi = {0.5};
  InnovationSpec in;
  for (auto _ : st) {
    const auto f = ctx.filter(m);
    benchmark::DoNotOptimize(ctx.loglik(f, 0.0, in));
  }
}

void BM_ExactLoglik(benchmark::State& st) {
  const auto x = noise(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(exact_loglik(x, 0.0, 1.0, 0.3).loglik);
}

}  // namespace

BENCHMARK(BM_ConvolveDirect<false>)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_ConvolveDirect<true>)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_ConvolveFft)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_SumLogDensityT<false>)->Arg(1 << 16);
BENCHMARK(BM_SumLogDensityT<true>)->Arg(1 << 16);
BENCHMARK(BM_DfaFluctuation<false>)->Arg(1 << 14);
BENCHMARK(BM_DfaFluctuation<true>)->Arg(1 << 14);
BENCHMARK(BM_ApproxLoglik)->Arg(1024)->Arg(4096);
BENCHMARK(BM_ExactLoglik)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
