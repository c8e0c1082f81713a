// OpenMP shell quadrature against the serial reference on the same fields.
// NA_HEAT_THREADS caps the thread count of the parallel runs.

#include "naheat/heat_kernel.hpp"
#include "naheat/integrate.hpp"

#include <benchmark/benchmark.h>

using namespace naheat;

namespace {

KernelField field(int Q) {
  return heat_field({1}, 4.0, GroupDescriptor::abelian(Q));
}

IntegrateOptions abs_opt(bool parallel) {
  IntegrateOptions o;
  o.reduce = Reduce::absolute;
  o.parallel = parallel;
  return o;
}

void BM_shell_parallel(benchmark::State& state) {
  const KernelField f = field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_shell(f, abs_opt(true)).value);
  state.counters["threads"] = worker_threads();
}

void BM_shell_serial(benchmark::State& state) {
  const KernelField f = field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_shell_serial(f, abs_opt(false)).value);
}

}  // namespace

BENCHMARK(BM_shell_parallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_shell_serial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
