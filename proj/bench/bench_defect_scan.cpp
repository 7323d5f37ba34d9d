// Space-form defect scan: OpenMP over the a-grid against the serial reference.

#include <benchmark/benchmark.h>

#include <random>

#include "cgbundle/report.hpp"
#include "cgbundle/sphere_bundle.hpp"

namespace {

struct Fixture {
  cgb::Chart chart;
  cgb::SpherePoint sp;
  std::vector<double> as, ks;

  explicit Fixture(int n)
      : chart(cgb::constant_curvature_chart(-1.0, n)), sp(make_point(chart, n)), ks(cgb::k_grid()) {
    for (double k : ks)
      if (k > 0.0) as.push_back(1.0 / k);
  }

  static cgb::SpherePoint make_point(const cgb::Chart& chart, int n) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> x(n, 0.2), t(n * n);
    for (auto& v : t) v = nd(rng);
    return cgb::SpherePoint::make(chart, x, t, 1.0);
  }
};

void BM_DefectScanSerial(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cgb::defect_scan_serial(f.chart, f.sp, f.as, f.ks));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.as.size()));
}

void BM_DefectScanParallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cgb::defect_scan(f.chart, f.sp, f.as, f.ks));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.as.size()));
}

void BM_VerifySuite(benchmark::State& state) {
  auto cfg = cgb::parse_config("{base: constant_curvature, k: -1, n: 2, samples: 8, suites: [sphere, theorem7]}");
  for (auto _ : state) benchmark::DoNotOptimize(cgb::run_suite(cfg));
}

}  // namespace

BENCHMARK(BM_DefectScanSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DefectScanParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_VerifySuite)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
