// Serial reference vs OpenMP kernels on the sampling and grid workloads.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "ginv/criteria_chain.hpp"
#include "ginv/hadamard.hpp"
#include "ginv/test_oracle.hpp"

using namespace ginv;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, const std::function<double(Exec)>& kernel, int reps) {
  double serial_value = 0.0, parallel_value = 0.0;
  const double ts = seconds([&] { serial_value = kernel(Exec::serial); }, reps);
  const double tp = seconds([&] { parallel_value = kernel(Exec::parallel); }, reps);
  std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, ts, tp, ts / tp,
              serial_value == parallel_value ? "identical" : "DIFFERENT");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const MapUnderTest cexp = make_complex_exp();
  const MapUnderTest arctan = make_arctan();

  report("ball minimum (complex-exp)", [&](Exec e) {
    SampleStream s(42, cexp.name, "bench");
    return ball_minimum(2, 10.0, {64, 256, true}, s, [&](const Vec& x) { return banach_constant(cexp, x); }, e).value;
  }, 3);

  report("hadamard profile (cexp)", [&](Exec e) {
    return hadamard_profile(cexp, 20.0, 400, 64, 42, e).rows.back().varrho;
  }, 3);

  report("grid scan (complex-exp)", [&](Exec e) {
    GridScanOptions o;
    o.exec = e;
    return grid_scan(cexp, 8.0, 401, o).covered_targets;
  }, 2);

  report("grid scan (arctan 1e5)", [&](Exec e) {
    GridScanOptions o;
    o.exec = e;
    return grid_scan(arctan, 100.0, 100000, o).covered_targets;
  }, 2);

  report("uniform lower bound", [&](Exec e) {
    return check_uniform_lower_bound(cexp, 10.0, 4096, 42, e).metric("alpha").value_or(0.0);
  }, 3);
  return 0;
}
