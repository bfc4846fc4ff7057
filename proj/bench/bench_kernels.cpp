// Microbenchmark comparing the OpenMP kernels against their serial reference
// implementations. Run from the build tree: ./bench/bench_kernels [n] [m]
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsd/observation.hpp"
#include "dsd/pipeline.hpp"
#include "dsd/rng.hpp"
#include "dsd/topology.hpp"

using namespace dsd;
using Clock = std::chrono::steady_clock;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

NodeLabelAssignment random_assignment(int n, std::uint64_t seed) {
    NodeLabelAssignment a;
    a.labels.resize(n);
    Rng rng(seed);
    for (int v = 0; v < n; ++v)
        a.labels[v] = static_cast<NodeLabel>(rng.next_below(3));
    return a;
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 14000;
    const int m = argc > 2 ? std::atoi(argv[2]) : 8;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("feature extraction, BA(n=%d, m=%d), %d thread(s)\n", n, m, threads);

    Topology t = generate_ba(n, m, 1);
    NodeLabelAssignment a = random_assignment(n, 2);

    FeatureMatrix serial, parallel;
    const double t_serial = time_of([&] { serial = extract_features_serial(t, a); }, 3);
    const double t_par = time_of([&] { parallel = extract_features(t, a); }, 3);
    if (serial.data != parallel.data) {
        std::fprintf(stderr, "MISMATCH between serial and parallel features\n");
        return 1;
    }
    std::printf("  %-28s %10.3f ms\n", "serial reference", t_serial * 1e3);
    std::printf("  %-28s %10.3f ms  (speedup %.2fx)\n", "O(E) parallel kernel",
                t_par * 1e3, t_serial / t_par);

    DatasetSpec spec;
    spec.n = n;
    spec.observer_count = std::max(2, n / 56);
    spec.total_samples = 20;
    spec.master_seed = 3;
    std::printf("dataset build, %d samples at n=%d\n", spec.total_samples, spec.n);
    const double t_one = time_of([&] { build_dataset(spec, 1); }, 1);
    const double t_all = time_of([&] { build_dataset(spec, threads); }, 1);
    std::printf("  %-28s %10.3f ms\n", "1 worker", t_one * 1e3);
    std::printf("  %-28s %10.3f ms  (speedup %.2fx)\n", "all workers", t_all * 1e3,
                t_one / t_all);
    return 0;
}
