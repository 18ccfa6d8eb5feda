// Compares the serial reference loop against the OpenMP farm on a synthetic
// correction-style workload (per-task Monte-Carlo sums on private streams)
// and checks that both assemble bitwise-identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

#include "bsde/task_farm.hpp"

using namespace bsde;

namespace {

double timed(const char* label, int workers, std::size_t tasks, int samples,
             std::vector<double>& out) {
    auto work = [&](std::size_t i) {
        auto rng = derive_stream(42, {0, static_cast<std::uint32_t>(i)}, StreamKind::aux);
        double acc = 0.0;
        for (int m = 0; m < samples; ++m) {
            const double g = rng.normal();
            acc += std::exp(-0.5 * g * g);
        }
        out[i] = acc / samples;
    };
    const auto t0 = std::chrono::steady_clock::now();
    if (workers == 0)
        run_serial(tasks, work);
    else
        run_farm(tasks, workers, work);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-18s %8.3fs\n", label, s);
    return s;
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t tasks = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 512;
    const int samples = argc > 2 ? std::atoi(argv[2]) : 40000;
    const int max_workers = static_cast<int>(std::thread::hardware_concurrency());

    std::printf("tasks=%zu samples-per-task=%d\n", tasks, samples);
    std::vector<double> serial(tasks), parallel(tasks);

    const double t_serial = timed("serial reference", 0, tasks, samples, serial);

    std::vector<std::pair<int, double>> timings{{1, t_serial}};
    for (int p = 2; p <= max_workers; p *= 2) {
        char label[64];
        std::snprintf(label, sizeof(label), "farm P=%d", p);
        const double t = timed(label, p, tasks, samples, parallel);
        timings.emplace_back(p, t);
        for (std::size_t i = 0; i < tasks; ++i) {
            if (parallel[i] != serial[i]) {
                std::printf("MISMATCH at task %zu\n", i);
                return 1;
            }
        }
    }

    std::printf("\n%6s %10s %10s\n", "P", "seconds", "speedup");
    for (const auto& row : speedup_report(timings))
        std::printf("%6d %10.3f %10.4f\n", row.workers, row.seconds, row.speedup);
    std::printf("parallel results identical to the serial reference\n");
    return 0;
}
