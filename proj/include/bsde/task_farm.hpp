#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsde/rng.hpp"

namespace bsde {

// Identifies one unit of work: the correction at grid point `index` during
// Picard iteration `iteration`. Unique within a run.
struct TaskKey {
    std::uint32_t iteration = 0;
    std::uint32_t index = 0;
};

// Purpose tag folded into the stream identifier so that, e.g., the grid
// sampler of iteration k and the correction task (k, 0) never share a stream.
enum class StreamKind : std::uint32_t { correction = 0, grid = 1, oracle = 2, aux = 3 };

/// Deterministic, collision-free stream for (master_seed, key): distinct keys
/// own disjoint counter blocks of the keyed Philox generator, so streams are
/// reproducible and statistically independent regardless of scheduling.
CounterRng derive_stream(std::uint64_t master_seed, TaskKey key,
                         StreamKind kind = StreamKind::correction);

// Per-task outcome with the metadata needed for deterministic reassembly and
// timing reports.
struct TaskResult {
    TaskKey key;
    double c_value = 0.0;
    int samples = 0;
    int worker = 0;
    double seconds = 0.0;
};

class TaskError : public std::runtime_error {
public:
    TaskError(std::size_t index, const std::string& message)
        : std::runtime_error("task " + std::to_string(index) + " failed: " + message), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Serial reference loop; identical contract to run_farm with one worker.
void run_serial(std::size_t count, const std::function<void(std::size_t)>& work);

/// Executes work(0..count-1) exactly once each over `workers` threads with
/// dynamic dispatch (a worker grabs the next task as soon as it finishes).
/// Results must be written into pre-indexed slots by the closure, which makes
/// the assembled output independent of scheduling order. A failing task
/// aborts the run: TaskError reports its index and no result may be trusted.
void run_farm(std::size_t count, int workers, const std::function<void(std::size_t)>& work);

/// run_farm with per-index results collected into a vector.
template <class R, class F>
std::vector<R> run_farm_collect(std::size_t count, int workers, F&& fn) {
    std::vector<R> results(count);
    run_farm(count, workers, [&](std::size_t i) { results[i] = fn(i); });
    return results;
}

/// Scaling ratio normalized to a reference run:
///   (seconds_ref * p_ref) / (seconds * p).
/// Equals parallel efficiency when the reference is the single-worker run.
double speedup(int p_ref, double seconds_ref, int p, double seconds);

struct SpeedupRow {
    int workers = 0;
    double seconds = 0.0;
    double speedup = 0.0;
};

/// Speedup table from measured (or injected) timings; the first entry is the
/// reference run.
std::vector<SpeedupRow> speedup_report(std::span<const std::pair<int, double>> timings);

} // namespace bsde
