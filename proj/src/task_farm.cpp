#include "bsde/task_farm.hpp"

#include <omp.h>

#include <atomic>
#include <mutex>

namespace bsde {

CounterRng derive_stream(std::uint64_t master_seed, TaskKey key, StreamKind kind) {
    const std::uint32_t hi = (static_cast<std::uint32_t>(kind) << 28) | (key.iteration & 0x0FFFFFFFu);
    return CounterRng(master_seed, key.index, hi);
}

void run_serial(std::size_t count, const std::function<void(std::size_t)>& work) {
    for (std::size_t i = 0; i < count; ++i) {
        try {
            work(i);
        } catch (const TaskError&) {
            throw;
        } catch (const std::exception& e) {
            throw TaskError(i, e.what());
        }
    }
}

void run_farm(std::size_t count, int workers, const std::function<void(std::size_t)>& work) {
    if (workers < 1) throw std::invalid_argument("run_farm: worker count must be >= 1");
    if (count == 0) return;
    if (workers == 1) {
        run_serial(count, work);
        return;
    }

    std::atomic<bool> failed{false};
    std::size_t failed_index = 0;
    std::string failed_message;
    std::mutex failure_mutex;

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            work(static_cast<std::size_t>(i));
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failed.exchange(true)) {
                failed_index = static_cast<std::size_t>(i);
                failed_message = e.what();
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failed.exchange(true)) {
                failed_index = static_cast<std::size_t>(i);
                failed_message = "unknown error";
            }
        }
    }

    if (failed.load()) throw TaskError(failed_index, failed_message);
}

double speedup(int p_ref, double seconds_ref, int p, double seconds) {
    if (p_ref < 1 || p < 1) throw std::invalid_argument("speedup: worker counts must be >= 1");
    if (!(seconds_ref > 0.0) || !(seconds > 0.0))
        throw std::invalid_argument("speedup: wall times must be positive");
    return (seconds_ref * static_cast<double>(p_ref)) / (seconds * static_cast<double>(p));
}

std::vector<SpeedupRow> speedup_report(std::span<const std::pair<int, double>> timings) {
    if (timings.size() < 1) throw std::invalid_argument("speedup_report: need at least the reference timing");
    std::vector<SpeedupRow> rows;
    rows.reserve(timings.size());
    const auto [p_ref, t_ref] = timings.front();
    for (const auto& [p, t] : timings) rows.push_back({p, t, speedup(p_ref, t_ref, p, t)});
    return rows;
}

} // namespace bsde
