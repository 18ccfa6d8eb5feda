#pragma once

#include <string>
#include <vector>

#include "bsde/oracles.hpp"
#include "bsde/picard_engine.hpp"
#include "bsde/task_farm.hpp"

namespace bsde {

/// Fixed schema: k,Y0,delta_1..delta_d,seconds
void write_convergence_csv(const std::string& path, const std::vector<IterationRecord>& history,
                           int d);

/// Fixed schema: P,seconds,speedup
void write_speedup_csv(const std::string& path, const std::vector<SpeedupRow>& rows);

/// Fixed schema: price,ci_low,ci_high,samples
void write_benchmark_csv(const std::string& path, const McEstimate& estimate);

std::string convergence_csv_header(int d);

} // namespace bsde
