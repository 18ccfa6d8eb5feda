#include "bsde/run_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bsde {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

} // namespace

std::string convergence_csv_header(int d) {
    std::string h = "k,Y0";
    for (int i = 1; i <= d; ++i) h += ",delta_" + std::to_string(i);
    h += ",seconds";
    return h;
}

void write_convergence_csv(const std::string& path, const std::vector<IterationRecord>& history,
                           int d) {
    auto out = open_out(path);
    out << convergence_csv_header(d) << "\n";
    for (const auto& rec : history) {
        out << rec.k << ',' << fmt(rec.y0);
        for (int i = 0; i < d; ++i) out << ',' << fmt(rec.delta[i]);
        out << ',' << fmt(rec.seconds) << "\n";
    }
}

void write_speedup_csv(const std::string& path, const std::vector<SpeedupRow>& rows) {
    auto out = open_out(path);
    out << "P,seconds,speedup\n";
    for (const auto& row : rows)
        out << row.workers << ',' << fmt(row.seconds) << ',' << fmt(row.speedup) << "\n";
}

void write_benchmark_csv(const std::string& path, const McEstimate& est) {
    auto out = open_out(path);
    out << "price,ci_low,ci_high,samples\n";
    out << fmt(est.price) << ',' << fmt(est.ci_low()) << ',' << fmt(est.ci_high()) << ','
        << est.samples << "\n";
}

} // namespace bsde
