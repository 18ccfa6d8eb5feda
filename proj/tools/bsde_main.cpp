#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bsde/oracles.hpp"
#include "bsde/picard_engine.hpp"
#include "bsde/run_config.hpp"
#include "bsde/run_io.hpp"
#include "bsde/task_farm.hpp"

namespace fs = std::filesystem;
using namespace bsde;

namespace {

struct CommonOpts {
    std::string config_path;
    int workers = 0;          // 0: env/config/hardware
    std::int64_t seed = -1;   // <0: keep config seed
    std::string out_dir;      // empty: keep config output_dir
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file (JSON)")->required();
    cmd->add_option("--workers", opts.workers, "worker count (default: BSDE_WORKERS, config, hardware)");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--out", opts.out_dir, "output directory override");
}

RunConfig load(const CommonOpts& opts) {
    RunConfig cfg = parse_config(opts.config_path);
    cfg.solver.workers = resolve_workers(opts.workers, cfg);
    if (opts.seed >= 0) cfg.solver.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    return cfg;
}

void write_resolved(const RunConfig& cfg, const PicardSolver& solver) {
    fs::create_directories(cfg.output_dir);
    std::ofstream out(fs::path(cfg.output_dir) / "resolved_config.json");
    out << resolved_config_json(cfg, solver).dump(2) << "\n";
}

int cmd_solve(const CommonOpts& opts) {
    const RunConfig cfg = load(opts);
    PicardSolver solver(cfg.model, cfg.payoff, cfg.solver);
    for (const auto& w : solver.warnings()) std::cerr << "warning: " << w << "\n";
    write_resolved(cfg, solver);
    std::cout << "p=" << solver.basis().size() << " workers=" << cfg.solver.workers
              << " seed=" << cfg.solver.seed << "\n";

    const PicardState state = solver.run();
    write_convergence_csv((fs::path(cfg.output_dir) / "convergence.csv").string(), state.history,
                          cfg.model.d);

    const auto& last = state.history.back();
    nlohmann::json summary;
    summary["Y0"] = last.y0;
    summary["delta"] = last.delta;
    summary["iterations"] = state.iteration;
    double total = 0.0;
    for (const auto& rec : state.history) total += rec.seconds;
    summary["seconds"] = total;
    std::ofstream sum(fs::path(cfg.output_dir) / "summary.json");
    sum << summary.dump(2) << "\n";

    std::cout << "Y0=" << last.y0 << " delta=[";
    for (std::size_t i = 0; i < last.delta.size(); ++i)
        std::cout << (i ? "," : "") << last.delta[i];
    std::cout << "] seconds=" << total << "\n";
    return 0;
}

int cmd_benchmark(const CommonOpts& opts, long samples_override) {
    RunConfig cfg = load(opts);
    if (samples_override > 0) cfg.benchmark_samples = samples_override;
    const McEstimate est =
        mc_european_price(cfg.model, cfg.payoff, cfg.benchmark_samples, cfg.solver.seed,
                          cfg.solver.workers, cfg.benchmark_euler_steps);
    fs::create_directories(cfg.output_dir);
    write_benchmark_csv((fs::path(cfg.output_dir) / "benchmark.csv").string(), est);
    std::cout << "price=" << est.price << " ci=(" << est.ci_low() << "," << est.ci_high()
              << ") samples=" << est.samples << "\n";
    return 0;
}

int cmd_speedup(const CommonOpts& opts, const std::vector<int>& worker_counts) {
    if (worker_counts.size() < 2)
        throw std::invalid_argument("speedup: need at least two worker counts (the first is the reference)");
    const RunConfig base = load(opts);
    std::vector<std::pair<int, double>> timings;
    for (int p : worker_counts) {
        RunConfig cfg = base;
        cfg.solver.workers = p;
        PicardSolver solver(cfg.model, cfg.payoff, cfg.solver);
        const auto t0 = std::chrono::steady_clock::now();
        (void)solver.run();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timings.emplace_back(p, seconds);
        std::cout << "P=" << p << " seconds=" << seconds << "\n";
    }
    const auto rows = speedup_report(timings);
    fs::create_directories(base.output_dir);
    write_speedup_csv((fs::path(base.output_dir) / "speedup.csv").string(), rows);
    for (const auto& row : rows)
        std::cout << "P=" << row.workers << " speedup=" << row.speedup << "\n";
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    const RunConfig cfg = load(opts);
    PicardSolver solver(cfg.model, cfg.payoff, cfg.solver);
    for (const auto& w : solver.warnings()) std::cerr << "warning: " << w << "\n";
    std::cout << resolved_config_json(cfg, solver).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel BSDE solver: Picard iterations with a Monte-Carlo control variate "
                 "and sparse polynomial chaos extrapolation"};
    app.require_subcommand(1);

    CommonOpts solve_opts, bench_opts, speedup_opts, validate_opts;
    long bench_samples = 0;
    std::vector<int> worker_counts;

    auto* solve = app.add_subcommand("solve", "run the Picard solver; writes convergence.csv");
    add_common(solve, solve_opts);

    auto* bench = app.add_subcommand("benchmark", "plain Monte-Carlo reference price; writes benchmark.csv");
    add_common(bench, bench_opts);
    bench->add_option("--samples", bench_samples, "Monte-Carlo sample count");

    auto* speed = app.add_subcommand("speedup", "run the solver at several worker counts; writes speedup.csv");
    add_common(speed, speedup_opts);
    speed->add_option("--workers-list", worker_counts,
                      "worker counts; the first entry is the reference run")
        ->required()
        ->delimiter(',');

    auto* validate = app.add_subcommand("validate-config", "check a configuration and echo the resolved form");
    add_common(validate, validate_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_opts);
        if (bench->parsed()) return cmd_benchmark(bench_opts, bench_samples);
        if (speed->parsed()) return cmd_speedup(speedup_opts, worker_counts);
        if (validate->parsed()) return cmd_validate(validate_opts);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
