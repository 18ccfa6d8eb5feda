// End-to-end acceptance suite: prints one PASS/FAIL line per criterion and
// exits nonzero if any hard criterion fails. Criterion 7 is a scaling report,
// printed but never failed.
//
// Default mode keeps the published-parameter runs that finish at desk scale
// and the documented reduced variant of the five-asset put; --full switches
// that run to the full M=50000 sample count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "bsde/least_squares.hpp"
#include "bsde/oracles.hpp"
#include "bsde/picard_engine.hpp"
#include "bsde/task_farm.hpp"
#include "test_support.hpp"

using namespace bsde;
using bsde::testing::black_scholes;
using bsde::testing::dupire;

namespace {

int g_failures = 0;
int g_workers = 2;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_soft(const std::string& name, const std::string& detail) {
    std::printf("[REPORT] %s: %s\n", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

double timed_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolverParams params(int iterations, int n, int m, int steps, double omega, int eta, double q,
                    double kappa, std::uint64_t seed) {
    SolverParams p;
    p.iterations = iterations;
    p.grid_points = n;
    p.mc_samples = m;
    p.euler_steps = steps;
    p.omega = omega;
    p.eta = eta;
    p.q = q;
    p.kappa = kappa;
    p.seed = seed;
    p.workers = g_workers;
    return p;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// --- criterion 1: five-asset European put basket (Fig. 2 best curve) ---
void criterion1(bool full) {
    const auto t0 = std::chrono::steady_clock::now();
    const int m_samples = full ? 50000 : 10000;
    const double tol = full ? 0.05 : 0.10;

    auto model = black_scholes(5, 0.1, 0.2, 3.0, 0.05, 0.0);
    const Payoff put{PayoffKind::PutBasket, 100.0};
    PicardSolver solver(model, put, params(10, 1000, m_samples, 2, 0.0, 3, 1.0, 2.25, 20240601));
    const auto state = solver.run();
    const double y0 = state.history.back().y0;
    const double wall = timed_seconds(t0);

    bool pass = std::abs(y0 - 2.0353) <= tol;
    if (!full) pass = pass && wall < 600.0; // the reduced variant must finish in 10 minutes
    report(full ? "criterion 1 (full, M=50000)" : "criterion 1 (reduced, M=10000)", pass,
           fmt("Y0=%.4f target 2.0353 +- %.2f after %d iterations, %.0fs", y0, tol,
               state.iteration, wall));
}

// --- criterion 2: ten-asset European call basket (Fig. 3 best curve) ---
void criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    auto model = black_scholes(10, 0.2, 0.2, 1.0, 0.05, 0.0);
    const Payoff call{PayoffKind::CallBasket, 100.0};
    PicardSolver solver(model, call, params(8, 1000, 30000, 2, 0.0, 5, 0.6, 2.5, 20240602));
    const auto state = solver.run();
    const double y0 = state.history.back().y0;
    const double wall = timed_seconds(t0);
    report("criterion 2 (d=10 call, eta=5, q=0.6)", std::abs(y0 - 7.0207) <= 0.15 && wall < 3600.0,
           fmt("Y0=%.4f target 7.0207 +- 0.15, %.0fs", y0, wall));
}

// --- criterion 3: five-asset Dupire European put with delta benchmark ---
void criterion3() {
    auto model = dupire(5, 0.0, 1.0, 0.05, 0.0);
    const Payoff put{PayoffKind::PutBasket, 100.0};
    PicardSolver solver(model, put, params(6, 1000, 30000, 10, 0.0, 3, 1.0, 2.5, 20240603));
    const auto state = solver.run();
    const auto& last = state.history.back();

    const bool price_ok = std::abs(last.y0 - 1.745899) <= 0.05;
    bool delta_ok = true;
    double worst = 0.0;
    for (double d : last.delta) {
        worst = std::max(worst, std::abs(d - (-0.0625)));
        if (std::abs(d - (-0.0625)) > 0.015) delta_ok = false;
    }
    report("criterion 3 (Dupire put price)", price_ok,
           fmt("Y0=%.4f target 1.745899 +- 0.05", last.y0));
    report("criterion 3 (Dupire put delta)", delta_ok,
           fmt("delta=[%.4f..%.4f], worst gap to -0.0625 is %.4f (tol 0.015)",
               *std::min_element(last.delta.begin(), last.delta.end()),
               *std::max_element(last.delta.begin(), last.delta.end()), worst));
}

// --- criterion 4: oracle equivalence ---
void criterion4() {
    // d=1 against the closed form
    for (PayoffKind kind : {PayoffKind::PutBasket, PayoffKind::CallBasket}) {
        auto model = black_scholes(1, 0.0, 0.2, 1.0, 0.05, 0.0);
        const Payoff payoff{kind, 100.0};
        PicardSolver solver(model, payoff, params(8, 600, 20000, 2, 0.0, 4, 1.0, 3.0, 20240604));
        const auto state = solver.run();
        const auto& last = state.history.back();
        const double exact = bs_closed_form(100.0, 100.0, 0.05, 0.0, 0.2, 1.0, kind);
        const double tol = std::max(0.01 * exact, 2.0 * last.y0_std_error);
        const char* name = kind == PayoffKind::PutBasket ? "criterion 4 (d=1 put vs closed form)"
                                                         : "criterion 4 (d=1 call vs closed form)";
        report(name, std::abs(last.y0 - exact) <= tol,
               fmt("Y0=%.4f exact %.4f tol %.4f (2 se = %.4f)", last.y0, exact, tol,
                   2.0 * last.y0_std_error));
    }

    // d=2..5 inside the plain Monte-Carlo oracle interval widened by 0.02
    for (int d = 2; d <= 5; ++d) {
        auto model = black_scholes(d, 0.1, 0.2, 1.0, 0.05, 0.0);
        const Payoff put{PayoffKind::PutBasket, 100.0};
        PicardSolver solver(model, put,
                            params(8, 1000, 10000, 2, 0.0, 3, 1.0, 2.5, 20240610 + d));
        const auto state = solver.run();
        const double y0 = state.history.back().y0;
        const auto oracle = mc_european_price(model, put, 2000000, 555000 + d, g_workers);
        const bool pass = y0 >= oracle.ci_low() - 0.02 && y0 <= oracle.ci_high() + 0.02;
        report(fmt("criterion 4 (d=%d put vs MC oracle)", d), pass,
               fmt("Y0=%.4f oracle CI (%.4f, %.4f) widened by 0.02", y0, oracle.ci_low(),
                   oracle.ci_high()));
    }
}

// --- criterion 5: American monotonicity and Table-1 deltas ---
void criterion5() {
    const double table_row5[5] = {-0.108961, -0.105648, -0.105725, -0.105647, -0.111274};
    auto model = black_scholes(5, 0.2, 0.25, 1.0, 0.05, 0.1);
    const Payoff put{PayoffKind::PutBasket, 100.0};

    PicardSolver solver(model, put, params(5, 1000, 5000, 2, 1.0, 3, 1.0, 2.5, 20240605));
    const auto state = solver.run();
    bool delta_ok = true;
    double worst = 0.0;
    for (const auto& rec : state.history) {
        if (rec.k < 4) continue;
        for (int i = 0; i < 5; ++i) {
            worst = std::max(worst, std::abs(rec.delta[i] - table_row5[i]));
            if (std::abs(rec.delta[i] - table_row5[i]) > 0.02) delta_ok = false;
        }
    }
    report("criterion 5 (American delta vs published table)", delta_ok,
           fmt("worst component gap at iterations >= 4 is %.4f (tol 0.02)", worst));

    // penalized price dominates the European price on identical seeds
    const int n_seeds = 8;
    std::vector<double> am(n_seeds), eu(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
        PicardSolver amer(model, put, params(5, 1000, 5000, 2, 1.0, 3, 1.0, 2.5, 777000 + s));
        PicardSolver euro(model, put, params(5, 1000, 5000, 2, 0.0, 3, 1.0, 2.5, 777000 + s));
        am[s] = amer.run().history.back().y0;
        eu[s] = euro.run().history.back().y0;
    }
    const double mean_am = std::accumulate(am.begin(), am.end(), 0.0) / n_seeds;
    double var = 0.0;
    for (double v : am) var += (v - mean_am) * (v - mean_am);
    const double sd = std::sqrt(var / (n_seeds - 1));
    double min_gap = 1e300;
    for (int s = 0; s < n_seeds; ++s) min_gap = std::min(min_gap, am[s] - eu[s]);
    report("criterion 5 (penalization monotonicity)", min_gap >= -2.0 * sd,
           fmt("min[Y0(omega=1) - Y0(omega=0)] = %.4f over %d seeds, -2 sd = %.4f", min_gap,
               n_seeds, -2.0 * sd));
}

// --- criterion 6: property suite ---
void criterion6() {
    bool all = true;
    auto sub = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("    %-52s %s %s\n", name, ok ? "ok  " : "FAIL", detail.c_str());
        if (!ok) all = false;
    };

    {
        auto binom = [](int n, int k) {
            long r = 1;
            for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
            return r;
        };
        bool ok = hyperbolic_indices(6, 3, 1.0).size() == 84 &&
                  hyperbolic_indices(2, 2, 0.5).size() == 5;
        for (int dp = 1; dp <= 8 && ok; ++dp)
            for (int eta = 0; eta <= 5 && ok; ++eta)
                ok = hyperbolic_indices(dp, eta, 1.0).size() ==
                     static_cast<std::size_t>(binom(dp + eta, eta));
        sub("hyperbolic cardinalities incl. p=84", ok, "");
    }

    {
        DomainBox box;
        box.horizon = 2.0;
        box.lower = {4.0, 3.8};
        box.upper = {5.2, 5.5};
        SparseBasis basis(box, 3, 1.0);
        CounterRng rng(5150, 0, 0);
        bool ok = true;
        double worst = 0.0;
        const double h = 1e-5;
        for (int trial = 0; trial < 25 && ok; ++trial) {
            std::vector<double> alpha(basis.size());
            for (double& a : alpha) a = rng.normal();
            const double t = 0.1 + 1.8 * rng.uniform01();
            std::vector<double> x = {4.0 + rng.uniform01(), 3.9 + rng.uniform01()};
            auto ws = basis.make_workspace();
            double value, dt;
            basis.eval_all(alpha, t, x, ws, value, dt);
            const double fd_t = (basis.eval(alpha, t + h, x) - basis.eval(alpha, t - h, x)) / (2 * h);
            worst = std::max(worst, std::abs(dt - fd_t) / std::max(1.0, std::abs(fd_t)));
            for (int i = 0; i < 2; ++i) {
                auto xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                const double fd =
                    (basis.eval(alpha, t, xp) - basis.eval(alpha, t, xm)) / (2 * h);
                worst = std::max(worst, std::abs(ws.grad[i] - fd) / std::max(1.0, std::abs(fd)));
            }
            ok = worst <= 1e-6;
        }
        sub("basis derivatives vs finite differences @1e-6", ok, fmt("worst rel err %.2e", worst));
    }

    {
        DomainBox box;
        box.horizon = 1.0;
        box.lower = {-1.0, -1.0};
        box.upper = {1.0, 1.0};
        SparseBasis basis(box, 2, 1.0);
        CounterRng rng(61, 0, 0);
        PointSet pts;
        pts.d = 2;
        const int n = 50;
        pts.t.resize(n);
        pts.coords.resize(n * 2);
        for (int i = 0; i < n; ++i) {
            pts.t[i] = rng.uniform01();
            pts.coords[i * 2] = 2.0 * rng.uniform01() - 1.0;
            pts.coords[i * 2 + 1] = 2.0 * rng.uniform01() - 1.0;
        }
        std::vector<double> alpha_star(basis.size());
        for (double& a : alpha_star) a = rng.normal();
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i) values[i] = basis.eval(alpha_star, pts.t[i], pts.x(i));
        const auto alpha = fit(basis, pts, values);
        double err = 0.0;
        for (std::size_t l = 0; l < alpha.size(); ++l)
            err = std::max(err, std::abs(alpha[l] - alpha_star[l]));
        const bool recover_ok = err <= 1e-8;

        const int m = 10, p = 4;
        std::vector<double> design(m * p), b(m);
        for (int i = 0; i < m; ++i) {
            design[i * p + 0] = 1.0;
            design[i * p + 1] = rng.normal();
            design[i * p + 2] = design[i * p + 1];
            design[i * p + 3] = rng.normal();
            b[i] = rng.normal();
        }
        const auto got = fit_design(m, p, design, b);
        const auto oracle = bsde::testing::jacobi_pinv_solve(m, p, design, b);
        double perr = 0.0;
        for (int l = 0; l < p; ++l) perr = std::max(perr, std::abs(got[l] - oracle[l]));
        sub("least squares: recovery + pseudo-inverse @1e-8", recover_ok && perr <= 1e-8,
            fmt("recovery %.1e, pinv gap %.1e", err, perr));
    }

    {
        const int d = 5;
        const auto l = cholesky_correlation(d, 0.1);
        double worst = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double acc = 0.0;
                for (int k = 0; k < d; ++k)
                    acc += l[static_cast<std::size_t>(i) * d + k] * l[static_cast<std::size_t>(j) * d + k];
                worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.1)));
            }
        bool chol_ok = worst <= 1e-12;

        auto model = black_scholes(2, 0.4, 0.2, 2.0);
        const std::vector<double> grid = {1.0, 2.0};
        auto rng = derive_stream(88, {0, 0}, StreamKind::aux);
        const int draws = 40000;
        double c00 = 0, c01 = 0, c11 = 0;
        std::vector<double> normals(grid.size() * 2);
        for (int s = 0; s < draws; ++s) {
            for (double& g : normals) g = rng.normal();
            const auto path = sample_brownian(model, grid, normals);
            const double w0 = path.values[2], w1 = path.values[3];
            c00 += w0 * w0;
            c01 += w0 * w1;
            c11 += w1 * w1;
        }
        const double t_end = 2.0;
        const double se_diag = t_end * std::sqrt(2.0 / draws);
        const double se_off = t_end * std::sqrt((1.0 + 0.16) / draws);
        const bool cov_ok = std::abs(c00 / draws - t_end) <= 3 * se_diag &&
                            std::abs(c11 / draws - t_end) <= 3 * se_diag &&
                            std::abs(c01 / draws - 0.4 * t_end) <= 3 * se_off;
        sub("cholesky @1e-12 + brownian covariance @3se", chol_ok && cov_ok,
            fmt("chol gap %.1e", worst));
    }

    {
        auto model = black_scholes(2, 0.1, 0.2, 1.0, 0.0, 0.0);
        const Payoff constant{PayoffKind::Constant, 5.0};
        SparseBasis basis(terminal_domain(model, 3.5), 2, 1.0);
        CorrectionKernel kernel(model, constant, basis, 0.0, 2);
        auto ws = kernel.make_workspace();
        std::vector<double> alpha(basis.size(), 0.0);
        alpha[0] = 5.0;
        const std::vector<double> y = {std::log(97.0), std::log(108.0)};
        const auto res = kernel.correction_at_point(
            0.25, y, alpha, 400, derive_stream(3, {0, 0}, StreamKind::correction), ws);
        sub("zero-correction fixed point (exact zeros)", res.c == 0.0 && res.sample_variance == 0.0,
            fmt("c=%.17g var=%.17g", res.c, res.sample_variance));
    }

    {
        auto model = black_scholes(2, 0.1);
        const Payoff put{PayoffKind::PutBasket, 100.0};
        std::vector<ChaosCoefficients> finals;
        for (int workers : {1, 2, 4, 8}) {
            SolverParams p = params(3, 120, 200, 2, 0.0, 2, 1.0, 2.5, 90125);
            p.workers = workers;
            PicardSolver solver(model, put, p);
            finals.push_back(solver.run().alpha);
        }
        bool ok = true;
        for (std::size_t i = 1; i < finals.size(); ++i) ok = ok && finals[i] == finals[0];
        sub("bitwise alpha reproducibility, workers {1,2,4,8}", ok, "");
    }

    {
        const bool ok = std::abs(speedup(8, 543.677, 16, 262.047) - 1.03737) < 1e-5 &&
                        std::abs(speedup(8, 1196.79, 256, 35.9239) - 1.04108) < 1e-5;
        sub("speedup formula vs published tables", ok,
            fmt("%.5f / %.5f", speedup(8, 543.677, 16, 262.047),
                speedup(8, 1196.79, 256, 35.9239)));
    }

    report("criterion 6 (property suite)", all, all ? "all sub-checks passed" : "see sub-checks");
}

// --- criterion 7: desk-scale scaling report (soft) ---
void criterion7() {
    auto model = black_scholes(6, 0.0, 0.2, 1.0, 0.02, 0.0, 100.0);
    const Payoff put{PayoffKind::PutBasket, 95.0};
    const int hw = std::max(2u, std::thread::hardware_concurrency());

    std::vector<std::pair<int, double>> timings;
    bool monotone = true;
    double prev = 1e300;
    for (int p = 1; p <= hw; p *= 2) {
        SolverParams sp = params(3, 400, 2000, 10, 1.0, 3, 1.0, 2.5, 20240606);
        sp.workers = p;
        PicardSolver solver(model, put, sp);
        const auto t0 = std::chrono::steady_clock::now();
        (void)solver.run();
        const double secs = timed_seconds(t0);
        timings.emplace_back(p, secs);
        if (secs >= prev) monotone = false;
        prev = secs;
    }
    const auto rows = speedup_report(timings);
    std::string detail = "wall times";
    for (const auto& row : rows) detail += fmt(" P=%d:%.2fs(eff %.2f)", row.workers, row.seconds, row.speedup);
    detail += monotone ? "; monotone decrease" : "; NOT monotone";
    detail += rows.back().speedup >= 0.8 ? "; efficiency >= 0.8 at full core count"
                                         : "; efficiency < 0.8 at full core count";
    report_soft("criterion 7 (desk-scale scaling)", detail);
}

} // namespace

int main(int argc, char** argv) {
    bool full = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) full = true;
        if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) g_workers = std::atoi(argv[++i]);
    }
    if (const char* env = std::getenv("BSDE_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) g_workers = v;
    }
    std::printf("acceptance suite: workers=%d mode=%s\n", g_workers, full ? "full" : "default");

    const auto t0 = std::chrono::steady_clock::now();
    criterion1(full);
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("total: %.0fs, %d failure(s)\n", timed_seconds(t0), g_failures);
    return g_failures == 0 ? 0 : 1;
}
