#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bsde/chaos_basis.hpp"
#include "bsde/least_squares.hpp"
#include "bsde/market_models.hpp"
#include "bsde/task_farm.hpp"

namespace bsde {

struct SolverParams {
    int iterations = 1;     // K_it
    int grid_points = 1;    // n
    int mc_samples = 1;     // M per grid point
    int euler_steps = 2;    // N; Black-Scholes paths are sampled exactly at the two needed times
    double omega = 0.0;     // penalization weight; 0 prices the European contract
    int eta = 3;            // max total degree of the chaos family
    double q = 1.0;         // hyperbolic truncation exponent
    double kappa = 3.5;     // spatial domain half-width, in approximate terminal stddevs
    double delta_fd_step = 0.02; // log-space bump of the spot delta probes
    std::uint64_t seed = 0; // master seed for all derived streams
    int workers = 1;

    std::vector<std::string> check() const;
    void validate() const;
};

// Penalized BSDE driver f(t,x,y,z) = -r(t) y + omega (y - Phi(x))^-.
// The z argument is accepted for interface completeness; this driver family
// never reads it.
struct Driver {
    const ModelSpec* model = nullptr;
    const Payoff* payoff = nullptr;
    double omega = 0.0;

    double operator()(double t, std::span<const double> x, double y,
                      std::span<const double> /*z*/) const {
        double f = -model->r(t) * y;
        if (omega != 0.0) f += omega * std::max(payoff->value(x) - y, 0.0);
        return f;
    }
};

struct IterationRecord {
    int k = 0;       // 1-based: record k holds the state after the k-th fit
    double y0 = 0.0; // Picard value at the spot: u^{k-1}(0,x0) + c^{k-1}(0,x0)
    std::vector<double> delta; // price deltas dV/dS_i from common-random-number
                               // central differences of the spot Picard value
    double seconds = 0.0;
    double avg_sample_variance = 0.0; // within-point variance of the psi draws, averaged over the grid
    double y0_std_error = 0.0;        // Monte-Carlo standard error of the spot correction
};

struct PicardState {
    int iteration = 0;               // completed fits
    ChaosCoefficients alpha;         // alpha^k
    PointSet points;                 // grid of the last executed iteration
    std::vector<double> corrections; // c^k at those points
    std::vector<double> evaluations; // u^k at those points
    std::vector<IterationRecord> history;
};

struct PriceDelta {
    double y0 = 0.0;
    std::vector<double> delta;
};

/// n points i.i.d. uniform on [0,T] x D, freshly drawn per iteration.
PointSet sample_grid(std::uint32_t iteration, int n, const DomainBox& domain, CounterRng rng);

// State at the g1 evaluation time plus the grid point at which the Euler
// coefficients were frozen (identical for exactly sampled paths).
struct PathPoint {
    double t = 0.0;
    std::span<const double> x;
    double t_frozen = 0.0;
    std::span<const double> x_frozen;
};

// Draws the forward path at the intermediate time s + (T-s)U and at maturity:
// exact two-time lognormal sampling under Black-Scholes, an N-step Euler
// scheme with the intermediate time inserted into the step containing it
// under Dupire. One instance per task; buffers are reused across samples.
class PathSampler {
public:
    PathSampler(const ModelSpec& model, int euler_steps);

    struct Draw {
        double t_mid = 0.0;
        double t_frozen = 0.0;
        std::span<const double> x_mid;
        std::span<const double> x_frozen;
        std::span<const double> x_terminal;
    };

    /// u01 in (0,1) positions the intermediate time; normals come from rng in
    /// a fixed order (one d-block per step).
    Draw sample(double s, std::span<const double> y, double u01, CounterRng& rng);

    const ModelSpec& model() const { return *model_; }
    bool exact() const { return model_->kind == ModelKind::BlackScholes; }

private:
    void correlated_block(CounterRng& rng, std::vector<double>& out);

    const ModelSpec* model_;
    int steps_;
    std::vector<double> chol_;
    std::vector<double> g_, inc_a_, inc_b_;
    std::vector<double> x_mid_, x_frozen_, x_terminal_;
};

/// One psi^N draw: (T-s) g1(t_mid, X_mid) + g2(X_T) along a fresh path from
/// (s, y). g1 sees the PathPoint (with frozen-coefficient location), g2 the
/// terminal state.
template <class G1, class G2>
double psi_n(PathSampler& paths, double s, std::span<const double> y, double u01,
             G1&& g1, G2&& g2, CounterRng& rng) {
    const double horizon = paths.model().maturity;
    if (!(s < horizon)) throw std::invalid_argument("psi_n: start time must precede maturity");
    const auto draw = paths.sample(s, y, u01, rng);
    const double g1_val = g1(PathPoint{draw.t_mid, draw.x_mid, draw.t_frozen, draw.x_frozen});
    return (horizon - s) * g1_val + g2(draw.x_terminal);
}

/// f(t, x, u(t,x), (grad_x u . sigma)(t,x)) with u represented by the chaos
/// coefficients.
double eval_driver(const Driver& driver, const SparseBasis& basis, std::span<const double> alpha,
                   double t, std::span<const double> x);

// Monte-Carlo correction estimator: c(s,y) = mean over M draws of
// psi^N(s, y, f_u + (dt + L^N) u, Phi - u(T,.)).
class CorrectionKernel {
public:
    CorrectionKernel(const ModelSpec& model, const Payoff& payoff, const SparseBasis& basis,
                     double omega, int euler_steps);

    struct Workspace {
        SparseBasis::Workspace basis;
        PathSampler paths;
        std::vector<double> vols;
    };
    Workspace make_workspace() const;

    struct PointResult {
        double c = 0.0;
        double sample_variance = 0.0;
    };

    /// One psi^N draw under the current approximation (draws U then the path).
    double sample(double s, std::span<const double> y, std::span<const double> alpha,
                  CounterRng& rng, Workspace& ws) const;

    /// Correction estimate at one grid point over m_samples draws. Aborts on a
    /// non-finite sample.
    PointResult correction_at_point(double s, std::span<const double> y,
                                    std::span<const double> alpha, int m_samples,
                                    CounterRng rng, Workspace& ws) const;

private:
    const ModelSpec* model_;
    const Payoff* payoff_;
    const SparseBasis* basis_;
    Driver driver_;
    int euler_steps_;
    std::vector<double> corr_; // dense correlation matrix
};

// Algorithm driver: starts from alpha^0 = 0 and runs exactly K_it iterations
// of (sample grid -> farm corrections -> refit), recording the price and
// delta trajectory. The reported price is the Picard value at the spot,
// u^k(0,x0) + c^k(0,x0), and the reported deltas are central differences of
// that value over +-delta_fd_step bumps of each log coordinate, each bump
// pair sharing one random stream. Spot and delta probes are farmed as d+1
// extra tasks per iteration: the global fit only needs to be good enough to
// keep the correction variance low, while the spot estimates stay unbiased
// whatever the basis resolution. The iteration loop is sequential; within an
// iteration the n+1+d correction tasks run on the task farm with per-(k,i)
// streams, so the trajectory is bitwise independent of the worker count.
class PicardSolver {
public:
    PicardSolver(ModelSpec model, Payoff payoff, SolverParams params);

    const SparseBasis& basis() const { return basis_; }
    const DomainBox& domain() const { return basis_.domain(); }
    const SolverParams& params() const { return params_; }

    PicardState run() const;
    PicardState initial_state() const;
    void step(PicardState& state) const;

    /// Y_0 = u(0, log S0) and Delta_0 with per-asset components
    /// (grad_x u)_i (0, log S0) / S0_i, the hedge ratio in shares.
    PriceDelta price_delta(std::span<const double> alpha) const;

    /// Non-fatal configuration advice (e.g. fewer grid points than basis functions).
    std::vector<std::string> warnings() const;

private:
    ModelSpec model_;
    Payoff payoff_;
    SolverParams params_;
    SparseBasis basis_;
    CorrectionKernel kernel_;
};

} // namespace bsde
