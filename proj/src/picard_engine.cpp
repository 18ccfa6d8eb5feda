#include "bsde/picard_engine.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bsde {

std::vector<std::string> SolverParams::check() const {
    std::vector<std::string> bad;
    if (iterations < 1) bad.push_back("solver.iterations: must be >= 1");
    if (grid_points < 1) bad.push_back("solver.grid_points: must be >= 1");
    if (mc_samples < 1) bad.push_back("solver.mc_samples: must be >= 1");
    if (euler_steps < 1) bad.push_back("solver.euler_steps: must be >= 1");
    if (omega < 0.0) bad.push_back("solver.omega: penalization weight must be >= 0");
    if (eta < 0) bad.push_back("solver.eta: must be >= 0");
    if (!(q > 0.0 && q <= 1.0)) bad.push_back("solver.q: must lie in (0,1]");
    if (!(kappa > 0.0)) bad.push_back("solver.kappa: must be positive");
    if (!(delta_fd_step > 0.0)) bad.push_back("solver.delta_fd_step: must be positive");
    if (workers < 1) bad.push_back("solver.workers: must be >= 1");
    return bad;
}

void SolverParams::validate() const {
    const auto bad = check();
    if (bad.empty()) return;
    std::string msg = "invalid solver parameters:";
    for (const auto& m : bad) msg += "\n  " + m;
    throw std::invalid_argument(msg);
}

PointSet sample_grid(std::uint32_t /*iteration*/, int n, const DomainBox& domain, CounterRng rng) {
    domain.validate();
    if (n < 1) throw std::invalid_argument("sample_grid: need at least one point");
    const int d = domain.dim();
    PointSet points;
    points.d = d;
    points.t.resize(n);
    points.coords.resize(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
        points.t[i] = domain.horizon * rng.uniform01();
        for (int c = 0; c < d; ++c)
            points.coords[static_cast<std::size_t>(i) * d + c] =
                domain.lower[c] + (domain.upper[c] - domain.lower[c]) * rng.uniform01();
    }
    return points;
}

double eval_driver(const Driver& driver, const SparseBasis& basis, std::span<const double> alpha,
                   double t, std::span<const double> x) {
    const ModelSpec& model = *driver.model;
    const double u = basis.eval(alpha, t, x);
    std::vector<double> grad(basis.spatial_dim());
    basis.eval_grad_x(alpha, t, x, grad);
    // z = grad_x u . sigma with sigma = diag(vol) L
    const auto chol = cholesky_correlation(model.d, model.rho);
    std::vector<double> z(model.d, 0.0);
    for (int j = 0; j < model.d; ++j) {
        double acc = 0.0;
        for (int i = j; i < model.d; ++i)
            acc += grad[i] * model.asset_vol(i, t, x[i]) * chol[static_cast<std::size_t>(i) * model.d + j];
        z[j] = acc;
    }
    return driver(t, x, u, z);
}

PathSampler::PathSampler(const ModelSpec& model, int euler_steps)
    : model_(&model), steps_(euler_steps), chol_(cholesky_correlation(model.d, model.rho)) {
    if (euler_steps < 1) throw std::invalid_argument("PathSampler: need at least one Euler step");
    const std::size_t d = static_cast<std::size_t>(model.d);
    g_.resize(d);
    inc_a_.resize(d);
    inc_b_.resize(d);
    x_mid_.resize(d);
    x_frozen_.resize(d);
    x_terminal_.resize(d);
}

void PathSampler::correlated_block(CounterRng& rng, std::vector<double>& out) {
    const int d = model_->d;
    for (int i = 0; i < d; ++i) g_[i] = rng.normal();
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += chol_[static_cast<std::size_t>(i) * d + j] * g_[j];
        out[i] = acc;
    }
}

PathSampler::Draw PathSampler::sample(double s, std::span<const double> y, double u01,
                                      CounterRng& rng) {
    const int d = model_->d;
    const double horizon = model_->maturity;
    if (!(s < horizon)) throw std::invalid_argument("PathSampler: start time must precede maturity");
    const double t_mid = s + (horizon - s) * u01;

    if (exact()) {
        correlated_block(rng, inc_a_);
        correlated_block(rng, inc_b_);
        const double sq1 = std::sqrt(t_mid - s);
        const double sq2 = std::sqrt(horizon - t_mid);
        for (int i = 0; i < d; ++i) {
            const double vol = model_->sigma[i];
            const double b = model_->rate - model_->dividends[i] - 0.5 * vol * vol;
            x_mid_[i] = y[i] + b * (t_mid - s) + vol * sq1 * inc_a_[i];
            x_terminal_[i] = x_mid_[i] + b * (horizon - t_mid) + vol * sq2 * inc_b_[i];
        }
        x_frozen_ = x_mid_;
        return {t_mid, t_mid, x_mid_, x_frozen_, x_terminal_};
    }

    const double h = (horizon - s) / steps_;
    int j = static_cast<int>(u01 * steps_);
    if (j > steps_ - 1) j = steps_ - 1;
    const double sqh = std::sqrt(h);

    std::vector<double>& x = x_terminal_; // evolves in place, ends at maturity
    x.assign(y.begin(), y.end());

    for (int m = 0; m < j; ++m) {
        const double tau = s + m * h;
        correlated_block(rng, inc_a_);
        for (int i = 0; i < d; ++i) {
            const double vol = model_->asset_vol(i, tau, x[i]);
            x[i] += (model_->rate - model_->dividends[i] - 0.5 * vol * vol) * h + vol * sqh * inc_a_[i];
        }
    }

    const double t_frozen = s + j * h;
    x_frozen_ = x;
    const double dt1 = t_mid - t_frozen;
    const double dt2 = (s + (j + 1) * h) - t_mid;
    const double sq1 = std::sqrt(std::max(dt1, 0.0));
    const double sq2 = std::sqrt(std::max(dt2, 0.0));
    correlated_block(rng, inc_a_);
    correlated_block(rng, inc_b_);
    for (int i = 0; i < d; ++i) {
        const double vol = model_->asset_vol(i, t_frozen, x_frozen_[i]);
        const double b = model_->rate - model_->dividends[i] - 0.5 * vol * vol;
        x_mid_[i] = x_frozen_[i] + b * dt1 + vol * sq1 * inc_a_[i];
        x[i] = x_frozen_[i] + b * h + vol * (sq1 * inc_a_[i] + sq2 * inc_b_[i]);
    }

    for (int m = j + 1; m < steps_; ++m) {
        const double tau = s + m * h;
        correlated_block(rng, inc_a_);
        for (int i = 0; i < d; ++i) {
            const double vol = model_->asset_vol(i, tau, x[i]);
            x[i] += (model_->rate - model_->dividends[i] - 0.5 * vol * vol) * h + vol * sqh * inc_a_[i];
        }
    }

    return {t_mid, t_frozen, x_mid_, x_frozen_, x_terminal_};
}

CorrectionKernel::CorrectionKernel(const ModelSpec& model, const Payoff& payoff,
                                   const SparseBasis& basis, double omega, int euler_steps)
    : model_(&model), payoff_(&payoff), basis_(&basis),
      driver_{&model, &payoff, omega}, euler_steps_(euler_steps) {
    const int d = model.d;
    corr_.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) corr_[static_cast<std::size_t>(i) * d + j] = i == j ? 1.0 : model.rho;
}

CorrectionKernel::Workspace CorrectionKernel::make_workspace() const {
    return {basis_->make_workspace(), PathSampler(*model_, euler_steps_),
            std::vector<double>(model_->d, 0.0)};
}

double CorrectionKernel::sample(double s, std::span<const double> y, std::span<const double> alpha,
                                CounterRng& rng, Workspace& ws) const {
    const double u01 = rng.uniform01();
    const int d = model_->d;
    auto g1 = [&](const PathPoint& pt) {
        double u_val, du_dt;
        basis_->eval_all(alpha, pt.t, pt.x, ws.basis, u_val, du_dt);
        double f = -model_->r(pt.t) * u_val;
        if (driver_.omega != 0.0) f += driver_.omega * std::max(payoff_->value(pt.x) - u_val, 0.0);

        // generator with coefficients frozen at (t_frozen, x_frozen)
        double lin = 0.0;
        double quad = 0.0;
        const double* hess = ws.basis.hess.data();
        for (int i = 0; i < d; ++i) {
            const double vol_i = model_->asset_vol(i, pt.t_frozen, pt.x_frozen[i]);
            ws.vols[i] = vol_i;
            lin += (model_->rate - model_->dividends[i] - 0.5 * vol_i * vol_i) * ws.basis.grad[i];
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                quad += ws.vols[i] * ws.vols[j] * corr_[static_cast<std::size_t>(i) * d + j] *
                        hess[static_cast<std::size_t>(i) * d + j];
        return f + du_dt + lin + 0.5 * quad;
    };
    auto g2 = [&](std::span<const double> x_T) {
        return payoff_->value(x_T) - basis_->eval_value(alpha, model_->maturity, x_T, ws.basis);
    };
    return psi_n(ws.paths, s, y, u01, g1, g2, rng);
}

CorrectionKernel::PointResult CorrectionKernel::correction_at_point(
    double s, std::span<const double> y, std::span<const double> alpha, int m_samples,
    CounterRng rng, Workspace& ws) const {
    if (m_samples < 1) throw std::invalid_argument("correction_at_point: need at least one sample");
    double mean = 0.0;
    double m2 = 0.0;
    for (int m = 0; m < m_samples; ++m) {
        const double a = sample(s, y, alpha, rng, ws);
        if (!std::isfinite(a))
            throw std::runtime_error("non-finite correction sample at m=" + std::to_string(m));
        const double delta = a - mean;
        mean += delta / (m + 1);
        m2 += delta * (a - mean);
    }
    PointResult out;
    out.c = mean;
    out.sample_variance = m_samples > 1 ? m2 / (m_samples - 1) : 0.0;
    return out;
}

namespace {

ModelSpec validated(ModelSpec model) {
    model.validate();
    return model;
}

SolverParams validated(SolverParams params) {
    params.validate();
    return params;
}

} // namespace

PicardSolver::PicardSolver(ModelSpec model, Payoff payoff, SolverParams params)
    : model_(validated(std::move(model))), payoff_(payoff), params_(validated(params)),
      basis_(terminal_domain(model_, params.kappa), params.eta, params.q),
      kernel_(model_, payoff_, basis_, params.omega, params.euler_steps) {}

std::vector<std::string> PicardSolver::warnings() const {
    std::vector<std::string> w;
    if (static_cast<std::size_t>(params_.grid_points) < basis_.size())
        w.push_back("solver.grid_points: fewer grid points (" + std::to_string(params_.grid_points) +
                    ") than basis functions (" + std::to_string(basis_.size()) +
                    "); the fit will be underdetermined");
    return w;
}

PicardState PicardSolver::initial_state() const {
    PicardState st;
    st.iteration = 0;
    st.alpha.assign(basis_.size(), 0.0);
    return st;
}

void PicardSolver::step(PicardState& st) const {
    const auto t_start = std::chrono::steady_clock::now();
    const auto k = static_cast<std::uint32_t>(st.iteration);
    const int n = params_.grid_points;

    st.points = sample_grid(k, n, basis_.domain(), derive_stream(params_.seed, {k, 0}, StreamKind::grid));

    st.evaluations.resize(n);
    for (int i = 0; i < n; ++i)
        st.evaluations[i] = basis_.eval(st.alpha, st.points.t[i], st.points.x(i));

    const auto x0 = model_.log_spot();
    const int d = model_.d;
    const double h = params_.delta_fd_step;

    // tasks beyond the grid: n is the spot value probe, n+1+i the delta probe
    // of coordinate i (both bumps of a pair replay one stream)
    std::vector<double> variances(n, 0.0);
    st.corrections.assign(n, 0.0);
    CorrectionKernel::PointResult spot;
    std::vector<double> delta_fd(d, 0.0);
    run_farm(static_cast<std::size_t>(n) + 1 + d, params_.workers, [&](std::size_t i) {
        auto rng = derive_stream(params_.seed, {k, static_cast<std::uint32_t>(i)}, StreamKind::correction);
        auto ws = kernel_.make_workspace();
        if (i < static_cast<std::size_t>(n)) {
            const auto res = kernel_.correction_at_point(st.points.t[i], st.points.x(i), st.alpha,
                                                         params_.mc_samples, rng, ws);
            st.corrections[i] = res.c;
            variances[i] = res.sample_variance;
        } else if (i == static_cast<std::size_t>(n)) {
            spot = kernel_.correction_at_point(0.0, x0, st.alpha, params_.mc_samples, rng, ws);
        } else {
            const int c = static_cast<int>(i) - n - 1;
            std::vector<double> bumped = x0;
            bumped[c] = x0[c] + h;
            const double up = basis_.eval(st.alpha, 0.0, bumped) +
                              kernel_.correction_at_point(0.0, bumped, st.alpha, params_.mc_samples,
                                                          rng, ws).c;
            bumped[c] = x0[c] - h;
            auto rng_replay = derive_stream(params_.seed, {k, static_cast<std::uint32_t>(i)},
                                            StreamKind::correction);
            const double down = basis_.eval(st.alpha, 0.0, bumped) +
                                kernel_.correction_at_point(0.0, bumped, st.alpha, params_.mc_samples,
                                                            rng_replay, ws).c;
            // dV/dS_c = (du/dx_c) / S_c
            delta_fd[c] = (up - down) / (2.0 * h) / model_.s0[c];
        }
    });

    const double u_spot = basis_.eval(st.alpha, 0.0, x0);
    std::vector<double> targets(n);
    for (int i = 0; i < n; ++i) targets[i] = st.evaluations[i] + st.corrections[i];
    st.alpha = fit(basis_, st.points, targets);
    st.iteration += 1;

    IterationRecord rec;
    rec.k = st.iteration;
    rec.y0 = u_spot + spot.c;
    rec.y0_std_error = std::sqrt(spot.sample_variance / params_.mc_samples);
    rec.delta = std::move(delta_fd);
    double var_sum = 0.0;
    for (double v : variances) var_sum += v;
    rec.avg_sample_variance = var_sum / n;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    st.history.push_back(std::move(rec));
}

PicardState PicardSolver::run() const {
    PicardState st = initial_state();
    for (int k = 0; k < params_.iterations; ++k) step(st);
    return st;
}

PriceDelta PicardSolver::price_delta(std::span<const double> alpha) const {
    const auto x0 = model_.log_spot();
    PriceDelta pd;
    pd.y0 = basis_.eval(alpha, 0.0, x0);
    pd.delta.resize(model_.d);
    basis_.eval_grad_x(alpha, 0.0, x0, pd.delta);
    // hedge ratio in shares: dV/dS_i = (du/dx_i) / S_i
    for (int i = 0; i < model_.d; ++i) pd.delta[i] /= model_.s0[i];
    return pd;
}

} // namespace bsde
