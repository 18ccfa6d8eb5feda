#include "bsde/market_models.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bsde {

double ModelSpec::local_vol(double t, double price, double spot) const {
    const double fwd_gap = price * std::exp(rate * t) - spot;
    const double smile = std::exp(-0.1 * t) * std::exp(-0.001 * fwd_gap * fwd_gap);
    return 0.6 * (1.2 - smile) * std::exp(-0.05 * std::sqrt(t));
}

double ModelSpec::asset_vol(int i, double t, double log_price) const {
    if (kind == ModelKind::BlackScholes) return sigma[i];
    return local_vol(t, std::exp(log_price), s0[i]);
}

double ModelSpec::drift(int i, double t, double log_price) const {
    const double v = asset_vol(i, t, log_price);
    return rate - dividends[i] - 0.5 * v * v;
}

std::vector<double> ModelSpec::log_spot() const {
    std::vector<double> x(s0.size());
    for (std::size_t i = 0; i < s0.size(); ++i) x[i] = std::log(s0[i]);
    return x;
}

std::vector<std::string> ModelSpec::check() const {
    std::vector<std::string> bad;
    if (d < 1) bad.push_back("model.d: asset count must be >= 1");
    if (static_cast<int>(s0.size()) != d) bad.push_back("model.S0: expected one entry per asset");
    for (double v : s0)
        if (!(v > 0.0)) {
            bad.push_back("model.S0: initial prices must be positive");
            break;
        }
    if (!(maturity > 0.0)) bad.push_back("model.T: maturity must be positive");
    if (static_cast<int>(dividends.size()) != d) bad.push_back("model.dividends: expected one entry per asset");
    if (kind == ModelKind::BlackScholes) {
        if (static_cast<int>(sigma.size()) != d) {
            bad.push_back("model.sigma: expected one entry per asset");
        } else {
            for (double v : sigma)
                if (!(v > 0.0)) {
                    bad.push_back("model.sigma: volatilities must be positive");
                    break;
                }
        }
    }
    const double lo = d > 1 ? -1.0 / (d - 1) : -1.0;
    if (!(rho > lo && rho < 1.0)) {
        std::ostringstream os;
        os << "model.rho: correlation must lie in (" << lo << ", 1) for d=" << d;
        bad.push_back(os.str());
    }
    return bad;
}

void ModelSpec::validate() const {
    const auto bad = check();
    if (bad.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& m : bad) msg += "\n  " + m;
    throw std::invalid_argument(msg);
}

std::vector<double> cholesky_correlation(int d, double rho) {
    if (d < 1) throw std::invalid_argument("cholesky_correlation: d must be >= 1");
    const double lo = d > 1 ? -1.0 / (d - 1) : -1.0;
    if (!(rho > lo && rho < 1.0)) {
        std::ostringstream os;
        os << "cholesky_correlation: rho must lie in (" << lo << ", 1) for d=" << d;
        throw std::invalid_argument(os.str());
    }
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(d, d, rho);
    corr.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("cholesky_correlation: correlation matrix is not positive definite");
    Eigen::MatrixXd lower = llt.matrixL();
    std::vector<double> out(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) out[static_cast<std::size_t>(i) * d + j] = lower(i, j);
    return out;
}

BrownianPath sample_brownian(const ModelSpec& model, std::span<const double> grid,
                             std::span<const double> normals) {
    const int d = model.d;
    const std::size_t n = grid.size();
    if (n == 0) throw std::invalid_argument("sample_brownian: empty grid");
    double prev = 0.0;
    for (double t : grid) {
        if (!(t > prev)) throw std::invalid_argument("sample_brownian: grid must be strictly increasing and positive");
        prev = t;
    }
    if (normals.size() != n * static_cast<std::size_t>(d))
        throw std::invalid_argument("sample_brownian: need d normals per grid time");

    const auto chol = cholesky_correlation(d, model.rho);
    BrownianPath path;
    path.times.assign(grid.begin(), grid.end());
    path.values.assign(n * d, 0.0);

    std::vector<double> w(d, 0.0);
    prev = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double sqdt = std::sqrt(grid[m] - prev);
        const double* g = normals.data() + m * d;
        for (int i = 0; i < d; ++i) {
            double inc = 0.0;
            for (int j = 0; j <= i; ++j) inc += chol[static_cast<std::size_t>(i) * d + j] * g[j];
            w[i] += sqdt * inc;
            path.values[m * d + i] = w[i];
        }
        prev = grid[m];
    }
    return path;
}

PathSample simulate_euler(const ModelSpec& model, double s, std::span<const double> y,
                          std::span<const double> grid, const BrownianPath& brownian) {
    const int d = model.d;
    if (static_cast<int>(y.size()) != d) throw std::invalid_argument("simulate_euler: bad start dimension");
    if (grid.empty()) throw std::invalid_argument("simulate_euler: empty grid");
    if (brownian.times.size() != grid.size())
        throw std::invalid_argument("simulate_euler: Brownian path grid mismatch");
    double prev = s;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!(grid[j] > prev)) throw std::invalid_argument("simulate_euler: grid must increase from the start time");
        if (std::abs(brownian.times[j] - (grid[j] - s)) > 1e-9)
            throw std::invalid_argument("simulate_euler: Brownian path must be sampled on the grid relative to s");
        prev = grid[j];
    }

    PathSample out;
    out.times.assign(grid.begin(), grid.end());
    out.x.resize(grid.size() * d);

    std::vector<double> x(y.begin(), y.end());
    std::vector<double> w_prev(d, 0.0);
    double t_prev = s;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double dt = grid[m] - t_prev;
        // each asset's coefficients depend only on its own coordinate, so the
        // in-place update keeps them frozen at (t_prev, x_prev)
        for (int i = 0; i < d; ++i) {
            const double dw = brownian.values[m * d + i] - w_prev[i];
            x[i] += model.drift(i, t_prev, x[i]) * dt + model.asset_vol(i, t_prev, x[i]) * dw;
        }
        for (int i = 0; i < d; ++i) w_prev[i] = brownian.values[m * d + i];
        std::copy(x.begin(), x.end(), out.x.begin() + static_cast<std::ptrdiff_t>(m * d));
        t_prev = grid[m];
    }
    return out;
}

void sample_exact_bs(const ModelSpec& model, double s, std::span<const double> y, double u,
                     std::span<const double> g1, std::span<const double> g2,
                     std::span<double> x_u, std::span<double> x_T) {
    if (model.kind != ModelKind::BlackScholes)
        throw std::invalid_argument("sample_exact_bs: exact sampling requires a Black-Scholes model");
    const int d = model.d;
    if (!(u > s && u <= model.maturity))
        throw std::invalid_argument("sample_exact_bs: intermediate time must lie in (s, T]");

    const auto chol = cholesky_correlation(d, model.rho);
    const double sq1 = std::sqrt(u - s);
    const double sq2 = std::sqrt(model.maturity - u);
    for (int i = 0; i < d; ++i) {
        double c1 = 0.0, c2 = 0.0;
        for (int j = 0; j <= i; ++j) {
            c1 += chol[static_cast<std::size_t>(i) * d + j] * g1[j];
            c2 += chol[static_cast<std::size_t>(i) * d + j] * g2[j];
        }
        const double b = model.rate - model.dividends[i] - 0.5 * model.sigma[i] * model.sigma[i];
        x_u[i] = y[i] + b * (u - s) + model.sigma[i] * sq1 * c1;
        x_T[i] = x_u[i] + b * (model.maturity - u) + model.sigma[i] * sq2 * c2;
    }
}

double payoff_put_basket(double strike, std::span<const double> x) {
    double basket = 0.0;
    for (double v : x) basket += std::exp(v);
    basket /= static_cast<double>(x.size());
    return std::max(strike - basket, 0.0);
}

double payoff_call_basket(double strike, std::span<const double> x) {
    double basket = 0.0;
    for (double v : x) basket += std::exp(v);
    basket /= static_cast<double>(x.size());
    return std::max(basket - strike, 0.0);
}

DomainBox terminal_domain(const ModelSpec& model, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("terminal_domain: kappa must be positive");
    DomainBox box;
    box.horizon = model.maturity;
    box.lower.resize(model.d);
    box.upper.resize(model.d);
    for (int i = 0; i < model.d; ++i) {
        const double x0 = std::log(model.s0[i]);
        const double vol = model.asset_vol(i, 0.0, x0);
        const double mean = x0 + (model.rate - model.dividends[i] - 0.5 * vol * vol) * model.maturity;
        const double sd = vol * std::sqrt(model.maturity);
        box.lower[i] = mean - kappa * sd;
        box.upper[i] = mean + kappa * sd;
    }
    return box;
}

} // namespace bsde
