#pragma once

#include <span>
#include <string>
#include <vector>

#include "bsde/chaos_basis.hpp"
#include "bsde/rng.hpp"

namespace bsde {

enum class ModelKind { BlackScholes, Dupire };

// Market description. The state variable throughout the solver is the vector
// of log-returns X_i = log S_i; drift and diffusion below are expressed in
// those coordinates. Immutable after construction.
struct ModelSpec {
    ModelKind kind = ModelKind::BlackScholes;
    int d = 1;
    std::vector<double> s0;        // initial prices
    double rate = 0.0;             // constant short rate, 1/years
    std::vector<double> dividends; // per asset
    std::vector<double> sigma;     // per-asset volatilities (Black-Scholes only)
    double rho = 0.0;              // common pairwise correlation
    double maturity = 0.0;         // T, years

    double r(double /*t*/) const { return rate; }
    double dividend(int i, double /*t*/) const { return dividends[i]; }

    /// Dupire smile: 0.6 (1.2 - e^{-0.1 t} e^{-0.001 (price e^{r t} - spot)^2}) e^{-0.05 sqrt(t)}
    double local_vol(double t, double price, double spot) const;

    /// Scalar diffusion of asset i at (t, x) in log coordinates.
    double asset_vol(int i, double t, double log_price) const;

    /// Drift of X_i at (t, x): r - delta_i - vol_i(t, e^{x_i})^2 / 2.
    double drift(int i, double t, double log_price) const;

    std::vector<double> log_spot() const;

    /// All violated invariants, one message each; empty when valid.
    std::vector<std::string> check() const;
    void validate() const; // throws std::invalid_argument listing violations
};

/// Lower-triangular Cholesky factor (row-major d x d) of the equicorrelation
/// matrix C = rho + (1-rho) I. Requires rho in (-1/(d-1), 1).
std::vector<double> cholesky_correlation(int d, double rho);

// Correlated Brownian motion sampled on a time grid; values holds W_{t_j}
// row-major (grid point major), Cov(W_t) = C t.
struct BrownianPath {
    std::vector<double> times;
    std::vector<double> values; // times.size() x d
};

/// W_{t_j} = sum_{m<=j} sqrt(t_m - t_{m-1}) L G_m with t_0 = 0. normals is
/// row-major (step major), one d-vector of iid standard normals per grid time.
BrownianPath sample_brownian(const ModelSpec& model, std::span<const double> grid,
                             std::span<const double> normals);

// Forward path states at the grid times, row-major (time major).
struct PathSample {
    std::vector<double> times;
    std::vector<double> x;
};

/// Euler scheme for the log-return SDE from (s, y) along the given grid, with
/// drift and diffusion frozen at the left grid time of each step. The
/// Brownian path must be sampled on the grid shifted to start at zero (times
/// relative to s), so its first value is the increment over [s, grid[0]].
PathSample simulate_euler(const ModelSpec& model, double s, std::span<const double> y,
                          std::span<const double> grid, const BrownianPath& brownian);

/// Exact lognormal sampling of X at the intermediate time u and at maturity,
/// Black-Scholes only. g1 and g2 are the iid standard normal vectors driving
/// the two increments.
void sample_exact_bs(const ModelSpec& model, double s, std::span<const double> y, double u,
                     std::span<const double> g1, std::span<const double> g2,
                     std::span<double> x_u, std::span<double> x_T);

enum class PayoffKind { PutBasket, CallBasket, Constant };

double payoff_put_basket(double strike, std::span<const double> x);
double payoff_call_basket(double strike, std::span<const double> x);

// Terminal payoff in log coordinates. Constant pays the strike regardless of
// the state (a degenerate case useful for exactness checks).
struct Payoff {
    PayoffKind kind = PayoffKind::PutBasket;
    double strike = 0.0;

    double value(std::span<const double> x) const {
        switch (kind) {
            case PayoffKind::PutBasket: return payoff_put_basket(strike, x);
            case PayoffKind::CallBasket: return payoff_call_basket(strike, x);
            default: return strike;
        }
    }
};

/// Spatial box covering the terminal log-return distribution: per coordinate
/// mean +- kappa standard deviations under the model's lognormal (Gaussian in
/// log coordinates) approximation with coefficients frozen at the spot.
DomainBox terminal_domain(const ModelSpec& model, double kappa);

} // namespace bsde
