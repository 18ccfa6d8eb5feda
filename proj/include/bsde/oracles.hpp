#pragma once

#include <cstdint>

#include "bsde/market_models.hpp"

namespace bsde {

// Monte-Carlo price with a symmetric 95% confidence interval.
struct McEstimate {
    double price = 0.0;
    double half_width = 0.0;
    long samples = 0;

    double ci_low() const { return price - half_width; }
    double ci_high() const { return price + half_width; }
};

/// Plain Monte-Carlo European price: discounted mean of the terminal payoff,
/// with exact terminal sampling under Black-Scholes and a fine Euler scheme
/// (euler_steps >= 100 recommended) under Dupire. Batches may run on the task
/// farm; the estimate is identical for any worker count.
McEstimate mc_european_price(const ModelSpec& model, const Payoff& payoff, long samples,
                             std::uint64_t seed, int workers = 1, int euler_steps = 200);

/// One-asset Black-Scholes closed form (kind: PutBasket or CallBasket).
double bs_closed_form(double s0, double strike, double r, double dividend, double sigma,
                      double maturity, PayoffKind kind);

} // namespace bsde
