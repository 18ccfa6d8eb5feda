#include "bsde/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bsde/task_farm.hpp"

namespace bsde {

namespace {

struct BatchMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
    long count = 0;
};

constexpr long kBatchSize = 16384;

} // namespace

McEstimate mc_european_price(const ModelSpec& model, const Payoff& payoff, long samples,
                             std::uint64_t seed, int workers, int euler_steps) {
    model.validate();
    if (samples < 2) throw std::invalid_argument("mc_european_price: need at least two samples");
    if (euler_steps < 1) throw std::invalid_argument("mc_european_price: need at least one Euler step");

    const int d = model.d;
    const auto chol = cholesky_correlation(d, model.rho);
    const auto x0 = model.log_spot();
    const double horizon = model.maturity;
    const long batches = (samples + kBatchSize - 1) / kBatchSize;

    auto run_batch = [&](std::size_t b) {
        const long begin = static_cast<long>(b) * kBatchSize;
        const long count = std::min(kBatchSize, samples - begin);
        auto rng = derive_stream(seed, {0, static_cast<std::uint32_t>(b)}, StreamKind::oracle);
        std::vector<double> g(d), x(d);
        BatchMoments m;
        if (model.kind == ModelKind::BlackScholes) {
            const double sqT = std::sqrt(horizon);
            for (long s = 0; s < count; ++s) {
                for (int i = 0; i < d; ++i) g[i] = rng.normal();
                for (int i = 0; i < d; ++i) {
                    double inc = 0.0;
                    for (int j = 0; j <= i; ++j) inc += chol[static_cast<std::size_t>(i) * d + j] * g[j];
                    const double vol = model.sigma[i];
                    x[i] = x0[i] + (model.rate - model.dividends[i] - 0.5 * vol * vol) * horizon +
                           vol * sqT * inc;
                }
                const double phi = payoff.value(x);
                m.sum += phi;
                m.sum_sq += phi * phi;
            }
        } else {
            const double h = horizon / euler_steps;
            const double sqh = std::sqrt(h);
            for (long s = 0; s < count; ++s) {
                x = x0;
                for (int step = 0; step < euler_steps; ++step) {
                    const double tau = step * h;
                    for (int i = 0; i < d; ++i) g[i] = rng.normal();
                    for (int i = 0; i < d; ++i) {
                        double inc = 0.0;
                        for (int j = 0; j <= i; ++j) inc += chol[static_cast<std::size_t>(i) * d + j] * g[j];
                        const double vol = model.asset_vol(i, tau, x[i]);
                        x[i] += (model.rate - model.dividends[i] - 0.5 * vol * vol) * h + vol * sqh * inc;
                    }
                }
                const double phi = payoff.value(x);
                m.sum += phi;
                m.sum_sq += phi * phi;
            }
        }
        m.count = count;
        return m;
    };

    const auto moments = run_farm_collect<BatchMoments>(static_cast<std::size_t>(batches), workers, run_batch);

    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    for (const auto& m : moments) {
        sum += m.sum;
        sum_sq += m.sum_sq;
        count += m.count;
    }
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq / count - mean * mean) * count / (count - 1));
    const double discount = std::exp(-model.rate * horizon);

    McEstimate est;
    est.price = discount * mean;
    est.half_width = 1.96 * discount * std::sqrt(var / count);
    est.samples = count;
    return est;
}

double bs_closed_form(double s0, double strike, double r, double dividend, double sigma,
                      double maturity, PayoffKind kind) {
    if (!(s0 > 0.0 && strike > 0.0 && sigma > 0.0 && maturity > 0.0))
        throw std::invalid_argument("bs_closed_form: spot, strike, sigma and maturity must be positive");
    const double sq = sigma * std::sqrt(maturity);
    const double d1 = (std::log(s0 / strike) + (r - dividend + 0.5 * sigma * sigma) * maturity) / sq;
    const double d2 = d1 - sq;
    const double fwd = s0 * std::exp(-dividend * maturity);
    const double disc_k = strike * std::exp(-r * maturity);
    switch (kind) {
        case PayoffKind::CallBasket: return fwd * normal_cdf(d1) - disc_k * normal_cdf(d2);
        case PayoffKind::PutBasket: return disc_k * normal_cdf(-d2) - fwd * normal_cdf(-d1);
        default: throw std::invalid_argument("bs_closed_form: kind must be put or call");
    }
}

} // namespace bsde
