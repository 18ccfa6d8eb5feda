#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace bsde {

// Philox4x32-10 counter-based generator (Salmon et al., Random123). A stream
// is identified by a 64-bit key (the master seed) plus a 64-bit stream prefix
// occupying the two high counter words; the two low counter words enumerate
// blocks within the stream. Distinct prefixes own disjoint counter blocks, so
// streams never overlap and derivation is collision-free by construction.
class CounterRng {
public:
    CounterRng(std::uint64_t master_seed, std::uint32_t stream_lo, std::uint32_t stream_hi)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          prefix_lo_(stream_lo), prefix_hi_(stream_hi) {}

    std::uint64_t next_u64() {
        if (word_ == 0) {
            generate_block();
            word_ = 4;
        }
        const int base = 4 - word_;
        word_ -= 2;
        return static_cast<std::uint64_t>(buf_[base]) |
               (static_cast<std::uint64_t>(buf_[base + 1]) << 32);
    }

    // Uniform draw on the open interval (0,1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via the inverse distribution function.
    double normal() { return normal_inv_cdf(uniform01()); }

    void fill_normals(std::span<double> out) {
        for (double& v : out) v = normal();
    }

    // Acklam's rational approximation of the standard normal quantile
    // (relative error below 1.2e-9, ample for Monte-Carlo use).
    static double normal_inv_cdf(double p);

private:
    void generate_block();

    std::uint32_t key0_, key1_;
    std::uint32_t prefix_lo_, prefix_hi_;
    std::uint64_t block_ = 0;
    std::uint32_t buf_[4] = {};
    int word_ = 0;
};

// Raw Philox4x32-10 block function, exposed for known-answer tests.
void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2], std::uint32_t out[4]);

inline void CounterRng::generate_block() {
    const std::uint32_t ctr[4] = {static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  prefix_lo_, prefix_hi_};
    const std::uint32_t key[2] = {key0_, key1_};
    philox4x32_10(ctr, key, buf_);
    ++block_;
}

// Standard normal cumulative distribution function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

} // namespace bsde
