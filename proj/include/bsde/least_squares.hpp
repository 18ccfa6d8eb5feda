#pragma once

#include <span>
#include <vector>

#include "bsde/chaos_basis.hpp"

namespace bsde {

using ChaosCoefficients = std::vector<double>;

// Scattered evaluation points, structure-of-arrays: coords is row-major n x d.
struct PointSet {
    std::vector<double> t;
    std::vector<double> coords;
    int d = 0;

    std::size_t size() const { return t.size(); }
    std::span<const double> x(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
};

/// Minimizer of sum_i |y_i - sum_l alpha_l B_l(t_i, x_i)|^2 via a
/// rank-revealing singular value decomposition; singular values below
/// 1e-10 x (largest) are treated as zero, and rank-deficient designs yield the
/// minimum-norm solution. An optional ridge term lambda >= 0 augments the
/// system (default off).
ChaosCoefficients fit(const SparseBasis& basis, const PointSet& points,
                      std::span<const double> values, double ridge = 0.0);

/// Core solve on an assembled design matrix (row-major n x p).
ChaosCoefficients fit_design(std::size_t n, std::size_t p, std::span<const double> design,
                             std::span<const double> values, double ridge = 0.0);

} // namespace bsde
