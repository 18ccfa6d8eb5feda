#include "bsde/least_squares.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace bsde {

ChaosCoefficients fit_design(std::size_t n, std::size_t p, std::span<const double> design,
                             std::span<const double> values, double ridge) {
    if (n == 0) throw std::invalid_argument("fit: need at least one sample");
    if (design.size() != n * p) throw std::invalid_argument("fit: design matrix size mismatch");
    if (values.size() != n) throw std::invalid_argument("fit: one value per row required");
    if (ridge < 0.0) throw std::invalid_argument("fit: ridge must be >= 0");
    for (double v : values)
        if (!std::isfinite(v)) throw std::runtime_error("fit: non-finite sample value");

    const std::size_t rows = ridge > 0.0 ? n + p : n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < p; ++l) a(i, l) = design[i * p + l];
        rhs(i) = values[i];
    }
    if (ridge > 0.0) {
        const double s = std::sqrt(ridge);
        for (std::size_t l = 0; l < p; ++l) a(n + l, l) = s;
    }

    if (a.lpNorm<Eigen::Infinity>() == 0.0)
        throw std::runtime_error("fit: degenerate design matrix (all basis values zero)");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    Eigen::VectorXd alpha = svd.solve(rhs);

    ChaosCoefficients out(p);
    for (std::size_t l = 0; l < p; ++l) {
        if (!std::isfinite(alpha(l))) throw std::runtime_error("fit: non-finite coefficient produced");
        out[l] = alpha(l);
    }
    return out;
}

ChaosCoefficients fit(const SparseBasis& basis, const PointSet& points,
                      std::span<const double> values, double ridge) {
    const std::size_t n = points.size();
    const std::size_t p = basis.size();
    if (n == 0) throw std::invalid_argument("fit: need at least one sample");
    if (points.d != basis.spatial_dim())
        throw std::invalid_argument("fit: point dimension does not match basis");

    std::vector<double> design(n * p);
    for (std::size_t i = 0; i < n; ++i)
        basis.basis_row(points.t[i], points.x(i), std::span<double>(design.data() + i * p, p));
    return fit_design(n, p, design, values, ridge);
}

} // namespace bsde
