#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "bsde/least_squares.hpp"
#include "bsde/rng.hpp"
#include "test_support.hpp"

using namespace bsde;
using bsde::testing::jacobi_pinv_solve;

TEST_SUITE_BEGIN("least_squares");

namespace {

DomainBox box3() {
    DomainBox box;
    box.horizon = 1.0;
    box.lower = {-1.0, -1.0};
    box.upper = {1.0, 1.0};
    return box;
}

PointSet random_points(const DomainBox& box, int n, CounterRng& rng) {
    PointSet pts;
    pts.d = box.dim();
    pts.t.resize(n);
    pts.coords.resize(static_cast<std::size_t>(n) * pts.d);
    for (int i = 0; i < n; ++i) {
        pts.t[i] = box.horizon * rng.uniform01();
        for (int c = 0; c < pts.d; ++c)
            pts.coords[static_cast<std::size_t>(i) * pts.d + c] =
                box.lower[c] + (box.upper[c] - box.lower[c]) * rng.uniform01();
    }
    return pts;
}

double residual_norm(const SparseBasis& basis, const PointSet& pts,
                     std::span<const double> values, std::span<const double> alpha) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = values[i] - basis.eval(alpha, pts.t[i], pts.x(i));
        acc += r * r;
    }
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("exact data in the span is recovered") {
    SparseBasis basis(box3(), 2, 1.0);
    CounterRng rng(5, 0, 0);
    const int n = 60;
    auto pts = random_points(basis.domain(), n, rng);

    std::vector<double> alpha_star(basis.size());
    for (double& a : alpha_star) a = rng.normal();
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = basis.eval(alpha_star, pts.t[i], pts.x(i));

    const auto alpha = fit(basis, pts, values);
    double norm_y = 0.0;
    for (double y : values) norm_y += y * y;
    CHECK(residual_norm(basis, pts, values, alpha) <= 1e-8 * std::sqrt(norm_y));
    for (std::size_t l = 0; l < basis.size(); ++l)
        CHECK(alpha[l] == doctest::Approx(alpha_star[l]).epsilon(1e-7));
}

TEST_CASE("constant samples load the constant polynomial only") {
    SparseBasis basis(box3(), 2, 1.0);
    CounterRng rng(6, 0, 0);
    auto pts = random_points(basis.domain(), 40, rng);
    std::vector<double> values(40, 4.2);
    const auto alpha = fit(basis, pts, values);
    CHECK(alpha[0] == doctest::Approx(4.2).epsilon(1e-10));
    for (std::size_t l = 1; l < basis.size(); ++l)
        CHECK(alpha[l] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("duplicated columns fall back to the minimum-norm pseudo-inverse solution") {
    // 10 x 4 instance with column 3 duplicating column 2
    const int m = 10, n = 4;
    CounterRng rng(7, 0, 0);
    std::vector<double> design(m * n);
    std::vector<double> values(m);
    for (int i = 0; i < m; ++i) {
        design[i * n + 0] = 1.0;
        design[i * n + 1] = rng.normal();
        design[i * n + 2] = design[i * n + 1];
        design[i * n + 3] = rng.normal();
        values[i] = rng.normal();
    }
    const auto alpha = fit_design(m, n, design, values);
    const auto oracle = jacobi_pinv_solve(m, n, design, values);
    for (int l = 0; l < n; ++l)
        CHECK(alpha[l] == doctest::Approx(oracle[l]).epsilon(1e-8));
    // identical columns share the weight in the minimum-norm solution
    CHECK(alpha[1] == doctest::Approx(alpha[2]).epsilon(1e-8));
}

TEST_CASE("rank-deficient design built from degenerate points matches the oracle") {
    SparseBasis basis(box3(), 2, 1.0);
    CounterRng rng(8, 0, 0);
    const int n = 12;
    PointSet pts;
    pts.d = 2;
    pts.t.resize(n);
    pts.coords.resize(n * 2);
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) {
        pts.t[i] = rng.uniform01();
        pts.coords[i * 2] = 0.37; // all points share x1: spatial columns collapse
        pts.coords[i * 2 + 1] = 0.37;
        values[i] = rng.normal();
    }
    std::vector<double> design(n * basis.size());
    for (int i = 0; i < n; ++i)
        basis.basis_row(pts.t[i], pts.x(i),
                        std::span<double>(design.data() + i * basis.size(), basis.size()));
    const auto alpha = fit(basis, pts, values);
    const auto oracle = jacobi_pinv_solve(n, static_cast<int>(basis.size()), design, values);
    for (std::size_t l = 0; l < basis.size(); ++l)
        CHECK(alpha[l] == doctest::Approx(oracle[l]).scale(1.0).epsilon(1e-8));
}

TEST_CASE("perturbing the solution never lowers the residual") {
    SparseBasis basis(box3(), 2, 1.0);
    CounterRng rng(9, 0, 0);
    for (int instance = 0; instance < 20; ++instance) {
        auto pts = random_points(basis.domain(), 30, rng);
        std::vector<double> values(30);
        for (double& v : values) v = rng.normal();
        const auto alpha = fit(basis, pts, values);
        const double base = residual_norm(basis, pts, values, alpha);
        for (std::size_t l = 0; l < basis.size(); ++l) {
            for (double bump : {1e-4, -1e-4}) {
                auto perturbed = alpha;
                perturbed[l] += bump;
                CHECK(residual_norm(basis, pts, values, perturbed) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("error paths") {
    SparseBasis basis(box3(), 2, 1.0);
    CounterRng rng(10, 0, 0);
    auto pts = random_points(basis.domain(), 5, rng);

    std::vector<double> bad(5, 1.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS((void)fit(basis, pts, bad), std::runtime_error);

    std::vector<double> zero_design(5 * 3, 0.0);
    std::vector<double> values(5, 1.0);
    CHECK_THROWS_AS((void)fit_design(5, 3, zero_design, values), std::runtime_error);

    CHECK_THROWS_AS((void)fit(basis, PointSet{}, std::vector<double>{}), std::invalid_argument);
}

TEST_SUITE_END();
