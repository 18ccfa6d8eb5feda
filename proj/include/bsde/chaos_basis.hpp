#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bsde {

// Degrees per variate; entry 0 is the time variate, entries 1..d the spatial ones.
using MultiIndex = std::vector<int>;

/// Enumerates the hyperbolic index set {nu : (sum_i nu_i^q)^(1/q) <= eta} in
/// graded lexicographic order (total degree ascending, then lexicographically
/// descending within a grade). q = 1 yields the full total-degree family.
std::vector<MultiIndex> hyperbolic_indices(int d_prime, int eta, double q);

// Box [0,T] x D on which the solution is represented. Spatial bounds are in
// log-price units.
struct DomainBox {
    double horizon = 0.0;          // T, years
    std::vector<double> lower;     // per spatial coordinate
    std::vector<double> upper;

    int dim() const { return static_cast<int>(lower.size()); }
    void validate() const;
};

// Sparse family of multivariate canonical monomials on the reference cube
// [-1,1]^(d+1). Points are mapped affinely coordinate by coordinate; points
// outside the box map outside the cube and are never clamped. Immutable after
// construction and safe for concurrent reads.
class SparseBasis {
public:
    SparseBasis(DomainBox domain, int eta, double q);

    std::size_t size() const { return indices_.size(); }      // p
    int dims() const { return static_cast<int>(scale_.size()); } // d' = d+1
    int spatial_dim() const { return dims() - 1; }
    int eta() const { return eta_; }
    double q() const { return q_; }
    const DomainBox& domain() const { return domain_; }
    const std::vector<MultiIndex>& indices() const { return indices_; }

    /// Affine map of (t, x) onto the reference cube; out has length d'.
    void map_to_reference(double t, std::span<const double> x, std::span<double> out) const;

    /// u(t,x) = sum_l alpha_l B_l(t,x)
    double eval(std::span<const double> alpha, double t, std::span<const double> x) const;

    /// Value at an already-mapped reference point (test hook).
    double eval_reference(std::span<const double> alpha, std::span<const double> z) const;

    /// Row of basis values (B_1,...,B_p) at one point, for design matrices.
    void basis_row(double t, std::span<const double> x, std::span<double> out) const;

    // Scratch space reused across evaluations of one thread.
    struct Workspace {
        std::vector<double> z;        // d'
        std::vector<double> pow;      // d' x (eta+1) power table
        std::vector<double> ref_grad; // d', gradient in reference coordinates
        std::vector<double> grad;     // d
        std::vector<double> hess;     // d x d, row-major
    };
    Workspace make_workspace() const;

    /// Value, time derivative, spatial gradient and Hessian in one pass.
    /// Derivatives are with respect to the original (unmapped) coordinates;
    /// results land in ws.grad / ws.hess.
    void eval_all(std::span<const double> alpha, double t, std::span<const double> x,
                  Workspace& ws, double& value, double& dt) const;

    /// Value-only evaluation reusing workspace buffers (hot path).
    double eval_value(std::span<const double> alpha, double t, std::span<const double> x,
                      Workspace& ws) const;

    void eval_grad_x(std::span<const double> alpha, double t, std::span<const double> x,
                     std::span<double> grad) const;
    void eval_hess_x(std::span<const double> alpha, double t, std::span<const double> x,
                     std::span<double> hess) const;
    double eval_dt(std::span<const double> alpha, double t, std::span<const double> x) const;

private:
    void check_alpha(std::span<const double> alpha) const;

    struct Term {
        std::uint16_t coord;
        std::uint16_t degree;
    };

    DomainBox domain_;
    int eta_;
    double q_;
    std::vector<MultiIndex> indices_;
    std::vector<Term> terms_;           // nonzero degrees, concatenated per index
    std::vector<std::uint32_t> offsets_; // size p+1 into terms_
    std::vector<double> mid_;           // per-coordinate map center (time first)
    std::vector<double> inv_half_;      // 1 / half-width
    std::vector<double> scale_;         // chain-rule factor dz/dv = inv_half_
};

} // namespace bsde
