#include "bsde/chaos_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bsde {

std::vector<MultiIndex> hyperbolic_indices(int d_prime, int eta, double q) {
    if (d_prime < 1) throw std::invalid_argument("hyperbolic_indices: d' must be >= 1");
    if (eta < 0) throw std::invalid_argument("hyperbolic_indices: eta must be >= 0");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("hyperbolic_indices: q must lie in (0,1]");

    // (sum nu_i^q)^(1/q) <= eta  <=>  sum nu_i^q <= eta^q
    std::vector<double> deg_pow(static_cast<std::size_t>(eta) + 1);
    for (int v = 0; v <= eta; ++v) deg_pow[v] = std::pow(static_cast<double>(v), q);
    const double budget = deg_pow[eta] * (1.0 + 1e-12) + 1e-12;

    std::vector<MultiIndex> out;
    MultiIndex current(d_prime, 0);
    auto recurse = [&](auto&& self, int pos, double acc) -> void {
        if (pos == d_prime) {
            out.push_back(current);
            return;
        }
        for (int v = 0; v <= eta; ++v) {
            const double next = acc + deg_pow[v];
            if (next > budget) break;
            current[pos] = v;
            self(self, pos + 1, next);
        }
        current[pos] = 0;
    };
    recurse(recurse, 0, 0.0);

    std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
        const int ga = std::accumulate(a.begin(), a.end(), 0);
        const int gb = std::accumulate(b.begin(), b.end(), 0);
        if (ga != gb) return ga < gb;
        return a > b; // lexicographically descending within a grade
    });
    return out;
}

void DomainBox::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("DomainBox: horizon must be positive");
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("DomainBox: bounds must be non-empty and of equal length");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("DomainBox: lower bound must be below upper bound");
}

SparseBasis::SparseBasis(DomainBox domain, int eta, double q)
    : domain_(std::move(domain)), eta_(eta), q_(q) {
    domain_.validate();
    const int d_prime = domain_.dim() + 1;
    indices_ = hyperbolic_indices(d_prime, eta, q);

    offsets_.reserve(indices_.size() + 1);
    offsets_.push_back(0);
    for (const MultiIndex& nu : indices_) {
        int nnz = 0;
        for (int c = 0; c < d_prime; ++c)
            if (nu[c] > 0) {
                terms_.push_back({static_cast<std::uint16_t>(c), static_cast<std::uint16_t>(nu[c])});
                ++nnz;
            }
        if (nnz > 16)
            throw std::invalid_argument("SparseBasis: more than 16 interacting variates is unsupported");
        offsets_.push_back(static_cast<std::uint32_t>(terms_.size()));
    }

    mid_.resize(d_prime);
    inv_half_.resize(d_prime);
    mid_[0] = 0.5 * domain_.horizon;
    inv_half_[0] = 2.0 / domain_.horizon;
    for (int i = 0; i < domain_.dim(); ++i) {
        mid_[i + 1] = 0.5 * (domain_.lower[i] + domain_.upper[i]);
        inv_half_[i + 1] = 2.0 / (domain_.upper[i] - domain_.lower[i]);
    }
    scale_ = inv_half_;
}

void SparseBasis::map_to_reference(double t, std::span<const double> x, std::span<double> out) const {
    out[0] = (t - mid_[0]) * inv_half_[0];
    for (int i = 0; i < domain_.dim(); ++i) out[i + 1] = (x[i] - mid_[i + 1]) * inv_half_[i + 1];
}

void SparseBasis::check_alpha(std::span<const double> alpha) const {
    if (alpha.size() != size())
        throw std::invalid_argument("SparseBasis: coefficient vector length does not match basis size");
}

SparseBasis::Workspace SparseBasis::make_workspace() const {
    Workspace ws;
    const int d = spatial_dim();
    ws.z.resize(dims());
    ws.pow.assign(static_cast<std::size_t>(dims()) * (eta_ + 1), 1.0);
    ws.ref_grad.resize(dims());
    ws.grad.resize(d);
    ws.hess.resize(static_cast<std::size_t>(d) * d);
    return ws;
}

namespace {

// pow table layout: row c holds z_c^0 .. z_c^eta
inline void fill_powers(std::span<const double> z, int stride, std::vector<double>& pw) {
    const int dims = static_cast<int>(z.size());
    for (int c = 0; c < dims; ++c) {
        double* row = pw.data() + static_cast<std::size_t>(c) * stride;
        row[0] = 1.0;
        for (int g = 1; g < stride; ++g) row[g] = row[g - 1] * z[c];
    }
}

} // namespace

double SparseBasis::eval_reference(std::span<const double> alpha, std::span<const double> z) const {
    check_alpha(alpha);
    const int stride = eta_ + 1;
    std::vector<double> pw(static_cast<std::size_t>(dims()) * stride);
    fill_powers(z, stride, pw);
    double acc = 0.0;
    for (std::size_t l = 0; l < indices_.size(); ++l) {
        double b = 1.0;
        for (std::uint32_t j = offsets_[l]; j < offsets_[l + 1]; ++j)
            b *= pw[static_cast<std::size_t>(terms_[j].coord) * stride + terms_[j].degree];
        acc += alpha[l] * b;
    }
    return acc;
}

double SparseBasis::eval(std::span<const double> alpha, double t, std::span<const double> x) const {
    check_alpha(alpha);
    std::vector<double> z(dims());
    map_to_reference(t, x, z);
    return eval_reference(alpha, z);
}

double SparseBasis::eval_value(std::span<const double> alpha, double t, std::span<const double> x,
                               Workspace& ws) const {
    const int stride = eta_ + 1;
    map_to_reference(t, x, ws.z);
    fill_powers(ws.z, stride, ws.pow);
    const double* pw = ws.pow.data();
    double acc = 0.0;
    for (std::size_t l = 0; l < indices_.size(); ++l) {
        const double a = alpha[l];
        if (a == 0.0) continue;
        double b = 1.0;
        for (std::uint32_t j = offsets_[l]; j < offsets_[l + 1]; ++j)
            b *= pw[static_cast<std::size_t>(terms_[j].coord) * stride + terms_[j].degree];
        acc += a * b;
    }
    return acc;
}

void SparseBasis::basis_row(double t, std::span<const double> x, std::span<double> out) const {
    if (out.size() != size())
        throw std::invalid_argument("SparseBasis: output row length does not match basis size");
    std::vector<double> z(dims());
    map_to_reference(t, x, z);
    const int stride = eta_ + 1;
    std::vector<double> pw(static_cast<std::size_t>(dims()) * stride);
    fill_powers(z, stride, pw);
    for (std::size_t l = 0; l < indices_.size(); ++l) {
        double b = 1.0;
        for (std::uint32_t j = offsets_[l]; j < offsets_[l + 1]; ++j)
            b *= pw[static_cast<std::size_t>(terms_[j].coord) * stride + terms_[j].degree];
        out[l] = b;
    }
}

void SparseBasis::eval_all(std::span<const double> alpha, double t, std::span<const double> x,
                           Workspace& ws, double& value, double& dt) const {
    check_alpha(alpha);
    const int d = spatial_dim();
    const int stride = eta_ + 1;
    map_to_reference(t, x, ws.z);
    fill_powers(ws.z, stride, ws.pow);

    value = 0.0;
    std::fill(ws.ref_grad.begin(), ws.ref_grad.end(), 0.0);
    std::fill(ws.hess.begin(), ws.hess.end(), 0.0);
    const double* pw = ws.pow.data();

    for (std::size_t l = 0; l < indices_.size(); ++l) {
        const double a = alpha[l];
        if (a == 0.0) continue;
        const std::uint32_t begin = offsets_[l], end = offsets_[l + 1];
        const std::uint32_t nnz = end - begin;

        double factors[16];
        double prod = 1.0;
        for (std::uint32_t j = 0; j < nnz; ++j) {
            const Term& tm = terms_[begin + j];
            factors[j] = pw[static_cast<std::size_t>(tm.coord) * stride + tm.degree];
            prod *= factors[j];
        }
        value += a * prod;

        for (std::uint32_t j = 0; j < nnz; ++j) {
            const Term& tj = terms_[begin + j];
            double others = 1.0;
            for (std::uint32_t m = 0; m < nnz; ++m)
                if (m != j) others *= factors[m];
            const double dj = tj.degree * pw[static_cast<std::size_t>(tj.coord) * stride + tj.degree - 1];
            ws.ref_grad[tj.coord] += a * dj * others;

            if (tj.coord >= 1) {
                // diagonal second derivative
                if (tj.degree >= 2) {
                    const double d2 = static_cast<double>(tj.degree) * (tj.degree - 1) *
                                      pw[static_cast<std::size_t>(tj.coord) * stride + tj.degree - 2];
                    ws.hess[static_cast<std::size_t>(tj.coord - 1) * d + (tj.coord - 1)] += a * d2 * others;
                }
                // cross terms with later spatial coordinates
                for (std::uint32_t m = j + 1; m < nnz; ++m) {
                    const Term& tk = terms_[begin + m];
                    if (tk.coord < 1) continue;
                    double rest = 1.0;
                    for (std::uint32_t r = 0; r < nnz; ++r)
                        if (r != j && r != m) rest *= factors[r];
                    const double dk = tk.degree * pw[static_cast<std::size_t>(tk.coord) * stride + tk.degree - 1];
                    const double contrib = a * dj * dk * rest;
                    ws.hess[static_cast<std::size_t>(tj.coord - 1) * d + (tk.coord - 1)] += contrib;
                }
            }
        }
    }

    dt = ws.ref_grad[0] * scale_[0];
    for (int i = 0; i < d; ++i) ws.grad[i] = ws.ref_grad[i + 1] * scale_[i + 1];
    for (int i = 0; i < d; ++i) {
        ws.hess[static_cast<std::size_t>(i) * d + i] *= scale_[i + 1] * scale_[i + 1];
        for (int j = i + 1; j < d; ++j) {
            const double v = ws.hess[static_cast<std::size_t>(i) * d + j] * scale_[i + 1] * scale_[j + 1];
            ws.hess[static_cast<std::size_t>(i) * d + j] = v;
            ws.hess[static_cast<std::size_t>(j) * d + i] = v;
        }
    }
}

void SparseBasis::eval_grad_x(std::span<const double> alpha, double t, std::span<const double> x,
                              std::span<double> grad) const {
    Workspace ws = make_workspace();
    double value, dt;
    eval_all(alpha, t, x, ws, value, dt);
    std::copy(ws.grad.begin(), ws.grad.end(), grad.begin());
}

void SparseBasis::eval_hess_x(std::span<const double> alpha, double t, std::span<const double> x,
                              std::span<double> hess) const {
    Workspace ws = make_workspace();
    double value, dt;
    eval_all(alpha, t, x, ws, value, dt);
    std::copy(ws.hess.begin(), ws.hess.end(), hess.begin());
}

double SparseBasis::eval_dt(std::span<const double> alpha, double t, std::span<const double> x) const {
    Workspace ws = make_workspace();
    double value, dt;
    eval_all(alpha, t, x, ws, value, dt);
    return dt;
}

} // namespace bsde
