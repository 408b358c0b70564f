#include "plap/energy.hpp"

#include "plap/error.hpp"

#include <cmath>
#include <limits>

namespace plap {

void EnergySpec::validate() const {
    require(std::isfinite(p) && p > 1.0, ErrorKind::InvalidInput, "p must be > 1");
    require(std::isfinite(eps) && eps >= 0.0, ErrorKind::InvalidInput, "eps must be >= 0");
}

void for_each_cell(const GridRef& grid, const std::function<void(const CellStencil&)>& fn) {
    if (const auto* g1 = std::get_if<std::shared_ptr<const Grid1D>>(&grid)) {
        const Grid1D& g = **g1;
        CellStencil c;
        c.count = 2;
        for (std::size_t k = 0; k < g.cells(); ++k) {
            const double h = g.spacing(k);
            c.node = {k, k + 1, 0};
            c.dgrad = {Vec2{-1.0 / h, 0.0}, Vec2{1.0 / h, 0.0}, Vec2{0.0, 0.0}};
            c.measure = g.cell_measure(k);
            fn(c);
        }
        return;
    }
    const Grid2D& g = *std::get<std::shared_ptr<const Grid2D>>(grid);
    const double ix = 1.0 / g.hx();
    const double iy = 1.0 / g.hy();
    CellStencil c;
    c.count = 3;
    c.measure = 0.5 * g.hx() * g.hy();
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const std::size_t n00 = g.index(i, j), n10 = g.index(i + 1, j);
            const std::size_t n01 = g.index(i, j + 1), n11 = g.index(i + 1, j + 1);
            c.node = {n00, n10, n01};
            c.dgrad = {Vec2{-ix, -iy}, Vec2{ix, 0.0}, Vec2{0.0, iy}};
            fn(c);
            c.node = {n11, n01, n10};
            c.dgrad = {Vec2{ix, iy}, Vec2{-ix, 0.0}, Vec2{0.0, -iy}};
            fn(c);
        }
    }
}

namespace {

double norm2(const Vec2& g) { return g[0] * g[0] + g[1] * g[1]; }

// p·f^{p−2} with f² = |g|² + ε; the flux weight of the energy gradient.
double flux_weight(const EnergySpec& s, double f2) {
    if (s.p == 2.0) return 2.0;
    return s.p * std::pow(f2, 0.5 * (s.p - 2.0));
}

// Local Hessian p f^{p−2}(I + (p−2) g gᵀ / f²) as a symmetric 2×2.
Sym2 local_hessian(const EnergySpec& s, const Vec2& g) {
    const double f2 = norm2(g) + s.eps;
    if (f2 == 0.0) {
        if (s.p == 2.0) return {2.0, 0.0, 2.0};
        fail(ErrorKind::Singularity, "energy Hessian undefined at zero gradient");
    }
    const double w = flux_weight(s, f2);
    const double c = (s.p - 2.0) / f2;
    return {w * (1.0 + c * g[0] * g[0]), w * c * g[0] * g[1], w * (1.0 + c * g[1] * g[1])};
}

Vec2 mul(const Sym2& H, const Vec2& v) {
    return {H.xx * v[0] + H.xy * v[1], H.xy * v[0] + H.yy * v[1]};
}

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

void zero_boundary(const DiscreteField& u, std::vector<double>& r) {
    if (u.is_1d()) {
        r.front() = 0.0;
        r.back() = 0.0;
        return;
    }
    const auto& g = u.grid2d();
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            if (g.on_boundary(i, j)) r[g.index(i, j)] = 0.0;
}

}  // namespace

double energy(const EnergySpec& spec, const DiscreteField& u) {
    spec.validate();
    const auto v = u.values();
    const double half_p = 0.5 * spec.p;
    double e = 0.0;
    for_each_cell(u.grid(), [&](const CellStencil& c) {
        const double f2 = norm2(c.grad(v)) + spec.eps;
        e += c.measure * (spec.p == 2.0 ? f2 : std::pow(f2, half_p));
    });
    return e;
}

double q_energy(const DiscreteField& u, double q) {
    require(q > 0.0, ErrorKind::InvalidInput, "q must be > 0");
    const auto v = u.values();
    double e = 0.0;
    for_each_cell(u.grid(), [&](const CellStencil& c) {
        e += c.measure * std::pow(norm2(c.grad(v)), 0.5 * q);
    });
    return e;
}

std::vector<double> energy_gradient(const EnergySpec& spec, const DiscreteField& u) {
    spec.validate();
    const auto v = u.values();
    std::vector<double> r(u.size(), 0.0);
    for_each_cell(u.grid(), [&](const CellStencil& c) {
        const Vec2 g = c.grad(v);
        const double f2 = norm2(g) + spec.eps;
        if (f2 == 0.0) {
            if (spec.p < 2.0) fail(ErrorKind::Singularity, "p < 2 with eps = 0 at a zero gradient");
            return;
        }
        const double w = c.measure * flux_weight(spec, f2);
        for (int k = 0; k < c.count; ++k) r[c.node[k]] += w * dot(g, c.dgrad[k]);
    });
    return r;
}

double gradient_roundoff_scale(const EnergySpec& spec, const DiscreteField& u) {
    spec.validate();
    const auto v = u.values();
    std::vector<double> r(u.size(), 0.0);
    for_each_cell(u.grid(), [&](const CellStencil& c) {
        const Vec2 g = c.grad(v);
        const double f2 = norm2(g) + spec.eps;
        if (f2 == 0.0) return;
        // each gradient entry is a difference of node values divided by h
        double mag = 0.0;
        for (int k = 0; k < c.count; ++k)
            mag += std::abs(v[c.node[k]]) * (std::abs(c.dgrad[k][0]) + std::abs(c.dgrad[k][1]));
        const double w = c.measure * flux_weight(spec, f2) * mag;
        for (int k = 0; k < c.count; ++k) r[c.node[k]] += w * (std::abs(c.dgrad[k][0]) + std::abs(c.dgrad[k][1]));
    });
    double m = 0.0;
    for (double x : r) m = std::max(m, x);
    return m * std::numeric_limits<double>::epsilon();
}

std::vector<double> weak_residual(const EnergySpec& spec, const DiscreteField& u) {
    auto r = energy_gradient(spec, u);
    zero_boundary(u, r);
    return r;
}

std::vector<double> linearized_action(const EnergySpec& spec, const DiscreteField& u,
                                      std::span<const double> psi) {
    spec.validate();
    require(spec.eps > 0.0, ErrorKind::Singularity, "linearized operator needs eps > 0");
    require(psi.size() == u.size(), ErrorKind::InvalidInput, "direction size does not match grid");
    const auto v = u.values();
    std::vector<double> out(u.size(), 0.0);
    for_each_cell(u.grid(), [&](const CellStencil& c) {
        const Sym2 H = local_hessian(spec, c.grad(v));
        const Vec2 hd = mul(H, c.grad(psi));
        for (int k = 0; k < c.count; ++k) out[c.node[k]] += c.measure * dot(hd, c.dgrad[k]);
    });
    return out;
}

std::vector<double> linearized_action(const EnergySpec& spec, const DiscreteField& u,
                                      const DiscreteField& psi) {
    require(u.shares_grid(psi), ErrorKind::InvalidInput, "fields must share a grid");
    return linearized_action(spec, u, psi.values());
}

std::vector<double> hessian_diagonal(const EnergySpec& spec, const DiscreteField& u) {
    spec.validate();
    const auto v = u.values();
    std::vector<double> d(u.size(), 0.0);
    for_each_cell(u.grid(), [&](const CellStencil& c) {
        const Sym2 H = local_hessian(spec, c.grad(v));
        for (int k = 0; k < c.count; ++k) d[c.node[k]] += c.measure * dot(mul(H, c.dgrad[k]), c.dgrad[k]);
    });
    return d;
}

Tridiagonal hessian_tridiagonal(const EnergySpec& spec, const DiscreteField& u) {
    spec.validate();
    const auto& g = u.grid1d();
    const auto v = u.values();
    Tridiagonal T{std::vector<double>(g.size(), 0.0), std::vector<double>(g.cells(), 0.0)};
    for (std::size_t k = 0; k < g.cells(); ++k) {
        const double h = g.spacing(k);
        const Sym2 H = local_hessian(spec, {(v[k + 1] - v[k]) / h, 0.0});
        const double a = g.cell_measure(k) * H.xx / (h * h);
        T.diag[k] += a;
        T.diag[k + 1] += a;
        T.off[k] -= a;
    }
    return T;
}

QEnergyGrowth q_energy_growth(const std::function<DiscreteField(double)>& field_on,
                              std::span<const double> extents, double q) {
    require(extents.size() >= 3, ErrorKind::InvalidInput, "growth test needs at least 3 extents");
    QEnergyGrowth out;
    for (double L : extents) {
        require(out.extent.empty() || L > out.extent.back(), ErrorKind::InvalidInput,
                "extents must increase");
        out.extent.push_back(L);
        out.value.push_back(q_energy(field_on(L), q));
    }
    const std::size_t n = out.value.size();
    const double d_last = out.value[n - 1] - out.value[n - 2];
    const double d_prev = out.value[n - 2] - out.value[n - 3];
    // convergent tails shrink their increments; a log law keeps them constant
    out.converged = d_last <= 0.75 * std::abs(d_prev) || std::abs(d_last) <= 1e-9 * std::abs(out.value.back());
    return out;
}

}  // namespace plap
