#include "plap/solver.hpp"

#include "plap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace plap {

std::vector<double> SolveConfig::default_schedule(double eps0, int steps) {
    std::vector<double> s(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) s[static_cast<std::size_t>(k)] = std::ldexp(eps0, -k);
    return s;
}

void SolveConfig::validate() const {
    require(!eps_schedule.empty(), ErrorKind::InvalidInput, "empty eps schedule");
    for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
        require(std::isfinite(eps_schedule[k]) && eps_schedule[k] >= eps_floor, ErrorKind::InvalidInput,
                "eps schedule entries must be finite and >= the eps floor");
        require(k == 0 || eps_schedule[k] < eps_schedule[k - 1], ErrorKind::InvalidInput,
                "eps schedule must be strictly decreasing");
    }
    require(residual_tol > 0.0 && cg_rel_tol > 0.0, ErrorKind::InvalidInput, "tolerances must be positive");
    require(max_newton_iters > 0 && cg_max_iters > 0, ErrorKind::InvalidInput, "iteration limits must be positive");
    require(backtrack > 0.0 && backtrack < 1.0 && armijo > 0.0 && armijo < 0.5, ErrorKind::InvalidInput,
            "line search constants out of range");
}

// --- boundary data --------------------------------------------------------

BoundaryCondition BoundaryCondition::endpoints(const Grid1D& grid, double left, double right) {
    BoundaryCondition bc{std::vector<char>(grid.size(), 0), std::vector<double>(grid.size(), 0.0)};
    bc.fixed.front() = bc.fixed.back() = 1;
    bc.values.front() = left;
    bc.values.back() = right;
    return bc;
}

BoundaryCondition BoundaryCondition::rectangle(const Grid2D& grid,
                                               const std::function<double(double, double)>& g) {
    BoundaryCondition bc{std::vector<char>(grid.size(), 0), std::vector<double>(grid.size(), 0.0)};
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            if (!grid.on_boundary(i, j)) continue;
            bc.fixed[grid.index(i, j)] = 1;
            bc.values[grid.index(i, j)] = g(grid.x(i), grid.y(j));
        }
    }
    return bc;
}

BoundaryCondition BoundaryCondition::from_field(const DiscreteField& u) {
    if (u.is_1d()) return endpoints(u.grid1d(), u[0], u[u.size() - 1]);
    const auto& g = u.grid2d();
    BoundaryCondition bc{std::vector<char>(g.size(), 0), std::vector<double>(g.size(), 0.0)};
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            if (g.on_boundary(i, j)) {
                bc.fixed[g.index(i, j)] = 1;
                bc.values[g.index(i, j)] = u[g.index(i, j)];
            }
    return bc;
}

double BoundaryCondition::min_value() const {
    double v = kInf;
    for (std::size_t i = 0; i < size(); ++i)
        if (fixed[i]) v = std::min(v, values[i]);
    return v;
}

double BoundaryCondition::max_value() const {
    double v = -kInf;
    for (std::size_t i = 0; i < size(); ++i)
        if (fixed[i]) v = std::max(v, values[i]);
    return v;
}

namespace {

std::size_t grid_size(const GridRef& g) {
    return std::visit([](const auto& p) { return p->size(); }, g);
}

void check_bc(const GridRef& grid, const BoundaryCondition& bc) {
    require(bc.fixed.size() == grid_size(grid) && bc.values.size() == bc.fixed.size(), ErrorKind::InvalidInput,
            "boundary data size does not match grid");
    bool any = false;
    for (std::size_t i = 0; i < bc.size(); ++i) {
        if (!bc.fixed[i]) continue;
        any = true;
        require(std::isfinite(bc.values[i]), ErrorKind::InvalidInput, "non-finite boundary value");
    }
    require(any, ErrorKind::InvalidInput, "no fixed nodes");
}

double max_abs_free(std::span<const double> r, const BoundaryCondition& bc) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (!bc.fixed[i]) m = std::max(m, std::abs(r[i]));
    return m;
}

// Thomas algorithm; fixed rows become identity rows.
std::vector<double> solve_tridiagonal(Tridiagonal T, std::vector<double> rhs, const BoundaryCondition& bc) {
    const std::size_t n = T.diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!bc.fixed[i]) continue;
        T.diag[i] = 1.0;
        rhs[i] = 0.0;
        if (i > 0) T.off[i - 1] = 0.0;
        if (i + 1 < n) T.off[i] = 0.0;
    }
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    c[0] = n > 1 ? T.off[0] / T.diag[0] : 0.0;
    d[0] = rhs[0] / T.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double den = T.diag[i] - T.off[i - 1] * c[i - 1];
        require(den > 0.0, ErrorKind::Singularity, "Newton matrix is not positive definite");
        c[i] = i + 1 < n ? T.off[i] / den : 0.0;
        d[i] = (rhs[i] - T.off[i - 1] * d[i - 1]) / den;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

// Jacobi-preconditioned CG on the free nodes.
std::vector<double> solve_cg(const EnergySpec& spec, const DiscreteField& u, const std::vector<double>& rhs,
                             const BoundaryCondition& bc, const SolveConfig& cfg, double abs_tol) {
    const std::size_t n = rhs.size();
    auto diag = hessian_diagonal(spec, u);
    auto masked = [&](std::vector<double> v) {
        for (std::size_t i = 0; i < n; ++i)
            if (bc.fixed[i]) v[i] = 0.0;
        return v;
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    std::vector<double> x(n, 0.0);
    std::vector<double> r = masked(rhs);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = bc.fixed[i] ? 0.0 : r[i] / diag[i];
    std::vector<double> d = z;
    double rz = dot(r, z);
    const double stop = std::max(cfg.cg_rel_tol * std::sqrt(dot(r, r)), abs_tol);
    for (int it = 0; it < cfg.cg_max_iters; ++it) {
        if (std::sqrt(dot(r, r)) <= stop) break;
        const auto Ad = masked(linearized_action(spec, u, d));
        const double dAd = dot(d, Ad);
        if (!(dAd > 0.0)) break;
        const double alpha = rz / dAd;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * d[i];
            r[i] -= alpha * Ad[i];
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = bc.fixed[i] ? 0.0 : r[i] / diag[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
    }
    return x;
}

std::vector<double> newton_direction(const EnergySpec& spec, const DiscreteField& u, const std::vector<double>& grad,
                                     const BoundaryCondition& bc, const SolveConfig& cfg) {
    std::vector<double> rhs(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) rhs[i] = bc.fixed[i] ? 0.0 : -grad[i];
    if (u.is_1d()) return solve_tridiagonal(hessian_tridiagonal(spec, u), std::move(rhs), bc);
    return solve_cg(spec, u, rhs, bc, cfg, 1e-3 * cfg.residual_tol);
}

DiscreteField initial_guess(const GridRef& grid, const BoundaryCondition& bc) {
    const std::size_t n = bc.size();
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (bc.fixed[i]) {
            mean += bc.values[i];
            ++count;
        }
    mean /= static_cast<double>(count);
    std::vector<double> v(n, mean);
    for (std::size_t i = 0; i < n; ++i)
        if (bc.fixed[i]) v[i] = bc.values[i];
    return DiscreteField(grid, std::move(v));
}

}  // namespace

std::pair<DiscreteField, NewtonTrace> newton_minimize(const EnergySpec& spec, const GridRef& grid,
                                                      const BoundaryCondition& bc, const SolveConfig& cfg,
                                                      const DiscreteField* start) {
    spec.validate();
    require(spec.eps > 0.0, ErrorKind::InvalidInput, "Newton solves need eps > 0");
    check_bc(grid, bc);
    DiscreteField u = start ? *start : initial_guess(grid, bc);
    if (start) {
        require(std::visit([](const auto& g) { return static_cast<const void*>(g.get()); }, grid) ==
                    std::visit([](const auto& g) { return static_cast<const void*>(g.get()); }, start->grid()),
                ErrorKind::InvalidInput, "start field is on a different grid");
        std::vector<double> v(u.values().begin(), u.values().end());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (bc.fixed[i]) v[i] = bc.values[i];
        u = DiscreteField(grid, std::move(v));
    }

    NewtonTrace trace;
    double E = energy(spec, u);
    trace.energy_history.push_back(E);
    auto grad = energy_gradient(spec, u);
    double res = max_abs_free(grad, bc);
    // the tolerance cannot go below what rounding allows at this solution scale
    auto converged = [&] { return res <= std::max(cfg.residual_tol, 16.0 * gradient_roundoff_scale(spec, u)); };
    while (!converged()) {
        if (trace.iterations >= cfg.max_newton_iters) {
            trace.residual = res;
            throw NonConvergenceError("Newton did not reach the residual tolerance", u, trace);
        }
        const auto d = newton_direction(spec, u, grad, bc, cfg);
        double slope = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) slope += grad[i] * d[i];
        if (!(slope < 0.0)) {
            trace.residual = res;
            throw NonConvergenceError("Newton direction is not a descent direction", u, trace);
        }
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60 && !accepted; ++ls, alpha *= cfg.backtrack) {
            std::vector<double> v(u.values().begin(), u.values().end());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += alpha * d[i];
            DiscreteField trial(grid, std::move(v));
            const double Et = energy(spec, trial);
            bool ok = Et <= E + cfg.armijo * alpha * slope;
            std::vector<double> gt;
            if (!ok && std::abs(Et - E) <= 64.0 * 2.2e-16 * std::abs(E)) {
                // energy differences at roundoff: fall back on the residual
                gt = energy_gradient(spec, trial);
                ok = max_abs_free(gt, bc) < res;
            }
            if (!ok) continue;
            accepted = true;
            u = std::move(trial);
            E = std::min(Et, E);
            grad = gt.empty() ? energy_gradient(spec, u) : std::move(gt);
        }
        ++trace.iterations;
        if (!accepted) {
            trace.residual = res;
            throw NonConvergenceError("line search failed", u, trace);
        }
        res = max_abs_free(grad, bc);
        trace.energy_history.push_back(E);
    }
    trace.residual = res;
    return {std::move(u), std::move(trace)};
}

DiscreteField harmonic_extension(const GridRef& grid, const BoundaryCondition& bc, const SolveConfig& cfg) {
    return newton_minimize({2.0, 1.0}, grid, bc, cfg).first;
}

namespace {

bool max_principle_holds(const DiscreteField& u, const BoundaryCondition& bc) {
    const double lo = bc.min_value();
    const double hi = bc.max_value();
    const double slack = 1e-10 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
    for (double v : u.values())
        if (v < lo - slack || v > hi + slack) return false;
    return true;
}

}  // namespace

std::pair<DiscreteField, SolveReport> solve_dirichlet(const EnergySpec& spec, const GridRef& grid,
                                                      const BoundaryCondition& bc, const SolveConfig& cfg) {
    cfg.validate();
    require(spec.eps >= cfg.eps_floor, ErrorKind::InvalidInput, "eps below the floor");
    // homotopy through the schedule entries above the target eps
    DiscreteField start = harmonic_extension(grid, bc, cfg);
    for (double e : cfg.eps_schedule)
        if (e > spec.eps) start = newton_minimize({spec.p, e}, grid, bc, cfg, &start).first;
    auto [u, trace] = newton_minimize(spec, grid, bc, cfg, &start);
    SolveReport rep;
    rep.p = spec.p;
    EpsStep s;
    s.eps = spec.eps;
    s.iterations = trace.iterations;
    s.residual = trace.residual;
    s.energy_eps = energy(spec, u);
    s.energy_p = energy({spec.p, 0.0}, u);
    s.energy_history = std::move(trace.energy_history);
    rep.steps.push_back(std::move(s));
    rep.max_principle_ok = max_principle_holds(u, bc);
    return {std::move(u), std::move(rep)};
}

std::pair<std::vector<DiscreteField>, SolveReport> epsilon_continuation(double p, const GridRef& grid,
                                                                        const BoundaryCondition& bc,
                                                                        const SolveConfig& cfg,
                                                                        const DiscreteField* reference) {
    cfg.validate();
    EnergySpec{p, 0.0}.validate();
    std::vector<DiscreteField> fields;
    SolveReport rep;
    rep.p = p;
    DiscreteField current = harmonic_extension(grid, bc, cfg);
    for (double eps : cfg.eps_schedule) {
        auto [u, trace] = newton_minimize({p, eps}, grid, bc, cfg, &current);
        EpsStep s;
        s.eps = eps;
        s.iterations = trace.iterations;
        s.residual = trace.residual;
        s.energy_eps = energy({p, eps}, u);
        s.energy_p = energy({p, 0.0}, u);
        s.energy_history = std::move(trace.energy_history);
        s.dist_to_prev = fields.empty() ? 0.0 : wp_distance(u, fields.back(), p);
        rep.max_principle_ok = rep.max_principle_ok && max_principle_holds(u, bc);
        rep.steps.push_back(std::move(s));
        current = u;
        fields.push_back(std::move(u));
    }
    const DiscreteField& last = fields.back();
    for (std::size_t k = 0; k < fields.size(); ++k) {
        auto& s = rep.steps[k];
        s.dist_to_final = wp_distance(fields[k], last, p);
        if (reference) {
            s.dist_to_reference = wp_distance(fields[k], *reference, p);
            s.sandwich = sandwich_check(p, s.eps, *reference, fields[k]);
        }
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
        const auto& a = rep.steps[k - 1];
        const auto& b = rep.steps[k];
        const double da = reference ? *a.dist_to_reference : a.dist_to_final;
        const double db = reference ? *b.dist_to_reference : b.dist_to_final;
        if (db > 1.1 * da + 1e-13) rep.distances_monotone = false;
    }
    return {std::move(fields), std::move(rep)};
}

SandwichReport sandwich_check(double p, double eps, const DiscreteField& u, const DiscreteField& u_eps) {
    require(u.shares_grid(u_eps), ErrorKind::InvalidInput, "sandwich fields must share a grid");
    require(eps >= 0.0, ErrorKind::InvalidInput, "eps must be >= 0");
    const auto bu = BoundaryCondition::from_field(u);
    for (std::size_t i = 0; i < bu.size(); ++i) {
        if (!bu.fixed[i]) continue;
        require(std::abs(u[i] - u_eps[i]) <= 1e-12 * (1.0 + std::abs(u[i])), ErrorKind::InvalidInput,
                "sandwich fields have different boundary values");
    }
    SandwichReport r;
    r.E_p_ref = energy({p, 0.0}, u);
    r.E_p_eps = energy({p, 0.0}, u_eps);
    r.E_peps_eps = energy({p, eps}, u_eps);
    r.E_peps_ref = energy({p, eps}, u);
    const double scale = std::max({std::abs(r.E_p_ref), std::abs(r.E_p_eps), std::abs(r.E_peps_eps),
                                   std::abs(r.E_peps_ref)});
    const double tol = 1e-8 * (1.0 + scale);
    r.first = r.E_p_ref <= r.E_p_eps + tol;
    r.second = r.E_p_eps <= r.E_peps_eps + tol;
    r.third = r.E_peps_eps <= r.E_peps_ref + tol;
    return r;
}

// --- closed-form radial solutions -------------------------------------------

RadialProfile radial_profile(const ModelManifold& M, double p, double offset, double c,
                             std::function<double(double)> phi) {
    const double k = 1.0 / (p - 1.0);
    RadialProfile prof;
    prof.value = [offset, c, phi = std::move(phi)](double t) { return offset + c * phi(t); };
    prof.d1 = [M, k, c](double t) { return c * std::exp(-k * M.log_area(t)); };
    prof.d2 = [M, k, c](double t) { return -k * c * std::exp(-k * M.log_area(t)) * M.area_log_derivative(t); };
    prof.d3 = [M, k, c](double t) {
        const double d1 = c * std::exp(-k * M.log_area(t));
        const double L = M.area_log_derivative(t);
        return -k * (-k * d1 * L * L + d1 * M.area_log_derivative_d1(t));
    };
    return prof;
}

DiscreteField radial_p_harmonic(const ModelManifold& M, double p, std::shared_ptr<const Grid1D> grid,
                                double u_a, double u_b) {
    EnergySpec{p, 0.0}.validate();
    require(grid != nullptr, ErrorKind::InvalidInput, "null grid");
    const double a = grid->node(0);
    const double b = grid->node(grid->size() - 1);
    M.check_in_domain(a);
    M.check_in_domain(b);
    std::vector<double> phi(grid->size(), 0.0);
    for (std::size_t i = 1; i < phi.size(); ++i)
        phi[i] = phi[i - 1] + inverse_area_integral(M, p, grid->node(i - 1), grid->node(i));
    const double total = phi.back();
    require(std::isfinite(total) && total > 0.0, ErrorKind::Singularity, "A^{-1/(p-1)} is not integrable on [a, b]");
    const double c = (u_b - u_a) / total;
    std::vector<double> v(phi.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u_a + c * phi[i];
    v.back() = u_b;
    auto prof = radial_profile(M, p, u_a, c, [M, p, a](double t) { return inverse_area_integral(M, p, a, t); });
    return DiscreteField::annotated(grid, std::move(v), std::move(prof));
}

DiscreteField radial_p_harmonic(const ModelManifold& M, double p, double a, double b, double u_a, double u_b,
                                std::size_t nodes) {
    require(a < b, ErrorKind::InvalidInput, "radial_p_harmonic needs a < b");
    return radial_p_harmonic(M, p, std::make_shared<const Grid1D>(Grid1D::uniform(M, a, b, nodes)), u_a, u_b);
}

Barrier two_end_barrier(const ModelManifold& M, double p, std::shared_ptr<const Grid1D> grid) {
    EnergySpec{p, 0.0}.validate();
    require(!M.domain().bounded_below() && !M.domain().bounded_above(), ErrorKind::InvalidInput,
            "two-end barrier needs a full-line domain");
    if (classify_end(M, p, EndDirection::Plus) != EndType::Hyperbolic ||
        classify_end(M, p, EndDirection::Minus) != EndType::Hyperbolic)
        fail(ErrorKind::NoBarrier, "a barrier needs two p-hyperbolic ends");
    const std::size_t n = grid->size();
    std::vector<double> phi(n);
    phi[0] = inverse_area_integral(M, p, -kInf, grid->node(0));
    for (std::size_t i = 1; i < n; ++i)
        phi[i] = phi[i - 1] + inverse_area_integral(M, p, grid->node(i - 1), grid->node(i));
    const double phi_inf = phi.back() + inverse_area_integral(M, p, grid->node(n - 1), kInf);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = phi[i] / phi_inf;

    auto prof = radial_profile(M, p, 0.0, 1.0 / phi_inf,
                               [M, p](double t) { return inverse_area_integral(M, p, -kInf, t); });
    Barrier B{DiscreteField::annotated(grid, h, std::move(prof))};
    B.phi_inf = phi_inf;
    B.sup = *std::max_element(h.begin(), h.end());
    B.inf = *std::min_element(h.begin(), h.end());
    B.strictly_between = std::all_of(h.begin(), h.end(), [](double v) { return v > 0.0 && v < 1.0; });
    B.energy_analytic = std::pow(phi_inf, 1.0 - p);
    B.energy_numeric = energy({p, 0.0}, B.h);
    return B;
}

}  // namespace plap
