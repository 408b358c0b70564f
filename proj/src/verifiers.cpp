#include "plap/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace plap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm2(Vec2 g) { return g[0] * g[0] + g[1] * g[1]; }

// Included nodes for a pointwise check: collar, mask, then gradient threshold.
std::vector<char> select_nodes(const DiscreteField& u, const std::vector<Vec2>& grad, const CheckOptions& opt,
                               bool use_theta) {
    const std::size_t n = u.size();
    require(opt.mask.empty() || opt.mask.size() == n, ErrorKind::InvalidInput, "mask size does not match grid");
    std::vector<char> use(n, 1);
    if (u.is_1d()) {
        for (std::size_t i = 0; i < n; ++i)
            if (i < opt.collar || i + opt.collar >= n) use[i] = 0;
    } else {
        const auto& g = u.grid2d();
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i)
                if (g.collar_depth(i, j) < opt.collar) use[g.index(i, j)] = 0;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!opt.mask.empty() && !opt.mask[i]) use[i] = 0;
    if (use_theta) {
        double gmax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (use[i]) gmax = std::max(gmax, std::sqrt(norm2(grad[i])));
        const double theta = opt.theta < 0.0 ? 1e-8 * gmax : opt.theta;
        for (std::size_t i = 0; i < n; ++i)
            if (use[i] && std::sqrt(norm2(grad[i])) <= theta) use[i] = 0;
    }
    return use;
}

VerifierReport summarize(std::string name, std::vector<double> values, const std::vector<char>& use) {
    VerifierReport r;
    r.name = std::move(name);
    r.min = kInf;
    r.max = -kInf;
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!use[i]) {
            values[i] = kNaN;
            ++r.excluded;
            continue;
        }
        ++r.included;
        r.min = std::min(r.min, values[i]);
        r.max = std::max(r.max, values[i]);
        sum += values[i];
    }
    if (r.included == 0) fail(ErrorKind::NoData, r.name + ": every node was excluded");
    r.mean = sum / static_cast<double>(r.included);
    r.values = std::move(values);
    return r;
}

// m, A'/A and η'/η for radial checks; a flat 1D grid is one-dimensional.
struct RadialGeometry {
    int m = 1;
    std::vector<double> L, tangential, ricci;
};

RadialGeometry radial_geometry(const Grid1D& g) {
    RadialGeometry geo;
    const std::size_t n = g.size();
    geo.L.assign(n, 0.0);
    geo.tangential.assign(n, 0.0);
    geo.ricci.assign(n, 0.0);
    if (!g.manifold()) return geo;
    const auto& M = *g.manifold();
    geo.m = M.dimension();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = g.node(i);
        if (g.area_at_node(i) == 0.0) continue;   // radial origin
        geo.L[i] = M.area_log_derivative(t);
        geo.tangential[i] = M.tangential_factor(t);
        geo.ricci[i] = radial_ricci_term(M, t, 1.0);
    }
    return geo;
}

double frobenius2(const Sym2& h) { return h.xx * h.xx + 2.0 * h.xy * h.xy + h.yy * h.yy; }

// Length of [a, b] ∩ [lo, hi] as a fraction of b − a.
double coverage(double a, double b, double lo, double hi) {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo)) / (b - a);
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent engine per (seed, stream, sample) so results do not depend on
// evaluation order.
std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return std::mt19937_64(splitmix(seed ^ splitmix((stream << 40) + i)));
}

double vnorm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

const char* to_string(KappaVariant v) noexcept {
    switch (v) {
        case KappaVariant::Combined: return "combined";
        case KappaVariant::Refined: return "refined";
        case KappaVariant::Weak: return "weak";
    }
    return "?";
}

double kappa(double p, int m, KappaVariant variant) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(m >= 2, ErrorKind::InvalidInput, "m must be at least 2");
    const double q = (p - 1.0) * (p - 1.0);
    const double mm = static_cast<double>(m);
    switch (variant) {
        case KappaVariant::Combined:
            return p <= 2.0 ? q / (mm - 1.0) : std::max(1.0 / (mm - 1.0), std::min(q / mm, 1.0));
        case KappaVariant::Refined: return std::min(q / (mm - 1.0), 1.0);
        case KappaVariant::Weak: return p >= 2.0 ? 1.0 / (mm - 1.0) : q / (mm - 1.0);
    }
    fail(ErrorKind::InvalidInput, "unknown kappa variant");
}

VerifierReport kato_ratio(const DiscreteField& u, double p, const CheckOptions& opt) {
    const auto grad = gradient(u);
    const std::size_t n = u.size();
    std::vector<double> num(n), den(n);
    int m = 2;
    double scale = 0.0;
    if (u.is_1d()) {
        const auto& g = u.grid1d();
        require(g.manifold().has_value(), ErrorKind::InvalidInput, "radial Kato ratio needs a manifold grid");
        const auto geo = radial_geometry(g);
        m = geo.m;
        const auto b = second_derivative_1d(g, u.values());
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::abs(grad[i][0]);
        const auto df = derivative_1d(g, f);
        for (std::size_t i = 0; i < n; ++i) {
            const double tang = geo.tangential[i] * grad[i][0];
            num[i] = b[i] * b[i] + (m - 1) * tang * tang;
            den[i] = df[i] * df[i];
        }
        scale = g.node(n - 1) - g.node(0);
    } else {
        const auto& g = u.grid2d();
        const auto H = hessian(u);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::sqrt(norm2(grad[i]));
        const auto gf = gradient_2d(g, f);
        for (std::size_t i = 0; i < n; ++i) {
            num[i] = frobenius2(H[i]);
            den[i] = norm2(gf[i]);
        }
        scale = std::hypot(g.x1() - g.x0(), g.y1() - g.y0());
    }
    const auto use = select_nodes(u, grad, opt, true);
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (use[i]) gmax = std::max(gmax, std::sqrt(norm2(grad[i])));
    // |∇|du|| below roundoff relative to |∇u|/diameter counts as zero
    const double tiny = 1e-20 * gmax * gmax / (scale * scale);
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) ratio[i] = den[i] <= tiny ? kInf : num[i] / den[i];
    auto r = summarize("kato_ratio", std::move(ratio), use);
    r.threshold = 1.0 + kappa(p, m, KappaVariant::Refined) - opt.tol;
    r.pass = r.min >= r.threshold;
    return r;
}

VerifierReport strong_form_residual(const DiscreteField& u, double p, const CheckOptions& opt) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    const auto grad = gradient(u);
    const std::size_t n = u.size();
    std::vector<double> f2(n), res(n);
    for (std::size_t i = 0; i < n; ++i) f2[i] = norm2(grad[i]);
    if (u.is_1d()) {
        const auto& g = u.grid1d();
        const auto geo = radial_geometry(g);
        const auto b = second_derivative_1d(g, u.values());
        const auto df2 = derivative_1d(g, f2);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = grad[i][0];
            res[i] = std::abs(f2[i] * (b[i] + geo.L[i] * a) + 0.5 * (p - 2.0) * df2[i] * a);
        }
    } else {
        const auto H = hessian(u);
        const auto gf2 = gradient_2d(u.grid2d(), f2);
        for (std::size_t i = 0; i < n; ++i)
            res[i] = std::abs(f2[i] * (H[i].xx + H[i].yy) +
                              0.5 * (p - 2.0) * (gf2[i][0] * grad[i][0] + gf2[i][1] * grad[i][1]));
    }
    auto r = summarize("strong_form_residual", std::move(res), select_nodes(u, grad, opt, false));
    r.threshold = opt.tol;
    r.pass = r.max <= r.threshold;
    return r;
}

VerifierReport bochner_residual(const DiscreteField& u, double p, double eps, const CheckOptions& opt) {
    if (!(eps > 0.0)) fail(ErrorKind::Singularity, "the L_eps Bochner identity needs eps > 0");
    EnergySpec{p, eps}.validate();
    const auto grad = gradient(u);
    const std::size_t n = u.size();
    auto coeff = [p](double a2, double eps_) {
        const double f2 = a2 + eps_;
        return std::pow(f2, 0.5 * (p - 2.0));
    };
    std::vector<double> psi(n), res(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) psi[i] = norm2(grad[i]) + eps;

    if (u.is_1d()) {
        const auto& g = u.grid1d();
        const auto geo = radial_geometry(g);
        const auto b = second_derivative_1d(g, u.values());
        const auto dpsi = derivative_1d(g, psi);
        std::vector<double> flux(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double h = g.spacing(c);
            const double a = (u[c + 1] - u[c]) / h;
            const double fe2 = a * a + eps;
            const double K = coeff(a * a, eps) * (1.0 + (p - 2.0) * a * a / fe2);
            flux[c] = g.area_at_mid(c) * K * (psi[c + 1] - psi[c]) / h;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double vol = g.area_at_node(i) * 0.5 * (g.node(i + 1) - g.node(i - 1));
            const double lhs = 0.5 * (flux[i] - flux[i - 1]) / vol;
            const double a = grad[i][0];
            const double tang = geo.tangential[i] * a;
            const double hess2 = b[i] * b[i] + (geo.m - 1) * tang * tang;
            const double rhs = 0.25 * (p - 2.0) * std::pow(psi[i], 0.5 * (p - 4.0)) * dpsi[i] * dpsi[i] +
                               std::pow(psi[i], 0.5 * (p - 2.0)) * (hess2 + geo.ricci[i] * a * a);
            res[i] = std::abs(lhs - rhs);
        }
    } else {
        const auto& g = u.grid2d();
        const auto H = hessian(u);
        const auto gpsi = gradient_2d(g, psi);
        const std::size_t nx = g.nx(), ny = g.ny();
        // edge fluxes of f_ε^{p−2}(∇ψ + (p−2)∇u⟨∇u,∇ψ⟩/f_ε²); normal derivatives
        // staggered, tangential ones averaged from the two end nodes
        auto edge_flux = [&](std::size_t k0, std::size_t k1, int axis, double h) {
            Vec2 gu, gp;
            gu[axis] = (u[k1] - u[k0]) / h;
            gp[axis] = (psi[k1] - psi[k0]) / h;
            const int o = 1 - axis;
            gu[o] = 0.5 * (grad[k0][o] + grad[k1][o]);
            gp[o] = 0.5 * (gpsi[k0][o] + gpsi[k1][o]);
            const double fe2 = norm2(gu) + eps;
            const double dot = gu[0] * gp[0] + gu[1] * gp[1];
            return coeff(norm2(gu), eps) * (gp[axis] + (p - 2.0) * gu[axis] * dot / fe2);
        };
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                const std::size_t k = g.index(i, j);
                const double div = (edge_flux(k, g.index(i + 1, j), 0, g.hx()) -
                                    edge_flux(g.index(i - 1, j), k, 0, g.hx())) / g.hx() +
                                   (edge_flux(k, g.index(i, j + 1), 1, g.hy()) -
                                    edge_flux(g.index(i, j - 1), k, 1, g.hy())) / g.hy();
                const double rhs = 0.25 * (p - 2.0) * std::pow(psi[k], 0.5 * (p - 4.0)) * norm2(gpsi[k]) +
                                   std::pow(psi[k], 0.5 * (p - 2.0)) * frobenius2(H[k]);
                res[k] = std::abs(0.5 * div - rhs);
            }
        }
    }
    CheckOptions o = opt;
    o.collar = std::max<std::size_t>(o.collar, 1);
    auto r = summarize("bochner_residual", std::move(res), select_nodes(u, grad, o, true));
    r.threshold = opt.tol;
    r.pass = r.max <= r.threshold;
    return r;
}

VerifierReport bochner_s_residual(const DiscreteField& u, double p, double s, double eps, const CheckOptions& opt) {
    if (!(eps > 0.0)) fail(ErrorKind::Singularity, "the L_{s,eps} Bochner identity needs eps > 0");
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    const auto* prof = u.radial_profile();
    if (!u.is_1d() || prof == nullptr)
        fail(ErrorKind::UnsupportedVariant, "closed-form third derivatives need a radial profile");
    const auto& g = u.grid1d();
    require(g.manifold().has_value(), ErrorKind::InvalidInput, "radial profile needs a manifold grid");
    const auto& M = *g.manifold();
    const int m = M.dimension();
    const std::size_t n = u.size();
    std::vector<double> res(n, 0.0);
    std::vector<Vec2> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = g.node(i);
        if (g.area_at_node(i) == 0.0) continue;
        const double a = prof->d1(t), b = prof->d2(t), c = prof->d3(t);
        grad[i] = {a, 0.0};
        const double L = M.area_log_derivative(t), Lp = M.area_log_derivative_d1(t);
        const double tang = M.tangential_factor(t) * a;
        const double ric = radial_ricci_term(M, t, a * a);

        const double psi = a * a + eps, dpsi = 2.0 * a * b, ddpsi = 2.0 * b * b + 2.0 * a * c;
        const double fs = std::pow(psi, 0.5 * s), fs2 = std::pow(psi, 0.5 * (s - 2.0)),
                     fs4 = std::pow(psi, 0.5 * (s - 4.0));
        const double K = fs + (p - 2.0) * a * a * fs2;
        const double dK = 0.5 * s * fs2 * dpsi + (p - 2.0) * (dpsi * fs2 + 0.5 * a * a * (s - 2.0) * fs4 * dpsi);
        const double lhs = 0.5 * (L * K * dpsi + dK * dpsi + K * ddpsi);

        const double lap = b + L * a;
        const double grad_lap = c + Lp * a + L * b;
        const double T1 = 0.25 * s * fs2 * dpsi * dpsi;
        const double T2 = fs * (b * b + (m - 1) * tang * tang + ric);
        const double T3 = 0.25 * (p - 2.0) * (s - p + 2.0) * fs4 * (a * dpsi) * (a * dpsi);
        const double T4 = eps * (fs2 * a * grad_lap + 0.5 * (p - 4.0) * fs4 * (a * dpsi) * lap);
        const double scale = std::abs(lhs) + std::abs(T1) + std::abs(T2) + std::abs(T3) + std::abs(T4);
        res[i] = std::abs(lhs - (T1 + T2 + T3 + T4)) / std::max(scale, 1e-300);
    }
    auto use = select_nodes(u, grad, opt, false);
    for (std::size_t i = 0; i < n; ++i)
        if (g.area_at_node(i) == 0.0) use[i] = 0;
    auto r = summarize("bochner_s_residual", std::move(res), use);
    r.threshold = opt.tol;
    r.pass = r.max <= r.threshold;
    return r;
}

VerifierReport caccioppoli_check(const DiscreteField& w, const DiscreteField& psi, double p, double tol) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(w.shares_grid(psi), ErrorKind::InvalidInput, "w and psi must live on the same grid");
    for (std::size_t i = 0; i < w.size(); ++i)
        require(psi[i] == 0.0 || w[i] > 0.0, ErrorKind::InvalidInput, "w must be positive on the support of psi");

    std::vector<double> phi(psi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::pow(std::abs(psi[i]), p);
    double lhs = 0.0, rhs = 0.0, pairing = 0.0, pairing_scale = 0.0;
    for_each_cell(w.grid(), [&](const CellStencil& cs) {
        const Vec2 gw = cs.grad(w.values()), gpsi = cs.grad(psi.values()), gphi = cs.grad(phi);
        double wc = 0.0, pc = 0.0;
        for (int k = 0; k < cs.count; ++k) {
            wc += w[cs.node[k]];
            pc += psi[cs.node[k]];
        }
        wc /= cs.count;
        pc /= cs.count;
        const double nw = std::sqrt(norm2(gw));
        lhs += cs.measure * std::pow(std::abs(pc) * nw, p);
        rhs += cs.measure * std::pow(std::abs(wc) * std::sqrt(norm2(gpsi)), p);
        if (nw > 0.0) {
            const double c = std::pow(nw, p - 2.0);
            pairing += cs.measure * c * (gw[0] * gphi[0] + gw[1] * gphi[1]);
            pairing_scale += cs.measure * c * nw * std::sqrt(norm2(gphi));
        }
    });
    // weak p-subharmonicity against the test function ψ^p ≥ 0
    require(pairing <= 1e-3 * pairing_scale, ErrorKind::InvalidInput, "w is not p-subharmonic on the support of psi");
    VerifierReport r;
    r.name = "caccioppoli";
    r.min = r.max = r.mean = std::pow(lhs, 1.0 / p);
    r.threshold = p * std::pow(rhs, 1.0 / p) * (1.0 + tol);
    r.pass = r.max <= r.threshold;
    r.included = 1;
    r.values = {r.max};
    return r;
}

GapConstants weighted_caccioppoli_constants(const WeightedCaccioppoliInput& in) {
    require(in.p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(in.eps1 > 0.0 && in.eps2 > 0.0, ErrorKind::InvalidInput, "eps1 and eps2 must be positive");
    require(in.kappa >= 0.0 && in.tau >= 0.0, ErrorKind::InvalidInput, "kappa and tau must be non-negative");
    const double p = in.p;
    const double core = p - 1.0 + in.kappa - in.eps1;
    GapConstants k;
    k.B = std::pow(1.0 + std::abs(p - 2.0), 2.0) / in.eps1 + 4.0 * (1.0 / in.eps2 - 1.0) * core / (p * p);
    k.C = 4.0 * (1.0 - in.eps2) * core / (p * p) - in.tau;
    return k;
}

VerifierReport weighted_caccioppoli_check(const ModelManifold& M, const DiscreteField& u,
                                          const WeightedCaccioppoliInput& in) {
    const auto k = weighted_caccioppoli_constants(in);
    if (!(k.C > 0.0))
        fail(ErrorKind::ConstantsInfeasible,
             "C = " + std::to_string(k.C) + " <= 0 for the supplied (kappa, tau, eps1, eps2)");
    require(in.R > 0.0 && in.eps >= 0.0, ErrorKind::InvalidInput, "R must be positive and eps non-negative");
    M.warped();
    require(u.is_1d(), ErrorKind::InvalidInput, "weighted Caccioppoli check is radial");
    const auto& g = u.grid1d();
    const double lo2 = in.center - 2.0 * in.R, hi2 = in.center + 2.0 * in.R;
    require(g.node(0) <= lo2 && g.node(g.size() - 1) >= hi2, ErrorKind::Domain, "grid does not cover B(2R)");
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.node(i);
        if (t < lo2 || t > hi2) continue;
        const double rho = weight_rho(M, t);
        require(radial_ricci_term(M, t, 1.0) >= -in.tau * rho - 1e-12 * (1.0 + std::abs(rho)), ErrorKind::InvalidInput,
                "Ric >= -tau*rho fails on B(2R)");
    }
    const auto cg = cell_gradients(u);
    double inner = 0.0, shell = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double a = g.node(c), b = g.node(c + 1);
        const double in_R = coverage(a, b, in.center - in.R, in.center + in.R);
        const double in_2R = coverage(a, b, lo2, hi2);
        if (in_2R == 0.0) continue;
        const double g2 = norm2(cg.grad[c]);
        inner += in_R * cg.measure[c] * weight_rho(M, g.midpoint(c)) * std::pow(g2, 0.5 * in.p);
        shell += (in_2R - in_R) * cg.measure[c] * std::pow(g2 + in.eps, 0.5 * in.p);
    }
    VerifierReport r;
    r.name = "weighted_caccioppoli";
    r.min = r.max = r.mean = k.C * inner;
    r.threshold = 100.0 * k.B / (in.R * in.R) * shell;
    r.pass = r.max <= r.threshold * (1.0 + 1e-12);
    r.included = 1;
    r.values = {r.max};
    return r;
}

MonotonicityGap monotonicity_gap(std::span<const double> X, std::span<const double> Y, double p) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(!X.empty() && X.size() == Y.size(), ErrorKind::InvalidInput, "vectors must have equal nonzero size");
    const double nx = vnorm(X), ny = vnorm(Y);
    const double cx = nx > 0.0 ? std::pow(nx, p - 2.0) : 0.0;
    const double cy = ny > 0.0 ? std::pow(ny, p - 2.0) : 0.0;
    double lhs = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double d = X[i] - Y[i];
        lhs += d * (cx * X[i] - cy * Y[i]);
        d2 += d * d;
    }
    MonotonicityGap gap;
    gap.lhs = lhs;
    gap.psi = p >= 2.0 ? std::pow(d2, 0.5 * p)
                       : (p - 1.0) * d2 / std::pow(1.0 + nx * nx + ny * ny, 0.5 * (2.0 - p));
    gap.ratio = gap.psi > 0.0 ? lhs / gap.psi : kNaN;
    return gap;
}

namespace {

void clip_norm(std::vector<double>& v, double r) {
    const double n = vnorm(v);
    if (n > r)
        for (double& x : v) x *= r / n;
}

// Pair kinds cycle: isotropic, near-collinear, near-equal.
std::pair<std::vector<double>, std::vector<double>> sample_pair(std::mt19937_64& eng, std::size_t kind,
                                                                std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> X(dim), Y(dim);
    for (double& x : X) x = 3.0 * normal(eng);
    if (kind == 0) {
        for (double& y : Y) y = 3.0 * normal(eng);
    } else if (kind == 1) {
        const double lambda = -2.0 + 4.0 * unif(eng);
        for (std::size_t i = 0; i < dim; ++i) Y[i] = lambda * X[i] + 1e-3 * normal(eng);
    } else {
        const double step = std::pow(10.0, -2.0 - 6.0 * unif(eng));
        for (std::size_t i = 0; i < dim; ++i) Y[i] = X[i] + step * normal(eng);
    }
    clip_norm(X, 10.0);
    clip_norm(Y, 10.0);
    return {std::move(X), std::move(Y)};
}

}  // namespace

MonotonicitySuite monotonicity_suite(double p, std::size_t samples, std::uint64_t seed, std::size_t dim) {
    require(samples > 0 && dim > 0, ErrorKind::InvalidInput, "need at least one sample of positive dimension");
    MonotonicitySuite out;
    out.p = p;
    out.samples = samples;
    out.C_emp = kInf;
    for (std::size_t i = 0; i < samples; ++i) {
        auto eng = sample_engine(seed, 0, i);
        const auto [X, Y] = sample_pair(eng, i % 3, dim);
        const auto gap = monotonicity_gap(X, Y, p);
        double fx = 0.0, d = 0.0;
        for (std::size_t k = 0; k < dim; ++k) d += (X[k] - Y[k]) * (X[k] - Y[k]);
        fx = std::pow(vnorm(X), p - 1.0) + std::pow(vnorm(Y), p - 1.0);
        if (gap.lhs < -1e-12 * std::sqrt(d) * fx) ++out.negative_lhs;
        if (gap.lhs == 0.0 && X != Y) ++out.zero_lhs_distinct;
        if (gap.psi > 0.0) out.C_emp = std::min(out.C_emp, gap.ratio);
    }
    out.fresh_min_ratio = kInf;
    for (std::size_t i = 0; i < samples; ++i) {
        auto eng = sample_engine(seed, 1, i);
        const auto [X, Y] = sample_pair(eng, i % 3, dim);
        const auto gap = monotonicity_gap(X, Y, p);
        if (gap.lhs < 0.5 * out.C_emp * gap.psi) ++out.fresh_violations;
        if (gap.psi > 0.0) out.fresh_min_ratio = std::min(out.fresh_min_ratio, gap.ratio);
    }
    out.pass = out.negative_lhs == 0 && out.zero_lhs_distinct == 0 && out.C_emp > 0.0 && std::isfinite(out.C_emp) &&
               out.fresh_violations == 0;
    return out;
}

RegularizationGap regularization_gap(std::span<const double> X, std::span<const double> Y, double eps, double p,
                                     double delta1) {
    require(p >= 1.0, ErrorKind::InvalidInput, "p must be at least 1");
    require(eps >= 0.0 && delta1 > 0.0, ErrorKind::InvalidInput, "need eps >= 0 and delta1 > 0");
    const double nx = vnorm(X), ny = vnorm(Y);
    require(nx >= ny, ErrorKind::InvalidInput, "need |X| >= |Y|");
    RegularizationGap r;
    if (p > 2.0) {
        // 2q < p ≤ 2q + 2
        const int q = static_cast<int>(std::ceil(p / 2.0)) - 1;
        const double x = p * eps / (delta1 * delta1);
        double xn = 1.0, fact = 1.0, sum = 0.0;
        for (int k = 1; k <= q; ++k) {
            xn *= x;
            fact *= k;
            r.a += xn / fact;
            sum += xn;
        }
        r.delta = sum * std::pow(delta1, p);
    }
    r.lhs = std::pow(nx * nx + eps, 0.5 * p) - std::pow(ny * ny + eps, 0.5 * p);
    r.rhs = r.a * (std::pow(nx, p) - std::pow(ny, p)) + r.delta;
    r.pass = r.lhs <= r.rhs + 1e-12 * (std::abs(r.rhs) + std::abs(r.lhs));
    return r;
}

RegularizationSuite regularization_suite(double p_lo, double p_hi, std::size_t samples, std::uint64_t seed) {
    require(p_lo >= 1.0 && p_hi > p_lo, ErrorKind::InvalidInput, "need 1 <= p_lo < p_hi");
    require(samples > 0, ErrorKind::InvalidInput, "need at least one sample");
    RegularizationSuite out{p_lo, p_hi, samples, 0, kInf, false};
    for (std::size_t i = 0; i < samples; ++i) {
        auto eng = sample_engine(seed, 2, i);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double p = p_hi - (p_hi - p_lo) * unif(eng);
        static constexpr double scales[] = {1.0, 0.1, 0.01};
        const double nx = 10.0 * std::sqrt(unif(eng)) * scales[i % 3];
        const double ny = nx * unif(eng);
        const double eps = std::pow(10.0, -8.0 * unif(eng));
        const double delta1 = std::pow(10.0, -2.0 + 3.0 * unif(eng));
        std::vector<double> X(3), Y(3);
        for (double& x : X) x = normal(eng);
        for (double& y : Y) y = normal(eng);
        const double sx = nx / vnorm(X), sy = ny / vnorm(Y);
        for (double& x : X) x *= sx;
        for (double& y : Y) y *= sy;
        if (vnorm(X) < vnorm(Y)) std::swap(X, Y);
        const auto gap = regularization_gap(X, Y, eps, p, delta1);
        if (!gap.pass) ++out.violations;
        const double denom = std::abs(gap.rhs) + std::abs(gap.lhs);
        if (denom > 0.0) out.min_margin = std::min(out.min_margin, (gap.rhs - gap.lhs) / denom);
    }
    out.pass = out.violations == 0;
    return out;
}

VerifierReport weighted_poincare_check(const ModelManifold& M, const std::vector<DiscreteField>& family, double tol) {
    M.warped();
    require(!family.empty(), ErrorKind::InvalidInput, "empty test family");
    VerifierReport r;
    r.name = "weighted_poincare";
    r.min = kInf;
    r.max = -kInf;
    r.threshold = 1.0 + tol;
    double sum = 0.0;
    for (const auto& psi : family) {
        require(psi.is_1d(), ErrorKind::InvalidInput, "test functions must be radial");
        const auto& g = psi.grid1d();
        require(g.manifold().has_value(), ErrorKind::InvalidInput, "test functions need a manifold grid");
        require(psi[0] == 0.0 && psi[psi.size() - 1] == 0.0, ErrorKind::InvalidInput,
                "test functions must vanish at both grid ends");
        if (!admissibility_check(M, g.nodes()).ok)
            fail(ErrorKind::InvalidInput, "manifold fails the admissibility check on the grid");
        const auto cg = cell_gradients(psi);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double mid = 0.5 * (psi[c] + psi[c + 1]);
            lhs += cg.measure[c] * weight_rho(M, g.midpoint(c)) * mid * mid;
            rhs += cg.measure[c] * norm2(cg.grad[c]);
        }
        const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? kInf : 0.0);
        r.values.push_back(ratio);
        r.min = std::min(r.min, ratio);
        r.max = std::max(r.max, ratio);
        sum += ratio;
    }
    r.included = family.size();
    r.mean = sum / static_cast<double>(family.size());
    r.pass = r.max <= r.threshold;
    return r;
}

double observed_order(std::span<const double> h, std::span<const double> err) {
    require(h.size() >= 2 && h.size() == err.size(), ErrorKind::InvalidInput, "need matching h and error lists");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        require(h[i] > 0.0 && err[i] > 0.0, ErrorKind::InvalidInput, "h and errors must be positive");
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(h.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// --- gallery ----------------------------------------------------------------

GalleryItem gallery_log(int m, std::size_t nodes) {
    require(m >= 2, ErrorKind::InvalidInput, "m must be at least 2");
    auto g = std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(m), 1.0, 2.0, nodes));
    RadialProfile prof{[](double t) { return std::log(t); }, [](double t) { return 1.0 / t; },
                       [](double t) { return -1.0 / (t * t); }, [](double t) { return 2.0 / (t * t * t); }};
    GalleryItem item{"a", "log r on [1, 2], m = " + std::to_string(m), DiscreteField::sample(g, std::move(prof)),
                     static_cast<double>(m), m};
    item.expected_kato = m;
    return item;
}

GalleryItem gallery_log_planar(std::size_t n) {
    require(n % 2 == 0, ErrorKind::InvalidInput, "use an even node count so the origin is not a node");
    auto g = std::make_shared<const Grid2D>(-2.0, 2.0, -2.0, 2.0, n, n);
    Analytic2D f{
        [](double x, double y) { return 0.5 * std::log(x * x + y * y); },
        [](double x, double y) {
            const double r2 = x * x + y * y;
            return Vec2{x / r2, y / r2};
        },
        [](double x, double y) {
            const double r4 = std::pow(x * x + y * y, 2);
            return Sym2{(y * y - x * x) / r4, -2.0 * x * y / r4, (x * x - y * y) / r4};
        }};
    GalleryItem item{"a", "log |x| on the planar annulus 1 <= |x| <= 2", DiscreteField::sample(g, std::move(f)), 2.0, 2};
    item.checks.mask.assign(g->size(), 0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::hypot(g->x(i), g->y(j));
            item.checks.mask[g->index(i, j)] = r >= 1.0 && r <= 2.0;
        }
    item.expected_kato = 2.0;
    return item;
}

GalleryItem gallery_power(double p, int m, std::size_t nodes) {
    require(p > 1.0 && m >= 2 && p != m, ErrorKind::InvalidInput, "need p > 1, m >= 2 and p != m");
    const double a = (p - m) / (p - 1.0);
    auto g = std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(m), 1.0, 2.0, nodes));
    RadialProfile prof{[a](double t) { return std::pow(t, a); }, [a](double t) { return a * std::pow(t, a - 1); },
                       [a](double t) { return a * (a - 1) * std::pow(t, a - 2); },
                       [a](double t) { return a * (a - 1) * (a - 2) * std::pow(t, a - 3); }};
    GalleryItem item{"b", "r^((p-m)/(p-1)) on [1, 2], p = " + std::to_string(p) + ", m = " + std::to_string(m),
                     DiscreteField::sample(g, std::move(prof)), p, m};
    item.expected_kato = 1.0 + (p - 1.0) * (p - 1.0) / (m - 1.0);
    return item;
}

GalleryItem gallery_constant(double c, std::size_t n) {
    auto g = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, n, n);
    Analytic2D f{[c](double, double) { return c; }, [](double, double) { return Vec2{0.0, 0.0}; },
                 [](double, double) { return Sym2{}; }};
    return GalleryItem{"c", "constant", DiscreteField::sample(g, std::move(f)), 2.0, 2};
}

GalleryItem gallery_linear(double a, double b, std::size_t n) {
    auto g = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, n, n);
    Analytic2D f{[a, b](double x, double y) { return a * x + b * y; }, [a, b](double, double) { return Vec2{a, b}; },
                 [](double, double) { return Sym2{}; }};
    GalleryItem item{"c", "linear", DiscreteField::sample(g, std::move(f)), 2.0, 2};
    item.expected_kato = kInf;
    return item;
}

GalleryItem gallery_arctan(std::size_t nodes) {
    const auto M = ModelManifold::warped_product(3, WarpFunction(PolyEvenWarp{2.0}));
    const double p = 3.0;
    auto g = std::make_shared<const Grid1D>(Grid1D::on_manifold(M, sinh_nodes(-1e6, 1e6, nodes)));
    std::vector<double> v(g->size());
    v[0] = inverse_area_integral(M, p, -kInf, g->node(0));
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] + inverse_area_integral(M, p, g->node(i - 1), g->node(i));
    auto prof = radial_profile(M, p, 0.0, 1.0, [M, p](double t) { return inverse_area_integral(M, p, -kInf, t); });
    GalleryItem item{"d", "integral of A^(-1/2) with A = (1+t^2)^2, p = 3",
                     DiscreteField::annotated(g, std::move(v), std::move(prof)), p, 3};
    item.expected_kato = 3.0;
    item.q = 3.0;
    item.expected_q_energy = std::numbers::pi;
    return item;
}

std::vector<GalleryItem> example_gallery() {
    std::vector<GalleryItem> items;
    items.push_back(gallery_log_planar());
    items.push_back(gallery_log(3));
    items.push_back(gallery_power(3.0, 4));
    items.push_back(gallery_constant());
    items.push_back(gallery_linear());
    items.push_back(gallery_arctan());
    return items;
}

}  // namespace plap
