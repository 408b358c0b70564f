#include "plap/capacity.hpp"

#include "plap/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace plap {

Condenser Condenser::interval(const Grid1D& grid, double inner_value, double outer_value) {
    Condenser c{std::vector<char>(grid.size(), 0), std::vector<char>(grid.size(), 0), inner_value, outer_value};
    c.inner.front() = 1;
    c.outer.back() = 1;
    return c;
}

Condenser Condenser::annulus(const Grid2D& grid, double r_in, double r_out, double cx, double cy) {
    require(0.0 < r_in && r_in < r_out, ErrorKind::InvalidInput, "annulus needs 0 < r_in < r_out");
    Condenser c{std::vector<char>(grid.size(), 0), std::vector<char>(grid.size(), 0), 1.0, 0.0};
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double r = std::hypot(grid.x(i) - cx, grid.y(j) - cy);
            const auto k = grid.index(i, j);
            if (r <= r_in) c.inner[k] = 1;
            else if (r >= r_out || grid.on_boundary(i, j)) c.outer[k] = 1;
        }
    }
    return c;
}

BoundaryCondition Condenser::boundary() const {
    require(inner.size() == outer.size(), ErrorKind::InvalidInput, "condenser masks differ in size");
    BoundaryCondition bc{std::vector<char>(inner.size(), 0), std::vector<double>(inner.size(), 0.0)};
    bool any_in = false, any_out = false;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        require(!(inner[i] && outer[i]), ErrorKind::InvalidInput, "condenser regions overlap");
        if (inner[i]) {
            bc.fixed[i] = 1;
            bc.values[i] = inner_value;
            any_in = true;
        } else if (outer[i]) {
            bc.fixed[i] = 1;
            bc.values[i] = outer_value;
            any_out = true;
        }
    }
    require(any_in && any_out, ErrorKind::InvalidInput, "condenser regions must be nonempty");
    return bc;
}

CapacityResult capacity_analytic(const ModelManifold& M, double p, double a, double b) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(a < b, ErrorKind::InvalidInput, "capacity needs a < b");
    const double I = inverse_area_integral(M, p, a, b);
    return {std::isinf(I) ? 0.0 : std::pow(I, 1.0 - p), p, CapacityMethod::Analytic, std::nullopt};
}

CapacityResult capacity_numeric(const GridRef& grid, double p, const Condenser& condenser, const SolveConfig& cfg) {
    auto [fields, rep] = epsilon_continuation(p, grid, condenser.boundary(), cfg);
    DiscreteField u = std::move(fields.back());
    const double e = energy({p, 0.0}, u);
    return {e, p, CapacityMethod::Numeric, std::move(u)};
}

MonotonicityReport capacity_monotonicity_suite(const ModelManifold& M, double p, double a,
                                               std::span<const double> outer_b, std::span<const double> inner_a) {
    require(!outer_b.empty(), ErrorKind::InvalidInput, "no outer radii");
    MonotonicityReport r;
    const double slack = 1e-12;
    for (double b : outer_b) {
        require(r.outer_b.empty() || b > r.outer_b.back(), ErrorKind::InvalidInput, "outer radii must increase");
        r.outer_b.push_back(b);
        r.cap_vs_outer.push_back(capacity_analytic(M, p, a, b).value);
    }
    const double b0 = outer_b.front();
    for (double ai : inner_a) {
        require(ai < b0 && (r.inner_a.empty() || ai > r.inner_a.back()), ErrorKind::InvalidInput,
                "inner radii must increase and stay below the first outer radius");
        r.inner_a.push_back(ai);
        r.cap_vs_inner.push_back(capacity_analytic(M, p, ai, b0).value);
    }
    r.outer_monotone = r.inner_monotone = true;
    for (std::size_t k = 1; k < r.cap_vs_outer.size(); ++k)
        if (r.cap_vs_outer[k] > r.cap_vs_outer[k - 1] * (1 + slack)) r.outer_monotone = false;
    for (std::size_t k = 1; k < r.cap_vs_inner.size(); ++k)
        if (r.cap_vs_inner[k] < r.cap_vs_inner[k - 1] * (1 - slack)) r.inner_monotone = false;
    r.repeatable = capacity_analytic(M, p, a, b0).value == capacity_analytic(M, p, a, b0).value;

    const bool open_end = !M.domain().bounded_above();
    r.limit = open_end ? capacity_analytic(M, p, a, kInf).value : capacity_analytic(M, p, a, M.domain().hi).value;
    r.exhaustion = true;
    double prev = kInf;
    for (double c : r.cap_vs_outer) {
        const double d = std::abs(c - r.limit);
        if (d > prev * (1 + slack)) r.exhaustion = false;
        prev = d;
    }
    if (r.cap_vs_outer.size() > 1 && !(prev < std::abs(r.cap_vs_outer.front() - r.limit))) r.exhaustion = false;
    return r;
}

namespace {

double log_g(const ModelManifold& M, double p, double t) { return -M.log_area(t) / (p - 1.0); }

}  // namespace

SweepResult end_barrier_sweep(const ModelManifold& M, double p, double R0, std::span<const double> R_list,
                              EndDirection direction, std::size_t nodes) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(R_list.size() >= 2, ErrorKind::InvalidInput, "sweep needs at least two radii");
    const bool plus = direction == EndDirection::Plus;
    const double sign = plus ? 1.0 : -1.0;
    for (std::size_t i = 0; i < R_list.size(); ++i)
        require(R_list[i] > R0 && (i == 0 || R_list[i] > R_list[i - 1]), ErrorKind::InvalidInput,
                "radii must increase and exceed R0");
    require(R_list.back() > 0.0 && R_list[R_list.size() - 2] > 0.0, ErrorKind::InvalidInput,
            "the two largest radii must be positive");

    SweepResult out;
    out.integral_test = classify_end(M, p, direction);
    auto phi_to = [&](double s) {
        return plus ? inverse_area_integral(M, p, R0, s) : inverse_area_integral(M, p, -s, -R0);
    };
    const double phi_one = phi_to(R0 + 1.0);
    for (double R : R_list) {
        out.R.push_back(R);
        std::vector<double> s = sinh_nodes(R0, R, nodes);
        std::vector<double> t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = sign * s[plus ? i : s.size() - 1 - i];
        auto grid = std::make_shared<const Grid1D>(Grid1D::on_manifold(M, std::move(t)));
        out.barriers.push_back(plus ? radial_p_harmonic(M, p, grid, 1.0, 0.0) : radial_p_harmonic(M, p, grid, 0.0, 1.0));
        const double phi = phi_to(R);
        out.phi.push_back(phi);
        out.deviation.push_back(R <= R0 + 1.0 ? 1.0 : phi_one / phi);
    }

    const std::size_t n = R_list.size();
    const double s1 = R_list[n - 2], s2 = R_list[n - 1];
    const double lg1 = log_g(M, p, sign * s1), lg2 = log_g(M, p, sign * s2);
    out.tail = numeric_tail_test(lg1, lg2, s1, s2);
    if (out.tail == TailVerdict::Converges) {
        // Φ(∞) ≈ Φ(R) + R·g(R)/(−k−1) for a local power law g ~ s^k
        const double k = (lg2 - lg1) / (std::log(s2) - std::log(s1));
        out.phi_limit = out.phi.back() + s2 * std::exp(lg2) / (-k - 1.0);
        out.limit_energy = std::pow(out.phi_limit, 1.0 - p);
        out.limit_at_far_end = 1.0 - out.phi.back() / out.phi_limit;
        const bool ok = std::isfinite(out.limit_energy) && out.limit_energy > 0.0 && out.limit_at_far_end < 1e-2;
        out.diagnosis = ok ? EndType::Hyperbolic : EndType::Parabolic;
    } else {
        out.phi_limit = kInf;
        out.limit_energy = 0.0;
        out.limit_at_far_end = 1.0;
        bool shrinking = true;
        for (std::size_t i = 1; i < n; ++i)
            if (out.deviation[i] > out.deviation[i - 1]) shrinking = false;
        out.diagnosis = shrinking ? EndType::Parabolic : EndType::Hyperbolic;
    }
    if (out.diagnosis != out.integral_test)
        fail(ErrorKind::InternalInconsistency, std::string("barrier sweep says ") + to_string(out.diagnosis) +
                                                   " but the integral test says " + to_string(out.integral_test));
    return out;
}

DiscreteField barrier_limit(const ModelManifold& M, double p, std::shared_ptr<const Grid1D> grid) {
    if (classify_end(M, p, EndDirection::Plus) != EndType::Hyperbolic)
        fail(ErrorKind::NoBarrier, "barrier limit is constant on a parabolic end");
    const double R0 = grid->node(0);
    const double total = inverse_area_integral(M, p, R0, kInf);
    std::vector<double> w(grid->size());
    double phi = 0.0;
    w[0] = 1.0;
    for (std::size_t i = 1; i < w.size(); ++i) {
        phi += inverse_area_integral(M, p, grid->node(i - 1), grid->node(i));
        w[i] = 1.0 - phi / total;
    }
    auto prof = radial_profile(M, p, 1.0, -1.0 / total,
                               [M, p, R0](double t) { return inverse_area_integral(M, p, R0, t); });
    return DiscreteField::annotated(grid, std::move(w), std::move(prof));
}

TailProfile tail_energy_profile(const ModelManifold& M, double p, const DiscreteField& w,
                                std::span<const double> R_values, double lambda_p) {
    require(lambda_p >= 0.0, ErrorKind::InvalidInput, "lambda_p must be >= 0");
    require(!R_values.empty(), ErrorKind::InvalidInput, "no radii");
    if (classify_end(M, p, EndDirection::Plus) != EndType::Hyperbolic)
        fail(ErrorKind::UnsupportedVariant, "tail decay is stated for hyperbolic ends");
    const auto& g = w.grid1d();
    const double lo = g.node(0), hi = g.node(g.size() - 1);
    const auto cg = cell_gradients(w);
    std::vector<double> cell(g.cells());
    for (std::size_t k = 0; k < cell.size(); ++k) cell[k] = cg.measure[k] * std::pow(std::abs(cg.grad[k][0]), p);

    auto tail_at = [&](double R) {
        require(R >= lo && R <= hi, ErrorKind::Domain, "R outside the grid of the barrier");
        double s = 0.0;
        for (std::size_t k = cell.size(); k-- > 0;) {
            const double a = g.node(k), b = g.node(k + 1);
            if (a >= R) s += cell[k];
            else if (b > R) s += cell[k] * (b - R) / (b - a);
            else break;
        }
        return s;
    };
    const double root = std::pow(lambda_p, 1.0 / p);
    auto shape = [&](double R) { return std::pow(R, p) * std::exp(-root * (R - 1.0) / (p + 1.0)); };

    TailProfile out;
    out.slope_bound = -root / (p + 1.0);
    for (double R : R_values) {
        require(out.rows.empty() || R > out.rows.back().R, ErrorKind::InvalidInput, "R values must increase");
        out.rows.push_back({R, tail_at(R), 0.0, false});
    }
    out.C3 = out.rows.front().measured / shape(out.rows.front().R);
    out.pass = true;
    out.tails_nonincreasing = true;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        auto& row = out.rows[i];
        row.bound = out.C3 * shape(row.R);
        row.pass = row.measured <= row.bound * (1 + 1e-9);
        out.pass = out.pass && row.pass;
        if (i > 0 && row.measured > out.rows[i - 1].measured) out.tails_nonincreasing = false;
    }
    if (out.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(out.rows.size());
        for (const auto& row : out.rows) {
            const double y = std::log(row.measured);
            sx += row.R;
            sy += y;
            sxx += row.R * row.R;
            sxy += row.R * y;
        }
        out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        out.pass = out.pass && out.slope <= out.slope_bound;
    }
    out.pass = out.pass && out.tails_nonincreasing;
    return out;
}

VolumeReport volume_growth_check(const ModelManifold& M, double p, double lambda_p, std::span<const double> R_values) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(lambda_p >= 0.0, ErrorKind::InvalidInput, "lambda_p must be >= 0");
    require(R_values.size() >= 2, ErrorKind::InvalidInput, "volume check needs at least two radii");
    VolumeReport out;
    out.end = classify_end(M, p, EndDirection::Plus);
    const double root = std::pow(lambda_p, 1.0 / p);
    out.pass = true;
    if (out.end == EndType::Hyperbolic) {
        auto shape = [&](double R) {
            return std::pow(R, -p * (p - 1.0)) * std::exp((p - 1.0) * root * (R - 1.0) / (p + 1.0));
        };
        for (double R : R_values) out.rows.push_back({R, volume_between(M, R, R + 1.0), 0.0, false});
        out.C = out.rows.front().measured / shape(out.rows.front().R);
        for (auto& row : out.rows) {
            row.bound = out.C * shape(row.R);
            row.pass = row.measured >= row.bound * (1 - 1e-9);
            out.pass = out.pass && row.pass;
        }
        return out;
    }
    for (double R : R_values) {
        M.check_in_domain(R);
        const double tail = integrate_adaptive([&](double t) { return M.area(t); }, R, kInf);
        out.rows.push_back({R, tail, kInf, true});
    }
    if (lambda_p == 0.0) return out;
    auto shape = [&](double R) { return std::pow(R, p) * std::exp(-root * (R - 1.0) / (p + 1.0)); };
    out.C = out.rows.front().measured / shape(out.rows.front().R);
    for (auto& row : out.rows) {
        row.bound = out.C * shape(row.R);
        row.pass = std::isfinite(row.measured) && row.measured <= row.bound * (1 + 1e-9);
        out.pass = out.pass && row.pass;
    }
    return out;
}

double p_poincare_bound(double lambda2, double p) {
    require(lambda2 >= 0.0, ErrorKind::InvalidInput, "lambda_2 must be >= 0");
    if (!(p >= 2.0)) fail(ErrorKind::UnsupportedVariant, "the lambda_p bound is stated for p >= 2");
    return std::pow(2.0 * std::sqrt(lambda2) / p, p);
}

}  // namespace plap
