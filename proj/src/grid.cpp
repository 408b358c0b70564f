#include "plap/grid.hpp"

#include "plap/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plap {

namespace {

constexpr std::size_t kMinNodes = 8;

// Fornberg weights for the k-th derivative at x0 from stencil nodes xs.
template <std::size_t N>
std::array<double, N> fd_weights(double x0, const std::array<double, N>& xs, int order) {
    std::array<std::array<double, 3>, N> c{};
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, N> w{};
    for (std::size_t i = 0; i < N; ++i) w[i] = c[i][order];
    return w;
}

void check_spacing(std::span<const double> t) {
    require(t.size() >= kMinNodes, ErrorKind::InvalidInput,
            "1D grid needs at least 8 nodes, got " + std::to_string(t.size()));
    for (std::size_t i = 1; i < t.size(); ++i) {
        require(std::isfinite(t[i]) && t[i] > t[i - 1], ErrorKind::InvalidInput,
                "grid nodes must be finite and strictly increasing");
    }
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double r = (t[i + 1] - t[i]) / (t[i] - t[i - 1]);
        require(r >= 0.25 - 1e-12 && r <= 4.0 + 1e-12, ErrorKind::InvalidInput,
                "adjacent spacing ratio outside [1/4, 4]");
    }
}

}  // namespace

Grid1D::Grid1D(std::optional<ModelManifold> M, std::vector<double> nodes)
    : manifold_(std::move(M)), nodes_(std::move(nodes)) {
    check_spacing(nodes_);
    const std::size_t n = nodes_.size();
    area_node_.resize(n);
    area_mid_.resize(n - 1);
    weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) area_node_[i] = manifold_ ? manifold_->area(nodes_[i]) : 1.0;
    for (std::size_t c = 0; c + 1 < n; ++c) area_mid_[c] = manifold_ ? manifold_->area(midpoint(c)) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? spacing(i - 1) : 0.0;
        const double right = i + 1 < n ? spacing(i) : 0.0;
        weights_[i] = area_node_[i] * 0.5 * (left + right);
        // A vanishes only at a radial origin endpoint
        const bool origin = (i == 0 || i + 1 == n) && area_node_[i] == 0.0;
        require(weights_[i] > 0.0 || origin, ErrorKind::InvalidInput,
                "non-positive measure weight at node " + std::to_string(i));
        require(std::isfinite(weights_[i]), ErrorKind::InvalidInput,
                "measure weight overflows at node " + std::to_string(i));
    }
}

Grid1D Grid1D::on_manifold(const ModelManifold& M, std::vector<double> nodes) {
    return Grid1D(M, std::move(nodes));
}

Grid1D Grid1D::uniform(const ModelManifold& M, double a, double b, std::size_t n) {
    return Grid1D(M, uniform_nodes(a, b, n));
}

Grid1D Grid1D::flat(std::vector<double> nodes) { return Grid1D(std::nullopt, std::move(nodes)); }

Grid1D Grid1D::flat_uniform(double a, double b, std::size_t n) {
    return Grid1D(std::nullopt, uniform_nodes(a, b, n));
}

std::vector<double> uniform_nodes(double a, double b, std::size_t n) {
    require(n >= 2 && a < b, ErrorKind::InvalidInput, "uniform_nodes needs a < b and n >= 2");
    std::vector<double> t(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) t[i] = a + h * static_cast<double>(i);
    t.back() = b;
    return t;
}

std::vector<double> sinh_nodes(double a, double b, std::size_t n, double c) {
    require(c > 0.0, ErrorKind::InvalidInput, "sinh grading scale must be positive");
    auto s = uniform_nodes(std::asinh(a / c), std::asinh(b / c), n);
    for (auto& v : s) v = c * std::sinh(v);
    s.front() = a;
    s.back() = b;
    return s;
}

std::vector<double> geometric_nodes(double a, double b, std::size_t n) {
    require(a > 0.0, ErrorKind::InvalidInput, "geometric nodes need a > 0");
    auto s = uniform_nodes(std::log(a), std::log(b), n);
    for (auto& v : s) v = std::exp(v);
    s.front() = a;
    s.back() = b;
    return s;
}

Grid2D::Grid2D(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny)
    : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny) {
    require(nx >= kMinNodes && ny >= kMinNodes, ErrorKind::InvalidInput,
            "2D grid needs at least 8 nodes per direction");
    require(x1 > x0 && y1 > y0, ErrorKind::InvalidInput, "empty rectangle");
    hx_ = (x1 - x0) / static_cast<double>(nx - 1);
    hy_ = (y1 - y0) / static_cast<double>(ny - 1);
}

std::size_t Grid2D::collar_depth(std::size_t i, std::size_t j) const noexcept {
    return std::min({i, j, nx_ - 1 - i, ny_ - 1 - j});
}

double Grid2D::node_weight(std::size_t i, std::size_t j) const noexcept {
    const double wx = (i == 0 || i + 1 == nx_) ? 0.5 : 1.0;
    const double wy = (j == 0 || j + 1 == ny_) ? 0.5 : 1.0;
    return wx * wy * hx_ * hy_;
}

// --- DiscreteField --------------------------------------------------------

DiscreteField::DiscreteField(GridRef grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    const std::size_t n = std::visit([](const auto& g) {
        require(g != nullptr, ErrorKind::InvalidInput, "field needs a grid");
        return g->size();
    }, grid_);
    require(values_.size() == n, ErrorKind::InvalidInput, "field size does not match grid");
    for (double v : values_) require(std::isfinite(v), ErrorKind::InvalidInput, "non-finite field value");
}

DiscreteField DiscreteField::sample(std::shared_ptr<const Grid1D> grid, RadialProfile profile) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = profile.value(grid->node(i));
    DiscreteField f(std::move(grid), std::move(v));
    f.analytic_ = std::move(profile);
    return f;
}

DiscreteField DiscreteField::sample(std::shared_ptr<const Grid2D> grid, Analytic2D field) {
    std::vector<double> v(grid->size());
    for (std::size_t j = 0; j < grid->ny(); ++j)
        for (std::size_t i = 0; i < grid->nx(); ++i) v[grid->index(i, j)] = field.value(grid->x(i), grid->y(j));
    DiscreteField f(std::move(grid), std::move(v));
    f.analytic_ = std::move(field);
    return f;
}

DiscreteField DiscreteField::annotated(GridRef grid, std::vector<double> values, AnalyticDescriptor d) {
    DiscreteField f(std::move(grid), std::move(values));
    f.analytic_ = std::move(d);
    return f;
}

DiscreteField DiscreteField::from_function(std::shared_ptr<const Grid1D> grid,
                                           const std::function<double(double)>& u) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u(grid->node(i));
    return DiscreteField(std::move(grid), std::move(v));
}

DiscreteField DiscreteField::from_function(std::shared_ptr<const Grid2D> grid,
                                           const std::function<double(double, double)>& u) {
    std::vector<double> v(grid->size());
    for (std::size_t j = 0; j < grid->ny(); ++j)
        for (std::size_t i = 0; i < grid->nx(); ++i) v[grid->index(i, j)] = u(grid->x(i), grid->y(j));
    return DiscreteField(std::move(grid), std::move(v));
}

const Grid1D& DiscreteField::grid1d() const { return *grid1d_ptr(); }
const Grid2D& DiscreteField::grid2d() const { return *grid2d_ptr(); }

std::shared_ptr<const Grid1D> DiscreteField::grid1d_ptr() const {
    const auto* g = std::get_if<std::shared_ptr<const Grid1D>>(&grid_);
    if (!g) fail(ErrorKind::UnsupportedVariant, "field is not on a 1D grid");
    return *g;
}

std::shared_ptr<const Grid2D> DiscreteField::grid2d_ptr() const {
    const auto* g = std::get_if<std::shared_ptr<const Grid2D>>(&grid_);
    if (!g) fail(ErrorKind::UnsupportedVariant, "field is not on a 2D grid");
    return *g;
}

const RadialProfile* DiscreteField::radial_profile() const noexcept {
    return analytic_ ? std::get_if<RadialProfile>(&*analytic_) : nullptr;
}

DiscreteField DiscreteField::with_values(std::vector<double> values) const {
    return DiscreteField(grid_, std::move(values));
}

bool DiscreteField::shares_grid(const DiscreteField& other) const noexcept {
    if (grid_.index() != other.grid_.index()) return false;
    return std::visit([&](const auto& g) {
        using P = std::decay_t<decltype(g)>;
        return g.get() == std::get<P>(other.grid_).get();
    }, grid_);
}

// --- finite differences ---------------------------------------------------

std::vector<double> derivative_1d(const Grid1D& grid, std::span<const double> u) {
    const std::size_t n = grid.size();
    require(u.size() == n, ErrorKind::InvalidInput, "value count does not match grid");
    std::vector<double> d(n);
    const auto t = grid.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
        const auto w = fd_weights<3>(t[i], {t[s], t[s + 1], t[s + 2]}, 1);
        d[i] = w[0] * u[s] + w[1] * u[s + 1] + w[2] * u[s + 2];
    }
    return d;
}

std::vector<double> second_derivative_1d(const Grid1D& grid, std::span<const double> u) {
    const std::size_t n = grid.size();
    require(u.size() == n, ErrorKind::InvalidInput, "value count does not match grid");
    std::vector<double> d(n);
    const auto t = grid.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || i + 1 == n) {
            const std::size_t s = i == 0 ? 0 : n - 4;
            const auto w = fd_weights<4>(t[i], {t[s], t[s + 1], t[s + 2], t[s + 3]}, 2);
            d[i] = w[0] * u[s] + w[1] * u[s + 1] + w[2] * u[s + 2] + w[3] * u[s + 3];
        } else {
            const auto w = fd_weights<3>(t[i], {t[i - 1], t[i], t[i + 1]}, 2);
            d[i] = w[0] * u[i - 1] + w[1] * u[i] + w[2] * u[i + 1];
        }
    }
    return d;
}

namespace {

// derivative along a uniformly spaced line of n values with stride
double line_d1(std::span<const double> u, std::size_t k, std::size_t n, std::size_t base,
               std::size_t stride, double h) {
    auto at = [&](std::size_t q) { return u[base + q * stride]; };
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k + 1 == n) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

double line_d2(std::span<const double> u, std::size_t k, std::size_t n, std::size_t base,
               std::size_t stride, double h) {
    auto at = [&](std::size_t q) { return u[base + q * stride]; };
    if (k == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
    if (k + 1 == n) return (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
    return (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h);
}

}  // namespace

std::vector<Vec2> gradient_2d(const Grid2D& g, std::span<const double> u) {
    require(u.size() == g.size(), ErrorKind::InvalidInput, "value count does not match grid");
    std::vector<Vec2> out(g.size());
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            out[g.index(i, j)] = {line_d1(u, i, g.nx(), g.index(0, j), 1, g.hx()),
                                  line_d1(u, j, g.ny(), g.index(i, 0), g.nx(), g.hy())};
    return out;
}

std::vector<Vec2> gradient(const DiscreteField& field) {
    if (field.is_1d()) {
        const auto d = derivative_1d(field.grid1d(), field.values());
        std::vector<Vec2> out(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) out[i] = {d[i], 0.0};
        return out;
    }
    return gradient_2d(field.grid2d(), field.values());
}

std::vector<Sym2> hessian(const DiscreteField& field) {
    const auto u = field.values();
    if (field.is_1d()) {
        const auto d2 = second_derivative_1d(field.grid1d(), u);
        std::vector<Sym2> out(d2.size());
        for (std::size_t i = 0; i < d2.size(); ++i) out[i].xx = d2[i];
        return out;
    }
    const auto& g = field.grid2d();
    std::vector<double> ux(g.size());
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            ux[g.index(i, j)] = line_d1(u, i, g.nx(), g.index(0, j), 1, g.hx());
    std::vector<Sym2> out(g.size());
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            auto& h = out[g.index(i, j)];
            h.xx = line_d2(u, i, g.nx(), g.index(0, j), 1, g.hx());
            h.yy = line_d2(u, j, g.ny(), g.index(i, 0), g.nx(), g.hy());
            h.xy = line_d1(ux, j, g.ny(), g.index(i, 0), g.nx(), g.hy());
        }
    }
    return out;
}

// --- quadrature -----------------------------------------------------------

double integrate(std::span<const double> values, const Grid1D& grid) {
    require(values.size() == grid.size(), ErrorKind::InvalidInput, "value count does not match grid");
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += grid.node_weight(i) * values[i];
    return s;
}

double integrate(std::span<const double> values, const Grid2D& grid) {
    require(values.size() == grid.size(), ErrorKind::InvalidInput, "value count does not match grid");
    double s = 0.0;
    for (std::size_t j = 0; j < grid.ny(); ++j)
        for (std::size_t i = 0; i < grid.nx(); ++i) s += grid.node_weight(i, j) * values[grid.index(i, j)];
    return s;
}

double integrate(std::span<const double> values, const GridRef& grid) {
    return std::visit([&](const auto& g) { return integrate(values, *g); }, grid);
}

double integrate(const DiscreteField& field) { return integrate(field.values(), field.grid()); }

CellGradients cell_gradients(const DiscreteField& field) {
    CellGradients cg;
    const auto u = field.values();
    if (field.is_1d()) {
        const auto& g = field.grid1d();
        cg.grad.resize(g.cells());
        cg.measure.resize(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            cg.grad[c] = {(u[c + 1] - u[c]) / g.spacing(c), 0.0};
            cg.measure[c] = g.cell_measure(c);
        }
        return cg;
    }
    const auto& g = field.grid2d();
    const std::size_t ncell = (g.nx() - 1) * (g.ny() - 1);
    cg.grad.resize(2 * ncell);
    cg.measure.assign(2 * ncell, 0.5 * g.hx() * g.hy());
    std::size_t k = 0;
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const double u00 = u[g.index(i, j)];
            const double u10 = u[g.index(i + 1, j)];
            const double u01 = u[g.index(i, j + 1)];
            const double u11 = u[g.index(i + 1, j + 1)];
            cg.grad[k++] = {(u10 - u00) / g.hx(), (u01 - u00) / g.hy()};
            cg.grad[k++] = {(u11 - u01) / g.hx(), (u11 - u10) / g.hy()};
        }
    }
    return cg;
}

double wp_seminorm(const DiscreteField& field, double p) {
    require(p >= 1.0, ErrorKind::InvalidInput, "W^{1,p} seminorm needs p >= 1");
    const auto cg = cell_gradients(field);
    double s = 0.0;
    for (std::size_t c = 0; c < cg.grad.size(); ++c)
        s += std::pow(std::hypot(cg.grad[c][0], cg.grad[c][1]), p) * cg.measure[c];
    return std::pow(s, 1.0 / p);
}

double wp_distance(const DiscreteField& f1, const DiscreteField& f2, double p) {
    require(f1.shares_grid(f2), ErrorKind::InvalidInput, "wp_distance needs fields on the same grid");
    std::vector<double> diff(f1.size());
    std::vector<double> absp(f1.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = f1[i] - f2[i];
        absp[i] = std::pow(std::abs(diff[i]), p);
    }
    const double lp = std::pow(integrate(absp, f1.grid()), 1.0 / p);
    return lp + wp_seminorm(f1.with_values(std::move(diff)), p);
}

}  // namespace plap
