#pragma once

#include "plap/geometry.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace plap {

using Vec2 = std::array<double, 2>;

struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

/// Measure-weighted 1D grid. Nodes carry trapezoid weights A(t_i)·(local
/// spacing); cells [t_i, t_{i+1}] carry the midpoint measure A(t_{i+½})·h_i.
class Grid1D {
public:
    /// Nodes on a model manifold; area weights come from M.
    static Grid1D on_manifold(const ModelManifold& M, std::vector<double> nodes);
    static Grid1D uniform(const ModelManifold& M, double a, double b, std::size_t n);
    /// Flat (unit-density) measure on an abstract interval.
    static Grid1D flat(std::vector<double> nodes);
    static Grid1D flat_uniform(double a, double b, std::size_t n);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double spacing(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }
    double midpoint(std::size_t cell) const { return 0.5 * (nodes_[cell] + nodes_[cell + 1]); }

    double area_at_node(std::size_t i) const { return area_node_[i]; }
    double area_at_mid(std::size_t cell) const { return area_mid_[cell]; }
    double node_weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> node_weights() const noexcept { return weights_; }
    /// ∫ over cell of dv, midpoint rule.
    double cell_measure(std::size_t cell) const { return area_mid_[cell] * spacing(cell); }

    const std::optional<ModelManifold>& manifold() const noexcept { return manifold_; }

private:
    Grid1D(std::optional<ModelManifold> M, std::vector<double> nodes);

    std::optional<ModelManifold> manifold_;
    std::vector<double> nodes_;
    std::vector<double> area_node_;
    std::vector<double> area_mid_;
    std::vector<double> weights_;
};

/// Node placements for graded 1D grids.
std::vector<double> uniform_nodes(double a, double b, std::size_t n);
/// t = c·sinh(s) with uniform s: fine near 0, geometric toward the ends.
std::vector<double> sinh_nodes(double a, double b, std::size_t n, double c = 1.0);
/// Logarithmically spaced nodes on [a, b], a > 0.
std::vector<double> geometric_nodes(double a, double b, std::size_t n);

/// Uniform Cartesian grid on [x0,x1]×[y0,y1] with flat Lebesgue measure.
class Grid2D {
public:
    Grid2D(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny);

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return nx_ * ny_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double x(std::size_t i) const noexcept { return x0_ + hx_ * static_cast<double>(i); }
    double y(std::size_t j) const noexcept { return y0_ + hy_ * static_cast<double>(j); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
    bool on_boundary(std::size_t i, std::size_t j) const noexcept {
        return i == 0 || j == 0 || i + 1 == nx_ || j + 1 == ny_;
    }
    /// Distance (in nodes) to the nearest rectangle edge.
    std::size_t collar_depth(std::size_t i, std::size_t j) const noexcept;
    double node_weight(std::size_t i, std::size_t j) const noexcept;

    double x0() const noexcept { return x0_; }
    double x1() const noexcept { return x1_; }
    double y0() const noexcept { return y0_; }
    double y1() const noexcept { return y1_; }

private:
    double x0_, x1_, y0_, y1_;
    std::size_t nx_, ny_;
    double hx_, hy_;
};

/// Closed-form radial profile u(t) and its first three derivatives.
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
};

/// Closed-form planar field with gradient and Hessian.
struct Analytic2D {
    std::function<double(double, double)> value;
    std::function<Vec2(double, double)> grad;
    std::function<Sym2(double, double)> hess;
};

using AnalyticDescriptor = std::variant<RadialProfile, Analytic2D>;
using GridRef = std::variant<std::shared_ptr<const Grid1D>, std::shared_ptr<const Grid2D>>;

class DiscreteField {
public:
    DiscreteField(GridRef grid, std::vector<double> values);

    static DiscreteField sample(std::shared_ptr<const Grid1D> grid, RadialProfile profile);
    static DiscreteField sample(std::shared_ptr<const Grid2D> grid, Analytic2D field);
    /// Node values computed elsewhere (e.g. cumulative quadrature) plus the
    /// closed form they represent.
    static DiscreteField annotated(GridRef grid, std::vector<double> values, AnalyticDescriptor d);
    static DiscreteField from_function(std::shared_ptr<const Grid1D> grid,
                                       const std::function<double(double)>& u);
    static DiscreteField from_function(std::shared_ptr<const Grid2D> grid,
                                       const std::function<double(double, double)>& u);

    const GridRef& grid() const noexcept { return grid_; }
    bool is_1d() const noexcept { return std::holds_alternative<std::shared_ptr<const Grid1D>>(grid_); }
    const Grid1D& grid1d() const;
    const Grid2D& grid2d() const;
    std::shared_ptr<const Grid1D> grid1d_ptr() const;
    std::shared_ptr<const Grid2D> grid2d_ptr() const;

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    const std::optional<AnalyticDescriptor>& analytic() const noexcept { return analytic_; }
    const RadialProfile* radial_profile() const noexcept;

    /// Same grid, new values; the analytic descriptor is dropped.
    DiscreteField with_values(std::vector<double> values) const;

    bool shares_grid(const DiscreteField& other) const noexcept;

private:
    GridRef grid_;
    std::vector<double> values_;
    std::optional<AnalyticDescriptor> analytic_;
};

/// Nodewise gradient (1D: y component is 0). 2nd-order central interior,
/// 2nd-order one-sided at the boundary.
std::vector<Vec2> gradient(const DiscreteField& field);

/// Nodewise Hessian; 1D fills xx only. Mixed partials by differencing the
/// x-derivative in y.
std::vector<Sym2> hessian(const DiscreteField& field);

/// Nodewise first/second derivative of arbitrary values on a 1D grid.
std::vector<double> derivative_1d(const Grid1D& grid, std::span<const double> values);
std::vector<double> second_derivative_1d(const Grid1D& grid, std::span<const double> values);
std::vector<Vec2> gradient_2d(const Grid2D& grid, std::span<const double> values);

/// Measure-weighted trapezoid quadrature.
double integrate(const DiscreteField& field);
double integrate(std::span<const double> values, const GridRef& grid);
double integrate(std::span<const double> values, const Grid1D& grid);
double integrate(std::span<const double> values, const Grid2D& grid);

/// Piecewise-constant gradients on energy cells: 1D cells, or two triangles
/// per 2D rectangle (lower-left then upper-right), with their measures.
struct CellGradients {
    std::vector<Vec2> grad;
    std::vector<double> measure;
};

CellGradients cell_gradients(const DiscreteField& field);

/// (∫ |∇u|^p dv)^{1/p} over the energy cells.
double wp_seminorm(const DiscreteField& field, double p);
/// ‖f1 − f2‖_{L^p} + ‖∇(f1 − f2)‖_{L^p}.
double wp_distance(const DiscreteField& f1, const DiscreteField& f2, double p);

}  // namespace plap
