#pragma once

#include "plap/grid.hpp"

#include <array>
#include <functional>
#include <vector>

namespace plap {

/// (p, ε) pair of the regularized energy ∫ (|∇u|² + ε)^{p/2} dv.
struct EnergySpec {
    double p = 2.0;
    double eps = 0.0;

    void validate() const;
};

/// One energy cell: gradient = Σ_k dgrad[k]·u[node[k]] on a cell of the given
/// measure. 1D cells use two nodes, 2D triangles three.
struct CellStencil {
    std::array<std::size_t, 3> node{};
    std::array<Vec2, 3> dgrad{};
    int count = 0;
    double measure = 0.0;

    Vec2 grad(std::span<const double> u) const noexcept {
        Vec2 g{0.0, 0.0};
        for (int k = 0; k < count; ++k) {
            g[0] += dgrad[k][0] * u[node[k]];
            g[1] += dgrad[k][1] * u[node[k]];
        }
        return g;
    }
};

/// Visits cells in a fixed order (the reduction order of every sum below).
void for_each_cell(const GridRef& grid, const std::function<void(const CellStencil&)>& fn);

double energy(const EnergySpec& spec, const DiscreteField& u);
double q_energy(const DiscreteField& u, double q);

/// ∂E_{p,ε}/∂u_i at every node, boundary nodes included.
std::vector<double> energy_gradient(const EnergySpec& spec, const DiscreteField& u);

/// Size of the rounding error in energy_gradient at u: machine epsilon times
/// the largest sum of absolute per-cell contributions at a node.
double gradient_roundoff_scale(const EnergySpec& spec, const DiscreteField& u);

/// energy_gradient with grid-boundary entries zeroed. This is p times the
/// weak form ∫ f_ε^{p−2}⟨∇u, ∇φ_i⟩ for the hat function φ_i.
std::vector<double> weak_residual(const EnergySpec& spec, const DiscreteField& u);

/// Hessian of E_{p,ε} at u applied to ψ (all nodes). Positive semidefinite;
/// equals −p times the weak form of div(f_ε^{p−2} A_ε ∇ψ).
std::vector<double> linearized_action(const EnergySpec& spec, const DiscreteField& u,
                                      const DiscreteField& psi);
std::vector<double> linearized_action(const EnergySpec& spec, const DiscreteField& u,
                                      std::span<const double> psi);

/// Diagonal of the energy Hessian at u.
std::vector<double> hessian_diagonal(const EnergySpec& spec, const DiscreteField& u);

/// 1D only: tridiagonal energy Hessian (diag of size n, off of size n−1).
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
};
Tridiagonal hessian_tridiagonal(const EnergySpec& spec, const DiscreteField& u);

/// q-energy on a family of growing domains. converged is false when the
/// increments stop shrinking (e.g. logarithmic growth).
struct QEnergyGrowth {
    std::vector<double> extent;
    std::vector<double> value;
    bool converged = false;
};

QEnergyGrowth q_energy_growth(const std::function<DiscreteField(double)>& field_on,
                              std::span<const double> extents, double q);

}  // namespace plap
