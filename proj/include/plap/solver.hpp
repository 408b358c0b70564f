#pragma once

#include "plap/energy.hpp"
#include "plap/error.hpp"

#include <optional>
#include <vector>

namespace plap {

struct SolveConfig {
    std::vector<double> eps_schedule = default_schedule();
    double residual_tol = 1e-10;
    int max_newton_iters = 50;
    double backtrack = 0.5;
    double armijo = 1e-4;
    double eps_floor = 1e-14;
    // inner CG (2D only), relative to the Newton right-hand side
    double cg_rel_tol = 1e-12;
    int cg_max_iters = 20000;

    /// ε_k = ε₀·2^{−k}, k = 0..steps−1.
    static std::vector<double> default_schedule(double eps0 = 1.0, int steps = 20);
    void validate() const;
};

/// Dirichlet data: nodes with fixed[i] set keep values[i].
struct BoundaryCondition {
    std::vector<char> fixed;
    std::vector<double> values;

    /// 1D: both endpoints.
    static BoundaryCondition endpoints(const Grid1D& grid, double left, double right);
    /// 2D: the rectangle edges, values from g(x, y).
    static BoundaryCondition rectangle(const Grid2D& grid, const std::function<double(double, double)>& g);
    /// Grid boundary nodes of an existing field, with its values.
    static BoundaryCondition from_field(const DiscreteField& u);

    std::size_t size() const noexcept { return fixed.size(); }
    double min_value() const;
    double max_value() const;
};

struct NewtonTrace {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> energy_history;
};

struct SandwichReport {
    double E_p_ref = 0.0;       // E_p(u)
    double E_p_eps = 0.0;       // E_p(u_ε)
    double E_peps_eps = 0.0;    // E_{p,ε}(u_ε)
    double E_peps_ref = 0.0;    // E_{p,ε}(u)
    bool first = false;
    bool second = false;
    bool third = false;
    bool ok() const noexcept { return first && second && third; }
};

struct EpsStep {
    double eps = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double energy_eps = 0.0;   // E_{p,ε}(u_ε)
    double energy_p = 0.0;     // E_p(u_ε)
    double dist_to_prev = 0.0;
    double dist_to_final = 0.0;
    std::optional<double> dist_to_reference;
    std::optional<SandwichReport> sandwich;
    std::vector<double> energy_history;
};

struct SolveReport {
    double p = 2.0;
    std::vector<EpsStep> steps;
    bool max_principle_ok = true;
    /// Distances to the final (or reference) iterate non-increasing up to 10%.
    bool distances_monotone = true;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, DiscreteField best, NewtonTrace trace)
        : Error(ErrorKind::NonConvergence, what), best_(std::move(best)), trace_(std::move(trace)) {}

    const DiscreteField& best() const noexcept { return best_; }
    const NewtonTrace& trace() const noexcept { return trace_; }

private:
    DiscreteField best_;
    NewtonTrace trace_;
};

/// Damped Newton on E_{p,ε} with the boundary values held fixed. The start
/// defaults to the harmonic extension of the boundary data.
std::pair<DiscreteField, NewtonTrace> newton_minimize(const EnergySpec& spec, const GridRef& grid,
                                                      const BoundaryCondition& bc, const SolveConfig& cfg,
                                                      const DiscreteField* start = nullptr);

/// Minimizer of E_{p,ε} for the given data. Starts from the harmonic extension
/// and passes through the schedule entries larger than ε before the final solve.
std::pair<DiscreteField, SolveReport> solve_dirichlet(const EnergySpec& spec, const GridRef& grid,
                                                      const BoundaryCondition& bc,
                                                      const SolveConfig& cfg = {});

/// Harmonic (p = 2) extension of the boundary data.
DiscreteField harmonic_extension(const GridRef& grid, const BoundaryCondition& bc, const SolveConfig& cfg = {});

/// Runs the ε schedule with warm starts. When a reference field is given the
/// report carries distances and the sandwich chain against it.
std::pair<std::vector<DiscreteField>, SolveReport> epsilon_continuation(
    double p, const GridRef& grid, const BoundaryCondition& bc, const SolveConfig& cfg = {},
    const DiscreteField* reference = nullptr);

/// E_p(u) ≤ E_p(u_ε) ≤ E_{p,ε}(u_ε) ≤ E_{p,ε}(u), each within 1e−8·(1+scale).
SandwichReport sandwich_check(double p, double eps, const DiscreteField& u, const DiscreteField& u_eps);

/// u = offset + c·Φ(t) with Φ' = A^{−1/(p−1)}; phi evaluates Φ pointwise.
RadialProfile radial_profile(const ModelManifold& M, double p, double offset, double c,
                             std::function<double(double)> phi);

/// u_a + (u_b − u_a)·Φ(t)/Φ(b), Φ(t) = ∫_a^t A^{−1/(p−1)}; grid must span [a, b].
DiscreteField radial_p_harmonic(const ModelManifold& M, double p, std::shared_ptr<const Grid1D> grid,
                                double u_a, double u_b);
DiscreteField radial_p_harmonic(const ModelManifold& M, double p, double a, double b, double u_a,
                                double u_b, std::size_t nodes = 1025);

struct Barrier {
    DiscreteField h;
    double phi_inf = 0.0;
    double sup = 0.0;
    double inf = 0.0;
    double energy_analytic = 0.0;  // Φ(∞)^{1−p}
    double energy_numeric = 0.0;   // E_p of h on the grid
    bool strictly_between = false;
};

/// h = Φ(t)/Φ(+∞) with Φ(t) = ∫_{−∞}^t A^{−1/(p−1)}, sampled on grid.
Barrier two_end_barrier(const ModelManifold& M, double p, std::shared_ptr<const Grid1D> grid);

}  // namespace plap
