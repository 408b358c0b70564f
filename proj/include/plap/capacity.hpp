#pragma once

#include "plap/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace plap {

/// Node sets where u is held at inner_value (Ω) and outer_value (D).
struct Condenser {
    std::vector<char> inner;
    std::vector<char> outer;
    double inner_value = 1.0;
    double outer_value = 0.0;

    /// 1D: Ω = first node, D = last node.
    static Condenser interval(const Grid1D& grid, double inner_value = 1.0, double outer_value = 0.0);
    /// 2D: Ω = {r ≤ r_in}, D = {r ≥ r_out} ∪ rectangle edges, r from (cx, cy).
    static Condenser annulus(const Grid2D& grid, double r_in, double r_out, double cx = 0.0, double cy = 0.0);

    BoundaryCondition boundary() const;
};

enum class CapacityMethod { Analytic, Numeric };

struct CapacityResult {
    double value = 0.0;
    double p = 2.0;
    CapacityMethod method = CapacityMethod::Analytic;
    std::optional<DiscreteField> extremal;
};

CapacityResult capacity_analytic(const ModelManifold& M, double p, double a, double b);

/// E_p of the final ε-continuation iterate of the condenser problem.
CapacityResult capacity_numeric(const GridRef& grid, double p, const Condenser& condenser,
                                const SolveConfig& cfg = {});

struct MonotonicityReport {
    std::vector<double> outer_b;
    std::vector<double> cap_vs_outer;   // should be non-increasing
    std::vector<double> inner_a;
    std::vector<double> cap_vs_inner;   // should be non-decreasing
    double limit = 0.0;                 // Cap(a, ∞) (0 for parabolic ends)
    bool outer_monotone = false;
    bool inner_monotone = false;
    bool repeatable = false;
    bool exhaustion = false;            // |Cap(a, b_k) − limit| decreasing toward 0
    bool pass() const noexcept { return outer_monotone && inner_monotone && repeatable && exhaustion; }
};

/// Cap(a, b) over increasing outer radii and over inner radii moving toward
/// outer_b.front().
MonotonicityReport capacity_monotonicity_suite(const ModelManifold& M, double p, double a,
                                               std::span<const double> outer_b,
                                               std::span<const double> inner_a);

struct SweepResult {
    std::vector<double> R;
    std::vector<DiscreteField> barriers;   // u_i = 1 at R0, 0 at R_i
    std::vector<double> phi;               // Φ(R_i) = ∫_{R0}^{R_i} A^{−1/(p−1)}
    std::vector<double> deviation;         // sup over [R0, R0+1] of 1 − u_i
    TailVerdict tail = TailVerdict::Diverges;
    double phi_limit = kInf;               // extrapolated Φ(∞)
    double limit_energy = 0.0;             // Φ(∞)^{1−p}
    double limit_at_far_end = 0.0;         // w(R_max) for the limit barrier
    EndType diagnosis = EndType::Parabolic;
    EndType integral_test = EndType::Parabolic;
};

/// Barrier exhaustion of the end in the given direction. For the minus end,
/// R0 and R_list are distances along s = −t. Raises internal-inconsistency
/// when the diagnosis disagrees with classify_end.
SweepResult end_barrier_sweep(const ModelManifold& M, double p, double R0, std::span<const double> R_list,
                              EndDirection direction = EndDirection::Plus, std::size_t nodes = 513);

/// Barrier limit w = 1 − Φ(t)/Φ(∞) on [R0, T], for hyperbolic plus ends.
DiscreteField barrier_limit(const ModelManifold& M, double p, std::shared_ptr<const Grid1D> grid);

struct BoundRow {
    double R = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct TailProfile {
    std::vector<BoundRow> rows;
    double C3 = 0.0;
    double slope = 0.0;          // least-squares d log(tail)/dR
    double slope_bound = 0.0;    // −λ^{1/p}/(p+1)
    bool tails_nonincreasing = false;
    bool pass = false;
};

/// tail(R) = ∫_{t ≥ R} |∇w|^p dv over the grid of w, against
/// C₃ R^p exp(−λ^{1/p}(R−1)/(p+1)) with C₃ fitted at the smallest R.
TailProfile tail_energy_profile(const ModelManifold& M, double p, const DiscreteField& w,
                                std::span<const double> R_values, double lambda_p);

struct VolumeReport {
    std::vector<BoundRow> rows;
    double C = 0.0;
    EndType end = EndType::Hyperbolic;
    bool pass = false;
};

/// Hyperbolic ends: shell V(R+1) − V(R) ≥ C R^{−p(p−1)} exp((p−1)λ^{1/p}(R−1)/(p+1)).
/// Parabolic ends with λ > 0: tail volume ≤ C R^p exp(−λ^{1/p}(R−1)/(p+1)).
VolumeReport volume_growth_check(const ModelManifold& M, double p, double lambda_p,
                                 std::span<const double> R_values);

/// λ_p ≥ (2√λ₂/p)^p, for p ≥ 2.
double p_poincare_bound(double lambda2, double p);

}  // namespace plap
