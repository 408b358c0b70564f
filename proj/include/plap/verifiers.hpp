#pragma once

#include "plap/capacity.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plap {

enum class KappaVariant { Combined, Refined, Weak };

const char* to_string(KappaVariant v) noexcept;
double kappa(double p, int m, KappaVariant variant);

/// One checked quantity over the included nodes or samples. For single
/// inequalities min = max = mean is the left side and threshold the right.
struct VerifierReport {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::size_t included = 0;
    std::size_t excluded = 0;
    std::vector<double> values;   // NaN at excluded nodes
};

/// Node selection shared by the pointwise checks.
struct CheckOptions {
    std::size_t collar = 2;      // nodes dropped next to the grid boundary
    double theta = -1.0;         // |∇u| ≤ θ excluded; < 0 means 1e-8·max|∇u|
    std::vector<char> mask;      // optional: only nodes with mask[i] set
    double tol = 1e-3;
};

/// |∇du|² / |∇|du||² by finite differences. 1D fields are radial on the
/// grid's model manifold. Ratio is +∞ where both sides vanish.
VerifierReport kato_ratio(const DiscreteField& u, double p, const CheckOptions& opt = {});

/// |f²Δu + (p−2)/2·⟨∇f², ∇u⟩| at each node, f = |∇u|. pass: max ≤ opt.tol.
VerifierReport strong_form_residual(const DiscreteField& u, double p, const CheckOptions& opt = {});

/// |½𝓛_ε(f_ε²) − RHS| with the divergence taken over staggered fluxes.
/// pass: max ≤ opt.tol.
VerifierReport bochner_residual(const DiscreteField& u, double p, double eps, const CheckOptions& opt = {});

/// Termwise 𝓛_{s,ε} identity from closed-form radial derivatives, scaled by
/// |LHS| + Σ|terms| per node. Needs a radial profile on a manifold grid.
VerifierReport bochner_s_residual(const DiscreteField& u, double p, double s, double eps,
                                  const CheckOptions& opt = {});

/// ‖ψ∇w‖_p ≤ p‖w∇ψ‖_p. Raises invalid-input when w is not positive on the
/// support of ψ or fails the weak p-subharmonic test against ψ^p.
VerifierReport caccioppoli_check(const DiscreteField& w, const DiscreteField& psi, double p, double tol = 1e-12);

struct WeightedCaccioppoliInput {
    double p = 2.0;
    double eps = 0.0;
    double kappa = 0.0;
    double tau = 0.0;
    double eps1 = 0.5;
    double eps2 = 0.5;
    double R = 1.0;
    double center = 0.0;
};

/// C∫_{B(R)} ρ|∇u|^p ≤ 100·B/R² ∫_{B(2R)∖B(R)} (|∇u|²+ε)^{p/2} with
/// B = (1+|p−2|)²/ε₁ + 4(1/ε₂−1)(p−1+κ−ε₁)/p², C = 4(1−ε₂)(p−1+κ−ε₁)/p² − τ.
/// Raises constants-infeasible when C ≤ 0.
VerifierReport weighted_caccioppoli_check(const ModelManifold& M, const DiscreteField& u,
                                          const WeightedCaccioppoliInput& in);

struct GapConstants {
    double B = 0.0;
    double C = 0.0;
};
GapConstants weighted_caccioppoli_constants(const WeightedCaccioppoliInput& in);

struct MonotonicityGap {
    double lhs = 0.0;
    double psi = 0.0;
    double ratio = 0.0;   // NaN when X = Y
};

MonotonicityGap monotonicity_gap(std::span<const double> X, std::span<const double> Y, double p);

struct MonotonicitySuite {
    double p = 2.0;
    std::size_t samples = 0;
    std::size_t negative_lhs = 0;
    std::size_t zero_lhs_distinct = 0;
    double C_emp = 0.0;
    std::size_t fresh_violations = 0;
    double fresh_min_ratio = 0.0;
    bool pass = false;
};

/// Seeded pairs (isotropic, near-collinear, near-equal; |X|, |Y| ≤ 10). The
/// empirical constant comes from one sample and is re-checked at half
/// strength on a fresh one.
MonotonicitySuite monotonicity_suite(double p, std::size_t samples, std::uint64_t seed, std::size_t dim = 3);

struct RegularizationGap {
    double lhs = 0.0;
    double a = 1.0;
    double delta = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// (|X|²+ε)^{p/2} − (|Y|²+ε)^{p/2} ≤ a(|X|^p − |Y|^p) + δ for |X| ≥ |Y|.
RegularizationGap regularization_gap(std::span<const double> X, std::span<const double> Y, double eps, double p,
                                     double delta1);

struct RegularizationSuite {
    double p_lo = 1.0;
    double p_hi = 2.0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double min_margin = 0.0;   // min of (rhs − lhs)/(|rhs| + |lhs|)
    bool pass = false;
};

/// Seeded tuples with p in (p_lo, p_hi].
RegularizationSuite regularization_suite(double p_lo, double p_hi, std::size_t samples, std::uint64_t seed);

/// ∫ρΨ² ≤ ∫|∇Ψ|² per test function; values are the ratios.
VerifierReport weighted_poincare_check(const ModelManifold& M, const std::vector<DiscreteField>& family,
                                       double tol = 1e-12);

/// Least-squares slope of log(err) against log(h).
double observed_order(std::span<const double> h, std::span<const double> err);

struct GalleryItem {
    GalleryItem(std::string id_, std::string description_, DiscreteField field_, double p_, int m_)
        : id(std::move(id_)), description(std::move(description_)), field(std::move(field_)), p(p_), m(m_) {}

    std::string id;
    std::string description;
    DiscreteField field;
    double p = 2.0;
    int m = 2;
    CheckOptions checks;
    std::optional<double> expected_kato;       // exact ratio
    std::optional<double> q;                   // q-energy exponent with a known value
    std::optional<double> expected_q_energy;
    bool p_harmonic = true;
};

/// (a) log r, m-harmonic: radial on [1, 2] in dimension m.
GalleryItem gallery_log(int m, std::size_t nodes = 2049);
/// (a) log|x| on a planar n×n grid over [−2, 2]², checked on 1 ≤ |x| ≤ 2.
GalleryItem gallery_log_planar(std::size_t n = 512);
/// (b) r^{(p−m)/(p−1)} on [1, 2], p ≠ m.
GalleryItem gallery_power(double p, int m, std::size_t nodes = 2049);
/// (c) constants and linears on the unit square.
GalleryItem gallery_constant(double c = 0.7, std::size_t n = 33);
GalleryItem gallery_linear(double a = 1.0, double b = 2.0, std::size_t n = 33);
/// (d) u = ∫_{−∞}^t A^{−1/2} with A = (1+t²)², p = 3, on a sinh grid to ±1e6.
GalleryItem gallery_arctan(std::size_t nodes = 4001);

/// Default gallery: (a) m = 2 planar and radial m = 3, (b) p = 3, m = 4,
/// (c), (d).
std::vector<GalleryItem> example_gallery();

}  // namespace plap
