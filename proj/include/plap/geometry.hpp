#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace plap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Declared asymptotic law of a tabulated warp beyond its last sample:
/// η ~ c·|t|^rate (Power) or η ~ c·exp(rate·|t|) (Exponential).
struct TailLaw {
    enum class Kind { Power, Exponential };
    Kind kind = Kind::Power;
    double rate = 0.0;
};

/// η(t) = (t² + σ²)^{α/2}; σ = 0 gives |t|^α.
struct PowerWarp {
    double alpha = 1.0;
    double sigma = 0.0;
};

/// η(t) = exp(β t).
struct ExponentialWarp {
    double beta = 1.0;
};

/// η(t) = cosh t.
struct CoshWarp {};

/// η(t) = (1 + t²)^{α/2}.
struct PolyEvenWarp {
    double alpha = 0.0;
};

/// Samples of η interpolated by a clamped cubic spline. A declared tail law
/// continues η past the corresponding end sample.
struct TabulatedWarp {
    std::vector<double> t;
    std::vector<double> eta;
    std::optional<TailLaw> lower_tail;
    std::optional<TailLaw> upper_tail;
};

class CubicSpline;

/// Value and first two derivatives of η, all divided by η so that
/// exponential warps stay finite far out on the line.
struct WarpRatios {
    double log_eta;
    double d1_over_eta;
    double d2_over_eta;
};

class WarpFunction {
public:
    using Kind = std::variant<PowerWarp, ExponentialWarp, CoshWarp, PolyEvenWarp, TabulatedWarp>;

    explicit WarpFunction(Kind kind);

    const Kind& kind() const noexcept { return kind_; }
    bool is_tabulated() const noexcept { return std::holds_alternative<TabulatedWarp>(kind_); }

    WarpRatios ratios(double t) const;
    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;

    /// Range of t on which the warp is defined (tabulated warps: sample range).
    double lower_limit() const noexcept;
    double upper_limit() const noexcept;

private:
    WarpRatios tail_ratios(const TailLaw& law, double t_end, double s, double dir) const;

    Kind kind_;
    std::shared_ptr<const CubicSpline> spline_;
};

struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double t) const noexcept { return t >= lo && t <= hi; }
    bool bounded_above() const noexcept { return hi < kInf; }
    bool bounded_below() const noexcept { return lo > -kInf; }
};

struct RadialEuclidean {
    int m = 3;
    Interval domain{0.0, kInf};
};

struct WarpedProduct {
    int m = 3;
    WarpFunction eta;
    double ricci_N_lower = 0.0;
    Interval domain;
};

/// Area of the unit (n)-sphere, 2π^{(n+1)/2} / Γ((n+1)/2).
double unit_sphere_area(int n);

/// Radial model geometry: Euclidean annuli/balls or warped products ℝ × N
/// with vol(N) = 1.
class ModelManifold {
public:
    using Variant = std::variant<RadialEuclidean, WarpedProduct>;

    static ModelManifold radial_euclidean(int m, double a = 0.0, double b = kInf);
    static ModelManifold warped_product(int m, WarpFunction eta, Interval domain = {},
                                        double ricci_N_lower = 0.0);

    const Variant& variant() const noexcept { return variant_; }
    bool is_warped() const noexcept { return std::holds_alternative<WarpedProduct>(variant_); }
    int dimension() const noexcept;
    const Interval& domain() const noexcept;
    double vol_N() const noexcept { return 1.0; }
    const WarpedProduct& warped() const;

    double area(double t) const;
    double log_area(double t) const;
    /// A'(t)/A(t).
    double area_log_derivative(double t) const;
    /// d/dt (A'/A).
    double area_log_derivative_d1(double t) const;
    /// η'/η: the Hessian of a radial u has the tangential eigenvalue (η'/η)·u'.
    double tangential_factor(double t) const;
    /// Ric(∂t, ∂t) = −(m−1) η''/η (zero for flat space).
    double radial_ricci(double t) const;

    void check_in_domain(double t) const;

private:
    explicit ModelManifold(Variant v) : variant_(std::move(v)) {}
    Variant variant_;
};

double area(const ModelManifold& M, double t);
double weight_rho(const ModelManifold& M, double t);
double radial_ricci_term(const ModelManifold& M, double t, double grad_sq);

struct AdmissibilityViolation {
    double t;
    double eta_d2;
    double log_condition;  // (m−2)(log η)'' + η^{−2} Ric_N
};

struct AdmissibilityReport {
    bool ok = true;
    std::vector<AdmissibilityViolation> violations;
};

AdmissibilityReport admissibility_check(const ModelManifold& M, std::span<const double> t_samples);

enum class EndDirection { Plus, Minus };
enum class EndType { Parabolic, Hyperbolic };

const char* to_string(EndType type) noexcept;

/// Hyperbolic iff ∫^{±∞} A^{−1/(p−1)} dt converges, decided from the
/// analytic tail of the warp.
EndType classify_end(const ModelManifold& M, double p, EndDirection direction);

enum class TailVerdict { Converges, Diverges };

/// Log-log slope test on an integrand g > 0 sampled at distances s1 < s2
/// along an end. Takes log g to avoid overflow.
TailVerdict numeric_tail_test(double log_g1, double log_g2, double s1, double s2);

double volume_between(const ModelManifold& M, double R1, double R2);

/// ∫_a^b A(t)^{−1/(p−1)} dt. Either bound may be infinite.
double inverse_area_integral(const ModelManifold& M, double p, double a, double b);

}  // namespace plap
