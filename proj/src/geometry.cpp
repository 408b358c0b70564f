#include "plap/geometry.hpp"

#include "plap/error.hpp"
#include "plap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace plap {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::UnsupportedVariant: return "unsupported variant";
        case ErrorKind::NeedsAsymptotics: return "needs asymptotics";
        case ErrorKind::Singularity: return "singularity";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::NoBarrier: return "no barrier";
        case ErrorKind::NoData: return "no data";
        case ErrorKind::ConstantsInfeasible: return "constants infeasible";
        case ErrorKind::InternalInconsistency: return "internal inconsistency";
    }
    return "error";
}

const char* to_string(EndType type) noexcept {
    return type == EndType::Parabolic ? "parabolic" : "hyperbolic";
}

// Clamped cubic spline; end slopes from 3-point one-sided differences.
class CubicSpline {
public:
    CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        auto one_sided = [](double x0, double x1, double x2, double y0, double y1, double y2) {
            // derivative at x0 of the quadratic through the three points
            const double h1 = x1 - x0;
            const double h2 = x2 - x0;
            return (y0 * (-(h1 + h2) / (h1 * h2)) + y1 * (h2 / (h1 * (h2 - h1))) -
                    y2 * (h1 / (h2 * (h2 - h1))));
        };
        const double s0 = one_sided(x_[0], x_[1], x_[2], y_[0], y_[1], y_[2]);
        const double sn = one_sided(x_[n - 1], x_[n - 2], x_[n - 3], y_[n - 1], y_[n - 2], y_[n - 3]);

        // Tridiagonal system for second derivatives m_i.
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        const double h0 = x_[1] - x_[0];
        b[0] = h0 / 3.0;
        c[0] = h0 / 6.0;
        d[0] = (y_[1] - y_[0]) / h0 - s0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            a[i] = hl / 6.0;
            b[i] = (hl + hr) / 3.0;
            c[i] = hr / 6.0;
            d[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
        }
        const double hn = x_[n - 1] - x_[n - 2];
        a[n - 1] = hn / 6.0;
        b[n - 1] = hn / 3.0;
        d[n - 1] = sn - (y_[n - 1] - y_[n - 2]) / hn;

        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m_.assign(n, 0.0);
        m_[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
    }

    // value, first and second derivative
    std::array<double, 3> eval(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        const double h = x_[i + 1] - x_[i];
        const double A = (x_[i + 1] - t) / h;
        const double B = (t - x_[i]) / h;
        const double v = A * y_[i] + B * y_[i + 1] +
                         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
        const double d1 = (y_[i + 1] - y_[i]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
                          (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
        const double d2 = A * m_[i] + B * m_[i + 1];
        return {v, d1, d2};
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;
};

namespace {

WarpRatios power_ratios(double alpha, double sigma, double t) {
    const double s2 = t * t + sigma * sigma;
    return {0.5 * alpha * std::log(s2), alpha * t / s2,
            alpha / s2 + alpha * (alpha - 2.0) * t * t / (s2 * s2)};
}

}  // namespace

// Declared tail beyond a tabulated end t_end, continuous in η:
// η_end·(1+s)^rate or η_end·e^{rate·s}, s = distance past the end, dir = ±1.
WarpRatios WarpFunction::tail_ratios(const TailLaw& law, double t_end, double s, double dir) const {
    const double log_end = std::log(spline_->eval(t_end)[0]);
    if (law.kind == TailLaw::Kind::Exponential)
        return {log_end + law.rate * s, dir * law.rate, law.rate * law.rate};
    const double r = law.rate;
    return {log_end + r * std::log1p(s), dir * r / (1.0 + s), r * (r - 1.0) / ((1.0 + s) * (1.0 + s))};
}

namespace {

double log_cosh(double t) {
    const double a = std::abs(t);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

WarpFunction::WarpFunction(Kind kind) : kind_(std::move(kind)) {
    if (auto* tab = std::get_if<TabulatedWarp>(&kind_)) {
        require(tab->t.size() == tab->eta.size(), ErrorKind::InvalidInput,
                "tabulated warp: t and eta sizes differ");
        require(tab->t.size() >= 4, ErrorKind::InvalidInput,
                "tabulated warp needs at least 4 samples");
        for (std::size_t i = 1; i < tab->t.size(); ++i)
            require(tab->t[i] > tab->t[i - 1], ErrorKind::InvalidInput,
                    "tabulated warp: t must be strictly increasing");
        for (double e : tab->eta)
            require(e > 0.0 && std::isfinite(e), ErrorKind::InvalidInput,
                    "tabulated warp: eta must be positive");
        spline_ = std::make_shared<CubicSpline>(tab->t, tab->eta);
    } else if (auto* pw = std::get_if<PowerWarp>(&kind_)) {
        require(pw->sigma >= 0.0, ErrorKind::InvalidInput, "power warp: sigma must be >= 0");
    }
}

WarpRatios WarpFunction::ratios(double t) const {
    return std::visit(
        [&](const auto& w) -> WarpRatios {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, PowerWarp>) {
                if (w.sigma == 0.0 && t == 0.0)
                    fail(ErrorKind::Domain, "power warp with sigma = 0 is singular at t = 0");
                return power_ratios(w.alpha, w.sigma, t);
            } else if constexpr (std::is_same_v<W, ExponentialWarp>) {
                return {w.beta * t, w.beta, w.beta * w.beta};
            } else if constexpr (std::is_same_v<W, CoshWarp>) {
                return {log_cosh(t), std::tanh(t), 1.0};
            } else if constexpr (std::is_same_v<W, PolyEvenWarp>) {
                return power_ratios(w.alpha, 1.0, t);
            } else {
                if (t > spline_->back() && w.upper_tail)
                    return tail_ratios(*w.upper_tail, spline_->back(), t - spline_->back(), 1.0);
                if (t < spline_->front() && w.lower_tail)
                    return tail_ratios(*w.lower_tail, spline_->front(), spline_->front() - t, -1.0);
                if (t < spline_->front() || t > spline_->back())
                    fail(ErrorKind::Domain, "t outside tabulated warp range");
                const auto [v, d1, d2] = spline_->eval(t);
                if (!(v > 0.0)) fail(ErrorKind::Domain, "tabulated warp interpolant is not positive");
                return {std::log(v), d1 / v, d2 / v};
            }
        },
        kind_);
}

double WarpFunction::value(double t) const { return std::exp(ratios(t).log_eta); }
double WarpFunction::d1(double t) const {
    const auto r = ratios(t);
    return r.d1_over_eta * std::exp(r.log_eta);
}
double WarpFunction::d2(double t) const {
    const auto r = ratios(t);
    return r.d2_over_eta * std::exp(r.log_eta);
}

double WarpFunction::lower_limit() const noexcept {
    if (!spline_) return -kInf;
    return std::get<TabulatedWarp>(kind_).lower_tail ? -kInf : spline_->front();
}
double WarpFunction::upper_limit() const noexcept {
    if (!spline_) return kInf;
    return std::get<TabulatedWarp>(kind_).upper_tail ? kInf : spline_->back();
}

double unit_sphere_area(int n) {
    const double k = 0.5 * (n + 1);
    return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

ModelManifold ModelManifold::radial_euclidean(int m, double a, double b) {
    require(m >= 2, ErrorKind::InvalidInput, "radial Euclidean manifold needs m >= 2");
    require(a >= 0.0 && a < b, ErrorKind::InvalidInput, "radial interval must satisfy 0 <= a < b");
    return ModelManifold(RadialEuclidean{m, Interval{a, b}});
}

ModelManifold ModelManifold::warped_product(int m, WarpFunction eta, Interval domain,
                                            double ricci_N_lower) {
    // m = 2 is accepted for surfaces of revolution; rho then vanishes
    require(m >= 2, ErrorKind::InvalidInput, "warped product needs m >= 2");
    require(domain.lo < domain.hi, ErrorKind::InvalidInput, "empty warped-product domain");
    require(domain.lo >= eta.lower_limit() && domain.hi <= eta.upper_limit(),
            ErrorKind::InvalidInput, "domain exceeds the range of the tabulated warp");
    if (const auto* pw = std::get_if<PowerWarp>(&eta.kind()); pw && pw->sigma == 0.0)
        require(domain.lo > 0.0 || domain.hi < 0.0, ErrorKind::InvalidInput,
                "power warp with sigma = 0 requires a domain excluding t = 0");
    return ModelManifold(WarpedProduct{m, std::move(eta), ricci_N_lower, domain});
}

int ModelManifold::dimension() const noexcept {
    return std::visit([](const auto& v) { return v.m; }, variant_);
}

const Interval& ModelManifold::domain() const noexcept {
    return std::visit([](const auto& v) -> const Interval& { return v.domain; }, variant_);
}

const WarpedProduct& ModelManifold::warped() const {
    const auto* w = std::get_if<WarpedProduct>(&variant_);
    if (!w) fail(ErrorKind::UnsupportedVariant, "operation requires a warped product");
    return *w;
}

void ModelManifold::check_in_domain(double t) const {
    const auto& d = domain();
    if (!(t >= d.lo && t <= d.hi))
        fail(ErrorKind::Domain, "t = " + std::to_string(t) + " outside manifold domain");
}

double ModelManifold::log_area(double t) const {
    check_in_domain(t);
    if (const auto* e = std::get_if<RadialEuclidean>(&variant_))
        return std::log(unit_sphere_area(e->m - 1)) + (e->m - 1) * std::log(t);
    const auto& w = std::get<WarpedProduct>(variant_);
    return (w.m - 1) * w.eta.ratios(t).log_eta;
}

double ModelManifold::area(double t) const {
    check_in_domain(t);
    if (const auto* e = std::get_if<RadialEuclidean>(&variant_))
        return unit_sphere_area(e->m - 1) * std::pow(t, e->m - 1);
    return std::exp(log_area(t));
}

double ModelManifold::tangential_factor(double t) const {
    check_in_domain(t);
    if (std::holds_alternative<RadialEuclidean>(variant_)) return 1.0 / t;
    return std::get<WarpedProduct>(variant_).eta.ratios(t).d1_over_eta;
}

double ModelManifold::area_log_derivative(double t) const {
    return (dimension() - 1) * tangential_factor(t);
}

double ModelManifold::area_log_derivative_d1(double t) const {
    check_in_domain(t);
    const int m = dimension();
    if (std::holds_alternative<RadialEuclidean>(variant_)) return -(m - 1) / (t * t);
    const auto r = std::get<WarpedProduct>(variant_).eta.ratios(t);
    return (m - 1) * (r.d2_over_eta - r.d1_over_eta * r.d1_over_eta);
}

double ModelManifold::radial_ricci(double t) const {
    check_in_domain(t);
    if (std::holds_alternative<RadialEuclidean>(variant_)) return 0.0;
    const auto& w = std::get<WarpedProduct>(variant_);
    return -(w.m - 1) * w.eta.ratios(t).d2_over_eta;
}

double area(const ModelManifold& M, double t) { return M.area(t); }

double weight_rho(const ModelManifold& M, double t) {
    const auto& w = M.warped();
    M.check_in_domain(t);
    return (w.m - 2) * w.eta.ratios(t).d2_over_eta;
}

double radial_ricci_term(const ModelManifold& M, double t, double grad_sq) {
    require(grad_sq >= 0.0, ErrorKind::InvalidInput, "grad_sq must be non-negative");
    if (!M.is_warped()) {
        M.check_in_domain(t);
        return 0.0;
    }
    M.check_in_domain(t);
    return M.radial_ricci(t) * grad_sq;
}

AdmissibilityReport admissibility_check(const ModelManifold& M, std::span<const double> t_samples) {
    const auto& w = M.warped();
    require(!t_samples.empty(), ErrorKind::InvalidInput, "empty sample list");
    AdmissibilityReport report;
    for (double t : t_samples) {
        M.check_in_domain(t);
        const auto r = w.eta.ratios(t);
        const double eta = std::exp(r.log_eta);
        const double eta_d2 = r.d2_over_eta * eta;
        const double log_dd = r.d2_over_eta - r.d1_over_eta * r.d1_over_eta;
        const double cond = (w.m - 2) * log_dd + w.ricci_N_lower / (eta * eta);
        const double tol = 1e-12 * (1.0 + std::abs(r.d2_over_eta));
        if (!(eta_d2 > 0.0) || cond < -tol) {
            report.ok = false;
            report.violations.push_back({t, eta_d2, cond});
        }
    }
    return report;
}

namespace {

// Tail exponent of A^{-1/(p-1)} for a power law A ~ |t|^k.
EndType power_tail(double area_exponent, double p) {
    const double s = -area_exponent / (p - 1.0);
    return s < -1.0 ? EndType::Hyperbolic : EndType::Parabolic;
}

EndType tail_from_law(const TailLaw& law, int m, double p) {
    if (law.kind == TailLaw::Kind::Power) return power_tail(law.rate * (m - 1), p);
    return law.rate > 0.0 ? EndType::Hyperbolic : power_tail(0.0, p);
}

}  // namespace

EndType classify_end(const ModelManifold& M, double p, EndDirection direction) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    const auto& dom = M.domain();
    const bool plus = direction == EndDirection::Plus;
    require(plus ? !dom.bounded_above() : !dom.bounded_below(), ErrorKind::InvalidInput,
            "manifold domain is bounded in the requested direction");
    const int m = M.dimension();

    if (std::holds_alternative<RadialEuclidean>(M.variant())) return power_tail(m - 1, p);

    const auto& w = M.warped();
    return std::visit(
        [&](const auto& k) -> EndType {
            using W = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<W, PowerWarp>) {
                return power_tail(k.alpha * (m - 1), p);
            } else if constexpr (std::is_same_v<W, PolyEvenWarp>) {
                return power_tail(k.alpha * (m - 1), p);
            } else if constexpr (std::is_same_v<W, ExponentialWarp>) {
                const double rate = plus ? k.beta : -k.beta;
                return rate > 0.0 ? EndType::Hyperbolic : power_tail(0.0, p);
            } else if constexpr (std::is_same_v<W, CoshWarp>) {
                return EndType::Hyperbolic;
            } else {
                const auto& law = plus ? k.upper_tail : k.lower_tail;
                if (!law)
                    fail(ErrorKind::NeedsAsymptotics,
                         "tabulated warp has no declared tail law in this direction");
                return tail_from_law(*law, m, p);
            }
        },
        w.eta.kind());
}

TailVerdict numeric_tail_test(double log_g1, double log_g2, double s1, double s2) {
    require(s1 > 0.0 && s2 > s1, ErrorKind::InvalidInput, "tail test needs 0 < s1 < s2");
    constexpr double band = 1e-3;
    const double dlog_s = std::log(s2) - std::log(s1);
    if (log_g2 == -kInf) return TailVerdict::Converges;
    const double slope = (log_g2 - log_g1) / dlog_s;
    if (slope < -1.0 - band) return TailVerdict::Converges;
    if (slope > -1.0 + band) return TailVerdict::Diverges;
    // Borderline: a pure 1/s law keeps s·g(s) flat, and its integral diverges.
    const double flat = (log_g2 + std::log(s2)) - (log_g1 + std::log(s1));
    if (std::abs(flat) < band) return TailVerdict::Diverges;
    fail(ErrorKind::NeedsAsymptotics, "log-log slope of the tail integrand is too close to -1");
}

double volume_between(const ModelManifold& M, double R1, double R2) {
    require(R1 <= R2, ErrorKind::InvalidInput, "volume_between needs R1 <= R2");
    M.check_in_domain(R1);
    M.check_in_domain(R2);
    if (R1 == R2) return 0.0;
    if (const auto* e = std::get_if<RadialEuclidean>(&M.variant())) {
        const double w = unit_sphere_area(e->m - 1);
        return w * (std::pow(R2, e->m) - std::pow(R1, e->m)) / e->m;
    }
    return integrate_adaptive([&](double t) { return M.area(t); }, R1, R2);
}

double inverse_area_integral(const ModelManifold& M, double p, double a, double b) {
    require(p > 1.0, ErrorKind::InvalidInput, "p must exceed 1");
    require(a <= b, ErrorKind::InvalidInput, "integration bounds reversed");
    if (a == b) return 0.0;
    const double expo = -1.0 / (p - 1.0);
    if (const auto* e = std::get_if<RadialEuclidean>(&M.variant())) {
        require(a >= e->domain.lo && b <= e->domain.hi, ErrorKind::Domain,
                "interval outside manifold domain");
        const double c = std::pow(unit_sphere_area(e->m - 1), expo);
        const double s = (e->m - 1) * expo;
        if (a == 0.0 && s <= -1.0) return kInf;
        if (std::abs(s + 1.0) < 1e-14) return c * (std::log(b) - std::log(a));
        if (b == kInf) return s < -1.0 ? c * (-std::pow(a, s + 1.0) / (s + 1.0)) : kInf;
        return c * (std::pow(b, s + 1.0) - std::pow(a, s + 1.0)) / (s + 1.0);
    }
    const auto& dom = M.domain();
    require(a >= dom.lo && b <= dom.hi, ErrorKind::Domain, "interval outside manifold domain");
    const auto g = [&](double t) { return std::exp(expo * M.log_area(t)); };
    if (std::isinf(a) && classify_end(M, p, EndDirection::Minus) == EndType::Parabolic) return kInf;
    if (std::isinf(b) && classify_end(M, p, EndDirection::Plus) == EndType::Parabolic) return kInf;
    return integrate_adaptive(g, a, b);
}

}  // namespace plap
