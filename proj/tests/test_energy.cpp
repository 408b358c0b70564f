#include "doctest.h"

#include "plap/energy.hpp"
#include "plap/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace plap;
using std::numbers::pi;

namespace {

std::shared_ptr<const Grid1D> euclid(int m, double a, double b, std::size_t n) {
    return std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(m), a, b, n));
}

std::shared_ptr<const Grid1D> gallery_d_grid(double L, std::size_t n) {
    const auto M = ModelManifold::warped_product(3, WarpFunction(PolyEvenWarp{2.0}));
    return std::make_shared<const Grid1D>(Grid1D::on_manifold(M, sinh_nodes(-L, L, n)));
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InternalInconsistency;
}

}  // namespace

TEST_CASE("energy examples") {
    const auto g = euclid(3, 0.0, 1.0, 1025);
    const auto c = DiscreteField::from_function(g, [](double) { return 2.0; });
    CHECK(energy({3.0, 0.0}, c) == 0.0);
    CHECK(energy({2.0, 0.25}, c) == doctest::Approx(0.25 * 4 * pi / 3).epsilon(1e-5));

    const auto g12 = euclid(3, 1.0, 2.0, 1025);
    const auto u = DiscreteField::from_function(g12, [](double t) { return 2.0 / t - 1.0; });
    CHECK(energy({2.0, 0.0}, u) == doctest::Approx(8 * pi).epsilon(1e-5));
}

TEST_CASE("q-energy of the arctan field") {
    const auto g = gallery_d_grid(50.0, 4001);
    const auto u = DiscreteField::from_function(g, [](double t) { return std::atan(t); });
    CHECK(q_energy(u, 3.0) == doctest::Approx(2 * std::atan(50.0)).epsilon(1e-4));
    CHECK(q_energy(DiscreteField::from_function(g, [](double) { return 1.0; }), 3.0) == 0.0);

    const std::vector<double> L{100.0, 200.0, 400.0, 800.0};
    auto field_on = [](double ext) {
        return DiscreteField::from_function(gallery_d_grid(ext, 4001), [](double t) { return std::atan(t); });
    };
    CHECK_FALSE(q_energy_growth(field_on, L, 2.0).converged);
    CHECK(q_energy_growth(field_on, L, 3.0).converged);
}

TEST_CASE("weak residual") {
    auto res_scaled = [](std::size_t n) {
        const auto M = ModelManifold::radial_euclidean(3);
        const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, 1.0, 2.0, n));
        // ∫ A^{-1/2} for p = 3: (4π)^{-1/2} ln t
        const auto u = DiscreteField::from_function(g, [](double t) { return std::log(t); });
        return max_abs(weak_residual({3.0, 0.0}, u)) / g->spacing(0);
    };
    const double r1 = res_scaled(65), r2 = res_scaled(129);
    CHECK(r1 / r2 > 3.6);

    const auto g2 = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, 17, 17);
    const auto lin = DiscreteField::from_function(g2, [](double x, double y) { return 2 * x - y; });
    for (double eps : {0.0, 0.1}) CHECK(max_abs(weak_residual({3.0, eps}, lin)) < 1e-12);

    const auto c = DiscreteField::from_function(g2, [](double, double) { return 1.0; });
    CHECK(kind_of([&] { weak_residual({1.5, 0.0}, c); }) == ErrorKind::Singularity);
    CHECK(kind_of([&] { linearized_action({3.0, 0.0}, c, c); }) == ErrorKind::Singularity);
}

TEST_CASE("gradient matches finite differences of the energy") {
    const auto g = euclid(3, 1.0, 2.0, 17);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(g->size());
    for (auto& x : v) x = U(rng);
    const DiscreteField u(g, v);
    for (const EnergySpec s : {EnergySpec{1.5, 0.1}, EnergySpec{3.0, 0.01}, EnergySpec{4.0, 1.0}}) {
        const auto r = weak_residual(s, u);
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            const double h = 1e-6;
            auto w = v;
            w[i] += h;
            const double ep = energy(s, DiscreteField(g, w));
            w[i] -= 2 * h;
            const double em = energy(s, DiscreteField(g, w));
            CHECK(r[i] == doctest::Approx((ep - em) / (2 * h)).epsilon(1e-6));
        }
    }
}

TEST_CASE("linearized action: p = 2 is the 5-point Laplacian, symmetric, FD of the residual") {
    const auto g2 = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, 12, 12);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    auto random_field = [&] {
        std::vector<double> v(g2->size());
        for (auto& x : v) x = N(rng);
        return DiscreteField(g2, v);
    };
    const auto u = random_field();
    const auto psi = random_field();
    const auto L2 = linearized_action({2.0, 0.3}, u, psi);
    const double h = g2->hx();
    for (std::size_t j = 1; j + 1 < g2->ny(); ++j)
        for (std::size_t i = 1; i + 1 < g2->nx(); ++i) {
            const auto k = g2->index(i, j);
            const double lap = 4 * psi[k] - psi[g2->index(i + 1, j)] - psi[g2->index(i - 1, j)] -
                               psi[g2->index(i, j + 1)] - psi[g2->index(i, j - 1)];
            CHECK(L2[k] == doctest::Approx(2.0 * lap).epsilon(1e-12));
            (void)h;
        }

    const auto phi = random_field();
    for (const EnergySpec s : {EnergySpec{1.5, 0.05}, EnergySpec{3.0, 0.01}}) {
        const auto Lpsi = linearized_action(s, u, psi);
        const auto Lphi = linearized_action(s, u, phi);
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < g2->size(); ++i) {
            a += Lpsi[i] * phi[i];
            b += psi[i] * Lphi[i];
        }
        CHECK(a == doctest::Approx(b).epsilon(1e-10));

        const double step = 1e-6;
        std::vector<double> up(u.values().begin(), u.values().end()), um = up;
        for (std::size_t i = 0; i < up.size(); ++i) {
            up[i] += step * psi[i];
            um[i] -= step * psi[i];
        }
        const auto rp = energy_gradient(s, DiscreteField(g2, up));
        const auto rm = energy_gradient(s, DiscreteField(g2, um));
        for (std::size_t i = 0; i < up.size(); ++i)
            CHECK(Lpsi[i] == doctest::Approx((rp[i] - rm[i]) / (2 * step)).epsilon(1e-5).scale(1.0));
    }

    const auto c = DiscreteField::from_function(g2, [](double, double) { return 3.0; });
    CHECK(max_abs(linearized_action({3.0, 0.1}, u, c)) < 1e-10);
}

TEST_CASE("convexity and monotonicity in eps") {
    const auto g = euclid(3, 1.0, 2.0, 33);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(g->size()), b(g->size()), m(g->size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = N(rng);
            b[i] = N(rng);
        }
        b.front() = a.front();
        b.back() = a.back();
        for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
        for (const EnergySpec s : {EnergySpec{1.5, 0.01}, EnergySpec{2.0, 0.5}, EnergySpec{4.0, 1e-3}}) {
            const double ea = energy(s, DiscreteField(g, a));
            const double eb = energy(s, DiscreteField(g, b));
            CHECK(energy(s, DiscreteField(g, m)) < 0.5 * (ea + eb));
        }
        const DiscreteField u(g, a);
        CHECK(energy({3.0, 1e-3}, u) <= energy({3.0, 1e-2}, u));
    }
}
