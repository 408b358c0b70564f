#include "doctest.h"

#include "plap/solver.hpp"

#include <cmath>
#include <numbers>

using namespace plap;
using std::numbers::pi;

namespace {

std::shared_ptr<const Grid1D> euclid(int m, double a, double b, std::size_t n) {
    return std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(m), a, b, n));
}

ModelManifold arctan_manifold() { return ModelManifold::warped_product(3, WarpFunction(PolyEvenWarp{2.0})); }

double max_diff(const DiscreteField& a, const std::function<double(double)>& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - f(a.grid1d().node(i))));
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

TEST_CASE("harmonic Dirichlet solve") {
    const auto g = euclid(3, 1.0, 2.0, 257);
    auto [u, rep] = solve_dirichlet({2.0, 1.0}, g, BoundaryCondition::endpoints(*g, 1.0, 0.0));
    CHECK(max_diff(u, [](double t) { return 2 / t - 1; }) < 1e-5);
    CHECK(rep.steps[0].residual <= 1e-10);
    CHECK(rep.max_principle_ok);
}

TEST_CASE("constant boundary data") {
    const auto g = euclid(3, 1.0, 2.0, 33);
    for (const EnergySpec s : {EnergySpec{1.5, 1e-3}, EnergySpec{4.0, 0.1}}) {
        auto [u, rep] = solve_dirichlet(s, g, BoundaryCondition::endpoints(*g, 0.7, 0.7));
        CHECK(rep.steps[0].iterations == 0);
        CHECK(max_diff(u, [](double) { return 0.7; }) == 0.0);
    }
}

TEST_CASE("warped product solve matches the closed form") {
    const auto M = arctan_manifold();
    const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, -10.0, 10.0, 2049));
    auto [u, rep] = solve_dirichlet({3.0, 1e-6}, g, BoundaryCondition::endpoints(*g, 0.0, 1.0));
    const auto exact = radial_p_harmonic(M, 3.0, g, 0.0, 1.0);
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - exact[i]));
    CHECK(d < 1e-3);
    for (const auto& s : rep.steps)
        for (std::size_t k = 1; k < s.energy_history.size(); ++k)
            CHECK(s.energy_history[k] <= s.energy_history[k - 1] * (1 + 1e-13));
}

TEST_CASE("oracle agreement at small eps") {
    const auto M = ModelManifold::radial_euclidean(3);
    const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, 1.0, 2.0, 513));
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        SolveConfig cfg;
        auto [u, rep] = solve_dirichlet({p, 1e-12}, g, BoundaryCondition::endpoints(*g, 1.0, 0.0), cfg);
        const auto exact = radial_p_harmonic(M, p, g, 1.0, 0.0);
        double d = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - exact[i]));
        CHECK(d < 1e-4);
    }
}

TEST_CASE("radial p-harmonic closed forms") {
    const auto u = radial_p_harmonic(ModelManifold::radial_euclidean(3), 2.0, 1.0, 2.0, 1.0, 0.0, 65);
    CHECK(max_diff(u, [](double t) { return 2 / t - 1; }) < 1e-13);
    const auto w = radial_p_harmonic(arctan_manifold(), 3.0, -1.0, 1.0, 0.0, 1.0, 65);
    CHECK(max_diff(w, [](double t) { return (std::atan(t) + pi / 4) / (pi / 2); }) < 1e-13);
    const auto* prof = w.radial_profile();
    REQUIRE(prof != nullptr);
    CHECK(prof->value(0.3) == doctest::Approx((std::atan(0.3) + pi / 4) / (pi / 2)).epsilon(1e-13));
    CHECK(prof->d1(0.3) == doctest::Approx(1 / (1 + 0.09) / (pi / 2)).epsilon(1e-13));
    CHECK(prof->d2(0.3) == doctest::Approx(-2 * 0.3 / std::pow(1.09, 2) / (pi / 2)).epsilon(1e-12));
    CHECK(prof->d3(0.3) == doctest::Approx((6 * 0.09 - 2) / std::pow(1.09, 3) / (pi / 2)).epsilon(1e-12));
    const auto c = radial_p_harmonic(arctan_manifold(), 3.0, -1.0, 1.0, 0.4, 0.4, 33);
    CHECK(max_diff(c, [](double) { return 0.4; }) == 0.0);
    CHECK(kind_of([] { radial_p_harmonic(arctan_manifold(), 3.0, 1.0, 1.0, 0.0, 1.0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("continuation: p = 2 iterates coincide") {
    const auto g = euclid(3, 1.0, 2.0, 129);
    auto [fields, rep] = epsilon_continuation(2.0, g, BoundaryCondition::endpoints(*g, 1.0, 0.0));
    CHECK(fields.size() == 20);
    for (const auto& f : fields)
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(fields[0][i]).epsilon(1e-13));
    for (const auto& s : rep.steps) CHECK(s.dist_to_final < 1e-12);
    SolveConfig empty;
    empty.eps_schedule.clear();
    CHECK(kind_of([&] { epsilon_continuation(2.0, g, BoundaryCondition::endpoints(*g, 1.0, 0.0), empty); }) ==
          ErrorKind::InvalidInput);
}

TEST_CASE("continuation against a reference: sandwich and distances") {
    const auto g = euclid(3, 1.0, 2.0, 257);
    const auto bc = BoundaryCondition::endpoints(*g, 1.0, 0.0);
    SolveConfig ref_cfg;
    ref_cfg.eps_schedule = {1e-14};
    const auto [ref, ref_rep] = solve_dirichlet({4.0, 1e-14}, g, bc, ref_cfg);
    auto [fields, rep] = epsilon_continuation(4.0, g, bc, {}, &ref);
    CHECK(rep.distances_monotone);
    CHECK(rep.max_principle_ok);
    for (const auto& s : rep.steps) {
        REQUIRE(s.sandwich);
        CHECK(s.sandwich->ok());
    }
    CHECK(*rep.steps.back().dist_to_reference < 1e-5);

    const auto same = sandwich_check(2.0, 0.5, ref, ref);
    CHECK(same.ok());
    std::vector<double> bad(fields.back().values().begin(), fields.back().values().end());
    for (std::size_t i = 1; i + 1 < bad.size(); ++i) bad[i] += 0.05 * std::sin(3.0 * i);
    CHECK_FALSE(sandwich_check(4.0, 1e-6, ref, ref.with_values(bad)).ok());
    auto shifted = bad;
    shifted.front() += 1.0;
    CHECK(kind_of([&] { sandwich_check(4.0, 1e-6, ref, ref.with_values(shifted)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("2D solve with CG") {
    const auto g2 = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, 33, 33);
    const auto bc = BoundaryCondition::rectangle(*g2, [](double x, double y) { return x * x - y * y + 0.5 * x; });
    auto [u, rep] = solve_dirichlet({3.0, 1e-2}, g2, bc);
    CHECK(rep.steps[0].residual <= 1e-10);
    CHECK(rep.max_principle_ok);
    auto [h, hrep] = solve_dirichlet({2.0, 1.0}, g2, bc);
    // x² − y² + x/2 is discretely harmonic on the 5-point stencil
    for (std::size_t j = 0; j < g2->ny(); ++j)
        for (std::size_t i = 0; i < g2->nx(); ++i) {
            const double x = g2->x(i), y = g2->y(j);
            CHECK(h[g2->index(i, j)] == doctest::Approx(x * x - y * y + 0.5 * x).epsilon(1e-9).scale(1.0));
        }
}

TEST_CASE("two-end barrier") {
    const auto M = arctan_manifold();
    const auto g = std::make_shared<const Grid1D>(Grid1D::on_manifold(M, sinh_nodes(-1e6, 1e6, 4001)));
    const auto B = two_end_barrier(M, 3.0, g);
    CHECK(B.phi_inf == doctest::Approx(pi).epsilon(1e-10));
    CHECK(B.energy_analytic == doctest::Approx(1 / (pi * pi)).epsilon(1e-10));
    CHECK(B.energy_numeric == doctest::Approx(1 / (pi * pi)).epsilon(5e-3));
    CHECK(B.strictly_between);
    CHECK(B.sup == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(B.inf == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
    CHECK(B.h[2000] == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 0; i < g->size(); i += 97) {
        const double t = g->node(i);
        CHECK(B.h[i] == doctest::Approx((std::atan(t) + pi / 2) / pi).epsilon(1e-10));
    }

    const auto E = ModelManifold::warped_product(3, WarpFunction(PowerWarp{1.0, 1.0}));
    CHECK(kind_of([&] { two_end_barrier(E, 3.0, g); }) == ErrorKind::NoBarrier);
}

TEST_CASE("barrier restricted to [a, b] scales with the capacity") {
    const auto M = arctan_manifold();
    const double a = -0.5, b = 2.0, p = 3.0;
    const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, a, b, 2049));
    const auto B = two_end_barrier(M, p, g);
    const double cap = std::pow(inverse_area_integral(M, p, a, b), 1 - p);
    const double dh = B.h[g->size() - 1] - B.h[0];
    CHECK(B.energy_numeric == doctest::Approx(cap * std::pow(dh, p)).epsilon(1e-5));
}
