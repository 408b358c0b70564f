#include "doctest.h"

#include "plap/verifiers.hpp"

#include <cmath>
#include <numbers>

using namespace plap;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InternalInconsistency;
}

ModelManifold cosh4() { return ModelManifold::warped_product(4, WarpFunction(CoshWarp{})); }

DiscreteField euclid_field(int m, double a, double b, std::size_t n, const std::function<double(double)>& f) {
    return DiscreteField::from_function(
        std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(m), a, b, n)), f);
}

}  // namespace

TEST_CASE("kappa variants") {
    CHECK(kappa(2.0, 3, KappaVariant::Combined) == doctest::Approx(0.5));
    CHECK(kappa(3.0, 3, KappaVariant::Combined) == doctest::Approx(1.0));
    CHECK(kappa(3.0, 5, KappaVariant::Refined) == doctest::Approx(1.0));
    CHECK(kappa(1.5, 3, KappaVariant::Refined) == doctest::Approx(0.125));
    CHECK(kappa(3.0, 4, KappaVariant::Weak) == doctest::Approx(1.0 / 3.0));
    CHECK(kappa(1.5, 4, KappaVariant::Weak) == doctest::Approx(0.25 / 3.0));
    CHECK(kind_of([] { kappa(1.0, 3, KappaVariant::Combined); }) == ErrorKind::InvalidInput);
}

TEST_CASE("Kato ratio on the gallery") {
    const auto a = gallery_log_planar(512);
    const auto ra = kato_ratio(a.field, 2.0, a.checks);
    CHECK(ra.min == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(ra.max == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(ra.pass);

    const auto b = gallery_power(3.0, 4);
    const auto rb = kato_ratio(b.field, 3.0, b.checks);
    CHECK(rb.min == doctest::Approx(7.0 / 3.0).epsilon(1e-5));
    CHECK(rb.threshold == doctest::Approx(2.0 - 1e-3));

    const auto l = gallery_linear();
    const auto rl = kato_ratio(l.field, 2.0, l.checks);
    CHECK(std::isinf(rl.min));
    CHECK(rl.pass);

    const auto c = gallery_constant();
    CHECK(kind_of([&] { kato_ratio(c.field, 2.0, c.checks); }) == ErrorKind::NoData);

    const auto d = gallery_arctan();
    const auto rd = kato_ratio(d.field, 3.0, d.checks);
    CHECK(rd.min == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(rd.pass);
}

TEST_CASE("Kato lower bound over p and m") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (int m : {2, 3, 4, 5}) {
            const auto item = p == m ? gallery_log(m, 513) : gallery_power(p, m, 513);
            const auto r = kato_ratio(item.field, p, item.checks);
            CHECK(r.pass);
            CHECK(r.min == doctest::Approx(*item.expected_kato).epsilon(1e-4));
        }
    }
}

TEST_CASE("equality case structure for (p-1)^2 < m-1") {
    // radial frame: u_11 = u'', u_aa = u'/r, u_1a = 0 by symmetry
    const double p = 1.5;
    const int m = 4;
    const auto item = gallery_power(p, m);
    const auto* prof = item.field.radial_profile();
    REQUIRE(prof != nullptr);
    for (double r : {1.0, 1.25, 1.5, 2.0})
        CHECK(prof->d2(r) == doctest::Approx(-(m - 1) / (p - 1) * prof->d1(r) / r).epsilon(1e-12));
    const auto k = kato_ratio(item.field, p, item.checks);
    CHECK(k.min == doctest::Approx(1.0 + kappa(p, m, KappaVariant::Refined)).epsilon(1e-3));
}

TEST_CASE("strong form residual") {
    std::vector<double> h, eb, ea;
    for (std::size_t n : {257u, 513u, 1025u}) {
        h.push_back(1.0 / (n - 1));
        eb.push_back(strong_form_residual(gallery_power(3.0, 4, n).field, 3.0).max);
        ea.push_back(strong_form_residual(gallery_log(2, n).field, 2.0).max);
    }
    CHECK(observed_order(h, eb) >= 1.8);
    CHECK(observed_order(h, ea) >= 1.8);

    const auto c = gallery_constant();
    CHECK(strong_form_residual(c.field, 1.5, c.checks).max <= 1e-30);

    const auto u = euclid_field(3, 1.0, 2.0, 513, [](double t) { return 2 / t - 1; });
    CHECK(strong_form_residual(u, 2.0).max < 1e-4);
}

TEST_CASE("Bochner residual on fields and solver output") {
    const auto g2 = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, 17, 17);
    const auto lin = DiscreteField::from_function(g2, [](double x, double y) { return 0.3 * x - 1.2 * y; });
    CHECK(bochner_residual(lin, 3.0, 0.1).max < 1e-10);
    CHECK(kind_of([&] { bochner_residual(lin, 3.0, 0.0); }) == ErrorKind::Singularity);

    std::vector<double> h, err;
    for (std::size_t n : {256u, 512u, 1024u}) {
        const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(3), 1, 2, n));
        auto [u, rep] = solve_dirichlet({3.0, 1e-2}, g, BoundaryCondition::endpoints(*g, 1.0, 0.0));
        h.push_back(1.0 / (n - 1));
        err.push_back(bochner_residual(u, 3.0, 1e-2).max);
    }
    CHECK(observed_order(h, err) >= 0.8);

    std::vector<double> h2, err2;
    for (std::size_t n : {17u, 33u, 65u}) {
        const auto g = std::make_shared<const Grid2D>(0.0, 1.0, 0.0, 1.0, n, n);
        const auto bc = BoundaryCondition::rectangle(*g, [](double x, double y) { return std::sin(x) * std::cosh(y); });
        auto [u, rep] = solve_dirichlet({3.0, 0.1}, g, bc);
        CheckOptions o;
        o.collar = (n - 1) / 8;
        h2.push_back(1.0 / (n - 1));
        err2.push_back(bochner_residual(u, 3.0, 0.1, o).max);
    }
    CHECK(observed_order(h2, err2) >= 0.8);
}

TEST_CASE("L_{s,eps} Bochner identity with closed-form derivatives") {
    CheckOptions o;
    o.tol = 1e-8;
    const auto b = gallery_power(3.0, 4);
    CHECK(bochner_s_residual(b.field, 3.0, 1.0, 1e-3, o).pass);
    for (double s : {-1.0, 0.0, 2.5}) CHECK(bochner_s_residual(gallery_log(2, 257).field, 2.0, s, 0.3, o).pass);
    const auto harmonic = radial_p_harmonic(ModelManifold::radial_euclidean(3), 2.0, 1.0, 2.0, 1.0, 0.0, 257);
    CHECK(bochner_s_residual(harmonic, 2.0, 0.5, 1e-2, o).pass);
    CHECK(bochner_s_residual(gallery_arctan().field, 3.0, 1.0, 1e-3, o).pass);
    // a field that is not p-harmonic breaks the identity
    CHECK_FALSE(bochner_s_residual(gallery_log(3, 257).field, 2.0, 1.0, 1e-3, o).pass);

    // s = p − 2 against the FD route on the same field, ε → 0
    const auto fd = bochner_residual(gallery_power(3.0, 4, 2049).field, 3.0, 1e-10);
    CHECK(fd.max < 1e-3);
    CHECK(bochner_s_residual(gallery_power(3.0, 4, 257).field, 3.0, 1.0, 1e-10, o).pass);

    const auto plain = euclid_field(3, 1.0, 2.0, 33, [](double t) { return t; });
    CHECK(kind_of([&] { bochner_s_residual(plain, 2.0, 1.0, 0.1); }) == ErrorKind::UnsupportedVariant);
    CHECK(kind_of([&] { bochner_s_residual(b.field, 3.0, 1.0, 0.0); }) == ErrorKind::Singularity);
}

TEST_CASE("Caccioppoli with cutoffs") {
    const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(3), 1, 10, 1801));
    const auto w = DiscreteField::from_function(g, [](double t) { return 1 / t; });
    const auto ramp = DiscreteField::from_function(g, [](double t) {
        return std::clamp(std::min(t - 1.0, 10.0 - t), 0.0, 1.0);
    });
    const auto r = caccioppoli_check(w, ramp, 2.0);
    CHECK(r.pass);
    CHECK(r.max > 0.0);
    const auto zero = DiscreteField::from_function(g, [](double) { return 0.0; });
    const auto z = caccioppoli_check(w, zero, 2.0);
    CHECK(z.max == 0.0);
    CHECK(z.threshold == 0.0);
    CHECK(z.pass);
    const auto one = DiscreteField::from_function(g, [](double) { return 2.0; });
    const auto c = caccioppoli_check(one, ramp, 3.0);
    CHECK(c.max == 0.0);
    CHECK(c.pass);
    const auto neg = DiscreteField::from_function(g, [](double t) { return 5.0 - t; });
    CHECK(kind_of([&] { caccioppoli_check(neg, ramp, 2.0); }) == ErrorKind::InvalidInput);
    // −t² is p-superharmonic, not subharmonic
    const auto sup = DiscreteField::from_function(g, [](double t) { return 200.0 - t * t; });
    CHECK(kind_of([&] { caccioppoli_check(sup, ramp, 2.0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("weighted Caccioppoli constants") {
    const auto M = cosh4();
    const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, -2.0, 2.0, 401));
    WeightedCaccioppoliInput in;
    in.p = 2.0;
    in.eps = 1e-3;
    in.kappa = kappa(2.0, 4, KappaVariant::Refined);
    in.tau = 1.5;
    in.R = 1.0;
    const auto k = weighted_caccioppoli_constants(in);
    CHECK(k.C == doctest::Approx(0.5 * (1.0 + 1.0 / 3.0 - 0.5) - 1.5));
    CHECK(k.B == doctest::Approx(2.0 + (1.0 + 1.0 / 3.0 - 0.5)));
    const auto u = DiscreteField::from_function(g, [](double t) { return std::atan(std::sinh(t)); });
    CHECK(kind_of([&] { weighted_caccioppoli_check(M, u, in); }) == ErrorKind::ConstantsInfeasible);
    in.eps2 = 1.0 - 1e-6;
    CHECK(kind_of([&] { weighted_caccioppoli_check(M, u, in); }) == ErrorKind::ConstantsInfeasible);

    // the evaluation itself, with a user-supplied kappa large enough for C > 0
    in.kappa = 1.0;
    in.eps1 = in.eps2 = 0.1;
    CHECK(weighted_caccioppoli_constants(in).C == doctest::Approx(0.9 * 1.9 - 1.5));
    auto [sol, rep] = solve_dirichlet({2.0, in.eps}, g, BoundaryCondition::endpoints(*g, 0.0, 1.0));
    const auto r = weighted_caccioppoli_check(M, sol, in);
    CHECK(r.max > 0.0);
    CHECK(r.pass);
    const auto c = DiscreteField::from_function(g, [](double) { return 0.3; });
    const auto rc = weighted_caccioppoli_check(M, c, in);
    CHECK(rc.max == 0.0);
    CHECK(rc.threshold == doctest::Approx(100.0 * weighted_caccioppoli_constants(in).B * std::pow(in.eps, in.p / 2) *
                                          (volume_between(M, -2.0, -1.0) + volume_between(M, 1.0, 2.0))).epsilon(1e-4));
    in.R = 1.5;
    CHECK(kind_of([&] { weighted_caccioppoli_check(M, c, in); }) == ErrorKind::Domain);
    in.tau = 0.0;
    in.R = 1.0;
    CHECK(kind_of([&] { weighted_caccioppoli_check(M, c, in); }) == ErrorKind::InvalidInput);
}

TEST_CASE("monotonicity gap") {
    const std::vector<double> X{1.0, 0.0}, Y{0.0, 0.0}, Z{-1.0, 0.0};
    auto g = monotonicity_gap(X, Y, 3.0);
    CHECK(g.lhs == doctest::Approx(1.0));
    CHECK(g.psi == doctest::Approx(1.0));
    CHECK(g.ratio == doctest::Approx(1.0));
    g = monotonicity_gap(X, X, 2.5);
    CHECK(g.lhs == 0.0);
    CHECK(g.psi == 0.0);
    g = monotonicity_gap(X, Z, 2.0);
    CHECK(g.lhs == doctest::Approx(4.0));
    CHECK(g.psi == doctest::Approx(4.0));
    g = monotonicity_gap(X, Y, 1.5);
    CHECK(g.psi == doctest::Approx(0.5 / std::pow(2.0, 0.25)));

    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto s = monotonicity_suite(p, 3000, 7);
        CHECK(s.pass);
        CHECK(s.C_emp > 0.0);
        const auto again = monotonicity_suite(p, 3000, 7);
        CHECK(again.C_emp == s.C_emp);
    }
}

TEST_CASE("regularization gap") {
    const std::vector<double> X{2.0, 0.0}, Y{1.0, 0.0};
    const auto e2 = regularization_gap(X, Y, 0.3, 2.0, 0.5);
    CHECK(e2.a == 1.0);
    CHECK(e2.delta == 0.0);
    CHECK(e2.lhs == doctest::Approx(3.0));
    CHECK(e2.pass);
    const auto e3 = regularization_gap(X, Y, 0.1, 3.0, 0.5);
    CHECK(e3.a == doctest::Approx(1.0 + 1.2));
    CHECK(e3.delta == doctest::Approx(1.2 * std::pow(0.5, 3.0)));
    CHECK(e3.pass);
    const auto e5 = regularization_gap(X, Y, 0.1, 5.0, 1.0);
    CHECK(e5.a == doctest::Approx(1.0 + 0.5 + 0.125));
    CHECK(e5.delta == doctest::Approx(0.5 + 0.25));
    const auto same = regularization_gap(X, X, 0.1, 3.0, 0.5);
    CHECK(same.lhs == 0.0);
    CHECK(same.pass);
    CHECK(kind_of([&] { regularization_gap(Y, X, 0.1, 3.0, 0.5); }) == ErrorKind::InvalidInput);
    for (auto [lo, hi] : {std::pair{1.0, 2.0}, std::pair{2.0, 4.0}, std::pair{4.0, 6.0}})
        CHECK(regularization_suite(lo, hi, 2000, 11).violations == 0);
}

TEST_CASE("weighted Poincare") {
    const auto M = cosh4();
    const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, -5.0, 5.0, 2001));
    const auto bump = DiscreteField::from_function(g, [](double t) { return std::pow(1.0 - t * t / 25.0, 2); });
    const auto zero = DiscreteField::from_function(g, [](double) { return 0.0; });
    const auto narrow = DiscreteField::from_function(g, [](double t) {
        return std::abs(t - 1.0) < 1.0 ? std::pow(1.0 - (t - 1.0) * (t - 1.0), 2) : 0.0;
    });
    const auto r = weighted_poincare_check(M, {bump, zero, narrow});
    CHECK(r.pass);
    CHECK(r.values[1] == 0.0);
    CHECK(r.values[0] > 0.0);
    CHECK(r.values[0] < 1.0);
    const auto E = ModelManifold::radial_euclidean(3);
    CHECK(kind_of([&] { weighted_poincare_check(E, {bump}); }) == ErrorKind::UnsupportedVariant);
}

TEST_CASE("gallery metadata") {
    const auto items = example_gallery();
    REQUIRE(items.size() == 6);
    const auto& d = items.back();
    CHECK(d.id == "d");
    CHECK(q_energy(d.field, *d.q) == doctest::Approx(pi).epsilon(1e-3));
    CHECK(*d.expected_q_energy == doctest::Approx(pi));
    CHECK(classify_end(d.field.grid1d().manifold().value(), d.p, EndDirection::Plus) == EndType::Hyperbolic);
    CHECK(classify_end(d.field.grid1d().manifold().value(), d.p, EndDirection::Minus) == EndType::Hyperbolic);
    CHECK(kind_of([] { gallery_log_planar(33); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([] { gallery_power(3.0, 3); }) == ErrorKind::InvalidInput);
}

TEST_CASE("observed order") {
    const std::vector<double> h{0.1, 0.05, 0.025}, e{1e-2, 2.5e-3, 6.25e-4};
    CHECK(observed_order(h, e) == doctest::Approx(2.0));
}
