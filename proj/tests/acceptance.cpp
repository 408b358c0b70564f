// One line per acceptance criterion; exit status 1 if any is red.

#include "cli.hpp"

#include "plap/verifiers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace plap;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [FAILED]");
    }
};

std::string f(double x) { return cli::fmt(x); }

std::string g3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::shared_ptr<const Grid1D> uniform(const ModelManifold& M, double a, double b, std::size_t n) {
    return std::make_shared<const Grid1D>(Grid1D::uniform(M, a, b, n));
}

ModelManifold quartic() { return ModelManifold::warped_product(3, WarpFunction(PolyEvenWarp{2.0})); }

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

Verdict capacity_oracle() {
    Verdict v;
    const auto E = ModelManifold::radial_euclidean(3);
    const auto g = uniform(E, 1.0, 2.0, 2048);
    const double c1 = capacity_numeric(g, 2.0, Condenser::interval(*g)).value;
    v.require(rel(c1, 8 * pi) <= 5e-3, "euclidean " + f(c1) + " vs 8pi, rel " + g3(rel(c1, 8 * pi)));

    const auto Q = quartic();
    const auto gq = uniform(Q, -1.0, 1.0, 2048);
    const double c2 = capacity_numeric(gq, 3.0, Condenser::interval(*gq)).value;
    const double ref = std::pow(pi / 2, -2.0);
    v.require(rel(c2, ref) <= 5e-3, "A=(1+t^2)^2 " + f(c2) + " vs (pi/2)^-2, rel " + g3(rel(c2, ref)));
    return v;
}

Verdict eps_convergence() {
    Verdict v;
    const auto g = uniform(ModelManifold::radial_euclidean(3), 1.0, 2.0, 257);
    const auto bc = BoundaryCondition::endpoints(*g, 1.0, 0.0);
    for (double p : {1.5, 3.0, 4.0}) {
        SolveConfig rc;
        rc.eps_schedule = {1e-14};
        const auto ref = solve_dirichlet({p, 1e-14}, g, bc, rc).first;
        const auto rep = epsilon_continuation(p, g, bc, {}, &ref).second;
        bool sandwich = true;
        for (const auto& s : rep.steps) sandwich = sandwich && s.sandwich && s.sandwich->ok();
        const double last = *rep.steps.back().dist_to_reference;
        std::string note;
        if (last >= 1e-5) {
            // where the same schedule, continued, would first reach the target
            SolveConfig longer;
            longer.eps_schedule = SolveConfig::default_schedule(1.0, 30);
            const auto ext = epsilon_continuation(p, g, bc, longer, &ref).second;
            for (std::size_t k = 0; k < ext.steps.size(); ++k)
                if (*ext.steps[k].dist_to_reference < 1e-5) {
                    note = " (dist/eps = " + g3(last / rep.steps.back().eps) + "; below 1e-5 first at k=" +
                           std::to_string(k) + ")";
                    break;
                }
        }
        v.require(rep.distances_monotone && last < 1e-5 && sandwich,
                  "p=" + f(p) + " final dist " + g3(last) + note +
                      (rep.distances_monotone ? " monotone" : " not monotone") +
                      (sandwich ? ", sandwich ok" : ", sandwich broken"));
    }
    return v;
}

Verdict kato_sharpness() {
    Verdict v;
    const auto a = gallery_log_planar(512);
    auto opt = a.checks;
    opt.collar = 2;
    const auto ra = kato_ratio(a.field, a.p, opt);
    v.require(std::abs(ra.min - 2.0) <= 1e-3 && std::abs(ra.max - 2.0) <= 1e-3,
              "log|x| on 512^2: ratio in [" + f(ra.min) + ", " + f(ra.max) + "]");
    const auto b = gallery_power(3.0, 4);
    const auto rb = kato_ratio(b.field, b.p, b.checks);
    v.require(std::abs(rb.min - 7.0 / 3.0) <= 1e-3 && std::abs(rb.max - 7.0 / 3.0) <= 1e-3,
              "r^(-1/2), (p,m)=(3,4): ratio in [" + f(rb.min) + ", " + f(rb.max) + "]");
    return v;
}

Verdict kato_lower_bound() {
    Verdict v;
    double worst = kInf;
    std::string where;
    std::size_t cases = 0;
    bool ok = true;
    const auto consider = [&](const GalleryItem& item, double p, int m) {
        const auto r = kato_ratio(item.field, p, item.checks);
        const double margin = r.min - (1.0 + kappa(p, m, KappaVariant::Refined));
        ++cases;
        ok = ok && r.pass;
        if (margin < worst) {
            worst = margin;
            where = item.id + " (p,m)=(" + f(p) + "," + std::to_string(m) + ")";
        }
    };
    for (double p : {1.5, 2.0, 3.0, 4.0})
        for (int m : {2, 3, 4, 5}) {
            if (p == m)
                consider(gallery_log(m), p, m);
            else
                consider(gallery_power(p, m), p, m);
        }
    consider(gallery_log_planar(), 2.0, 2);
    consider(gallery_arctan(), 3.0, 3);
    v.require(ok, std::to_string(cases) + " fields, smallest margin " + g3(worst) + " at " + where);
    return v;
}

Verdict bochner_residuals() {
    Verdict v;
    std::vector<double> h, err;
    for (std::size_t n : {256u, 512u, 1024u, 2048u}) {
        const auto g = uniform(ModelManifold::radial_euclidean(3), 1.0, 2.0, n);
        const auto u = solve_dirichlet({3.0, 1e-2}, g, BoundaryCondition::endpoints(*g, 1.0, 0.0)).first;
        h.push_back(1.0 / static_cast<double>(n - 1));
        err.push_back(bochner_residual(u, 3.0, 1e-2).max);
    }
    const double order = observed_order(h, err);
    v.require(order >= 0.8, "solver output order " + g3(order) + " (residual " + g3(err.front()) + " -> " +
                                g3(err.back()) + ")");
    const auto b = gallery_power(3.0, 4);
    CheckOptions opt = b.checks;
    opt.tol = 1e-8;
    double worst = 0.0;
    bool ok = true;
    for (double s : {-1.0, 0.0, 1.0, 2.5}) {
        const auto r = bochner_s_residual(b.field, 3.0, s, 1e-3, opt);
        worst = std::max(worst, r.max);
        ok = ok && r.pass;
    }
    v.require(ok, "L_{s,eps} identity on r^(-1/2), s in {-1,0,1,2.5}: max scaled residual " + g3(worst));
    return v;
}

Verdict strong_form() {
    Verdict v;
    const auto order_of = [](const std::vector<std::size_t>& ns, const std::function<GalleryItem(std::size_t)>& make,
                             double width) {
        std::vector<double> h, err;
        for (auto n : ns) {
            const auto item = make(n);
            h.push_back(width / static_cast<double>(n - 1));
            err.push_back(strong_form_residual(item.field, item.p, item.checks).max);
        }
        return observed_order(h, err);
    };
    const std::vector<std::size_t> radial{65, 129, 257, 513};
    const double oa = order_of(radial, [](std::size_t n) { return gallery_log(3, n); }, 1.0);
    const double op = order_of({64, 128, 256, 512}, [](std::size_t n) { return gallery_log_planar(n); }, 4.0);
    const double ob = order_of(radial, [](std::size_t n) { return gallery_power(3.0, 4, n); }, 1.0);
    v.require(oa >= 1.8, "log r (m=3) order " + g3(oa));
    v.require(op >= 1.8, "log|x| planar order " + g3(op));
    v.require(ob >= 1.8, "r^(-1/2) order " + g3(ob));
    return v;
}

Verdict monotonicity() {
    Verdict v;
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto s = monotonicity_suite(p, 100000, 1);
        v.require(s.pass && s.negative_lhs == 0 && s.fresh_violations == 0 && s.C_emp > 0.0,
                  "p=" + f(p) + " C_emp " + g3(s.C_emp) + ", " + std::to_string(s.negative_lhs) + "+" +
                      std::to_string(s.fresh_violations) + " violations");
    }
    return v;
}

Verdict regularization() {
    Verdict v;
    for (auto [lo, hi] : {std::pair{1.0, 2.0}, std::pair{2.0, 4.0}, std::pair{4.0, 6.0}}) {
        const auto s = regularization_suite(lo, hi, 10000, 1);
        v.require(s.pass && s.violations == 0, "p in (" + f(lo) + "," + f(hi) + "]: " + std::to_string(s.violations) +
                                                   " violations, min margin " + g3(s.min_margin));
    }
    return v;
}

Verdict caccioppoli() {
    Verdict v;
    const auto g = uniform(ModelManifold::radial_euclidean(3), 1.0, 10.0, 1801);
    const auto w = DiscreteField::from_function(g, [](double t) { return 1.0 / t; });
    const auto ramp = [](double t) { return std::clamp(std::min(t - 1.0, 10.0 - t), 0.0, 1.0); };
    const std::vector<std::pair<std::string, std::function<double(double)>>> cutoffs{
        {"ramp", ramp},
        {"smoothstep", [&](double t) { const double x = ramp(t); return x * x * (3.0 - 2.0 * x); }},
        {"tent", [](double t) { return std::min(t - 1.0, 10.0 - t) / 4.5; }}};
    for (const auto& [name, fn] : cutoffs) {
        const auto r = caccioppoli_check(w, DiscreteField::from_function(g, fn), 2.0);
        v.require(r.pass, "1/t with " + name + " cutoff: margin " + g3(r.threshold - r.max));
    }

    // weighted version on the cosh end, m = 4, p = 2, τ = 3/2
    const auto M = ModelManifold::warped_product(4, WarpFunction(CoshWarp{}));
    WeightedCaccioppoliInput in;
    in.p = 2.0;
    in.eps = 1e-3;
    in.kappa = kappa(2.0, 4, KappaVariant::Combined);
    in.tau = 1.5;
    in.R = 1.0;
    double best_C = -kInf;
    for (int i = 1; i < 100; ++i)
        for (int j = 1; j < 100; ++j) {
            auto t = in;
            t.eps1 = i / 100.0;
            t.eps2 = j / 100.0;
            best_C = std::max(best_C, weighted_caccioppoli_constants(t).C);
        }
    const auto gc = uniform(M, -2.0, 2.0, 401);
    const auto u = solve_dirichlet({2.0, in.eps}, gc, BoundaryCondition::endpoints(*gc, 0.0, 1.0)).first;
    try {
        const auto r = weighted_caccioppoli_check(M, u, in);
        v.require(r.pass && r.threshold > r.max, "weighted: margin " + g3(r.threshold - r.max));
    } catch (const Error& e) {
        v.require(false, std::string("weighted: ") + to_string(e.kind()) + ", kappa " + f(in.kappa) +
                             ", largest C over eps1,eps2 in (0,1) is " + g3(best_C));
    }
    auto bad = in;
    bad.eps2 = 1.0 - 1e-6;
    bool raised = false;
    try {
        weighted_caccioppoli_check(M, u, bad);
    } catch (const Error& e) {
        raised = e.kind() == ErrorKind::ConstantsInfeasible;
    }
    v.require(raised, "eps2 = 1-1e-6 raises constants-infeasible");
    return v;
}

Verdict end_classification() {
    Verdict v;
    std::size_t agree = 0, total = 0;
    bool euclid_rule = true;
    std::string mismatches;
    const auto run = [&](const std::string& name, const ModelManifold& M, double p, EndDirection dir,
                         std::vector<double> R) {
        ++total;
        const EndType integral = classify_end(M, p, dir);
        try {
            const auto s = end_barrier_sweep(M, p, 1.0, R, dir);
            if (s.diagnosis == integral) ++agree;
            else mismatches += " " + name;
        } catch (const Error& e) {
            mismatches += " " + name + "(" + to_string(e.kind()) + ")";
        }
        return integral;
    };
    const std::vector<double> power_R{1e2, 1e3, 1e4, 1e5, 1e6};
    const std::vector<double> exp_R{10, 20, 40, 80, 160};
    for (int m : {2, 3, 4}) {
        const std::set<double> ps{1.5, 2.0, 3.0, 4.0, static_cast<double>(m)};
        for (double p : ps) {
            const auto t = run("E" + std::to_string(m) + "p" + f(p), ModelManifold::radial_euclidean(m), p,
                               EndDirection::Plus, power_R);
            euclid_rule = euclid_rule && ((t == EndType::Parabolic) == (p >= m));
        }
    }
    const std::size_t euclid_cases = total;
    const auto ex = ModelManifold::warped_product(2, WarpFunction(ExponentialWarp{1.0}));
    const auto ch = ModelManifold::warped_product(4, WarpFunction(CoshWarp{}));
    const auto pe = quartic();
    for (double p : {2.0, 3.0})
        for (auto d : {EndDirection::Plus, EndDirection::Minus}) run("exp", ex, p, d, exp_R);
    for (double p : {2.0, 4.0})
        for (auto d : {EndDirection::Plus, EndDirection::Minus}) run("cosh", ch, p, d, exp_R);
    for (double p : {3.0, 5.0, 6.0}) run("polyeven+p" + f(p), pe, p, EndDirection::Plus, power_R);
    run("polyeven-p3", pe, 3.0, EndDirection::Minus, power_R);

    v.require(agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree (" +
                                  std::to_string(euclid_cases) + " euclidean, " +
                                  std::to_string(total - euclid_cases) + " warped)" + mismatches);
    v.require(euclid_rule, "euclidean parabolic exactly when p >= m");
    return v;
}

Verdict decay_volume() {
    Verdict v;
    const auto M = ModelManifold::warped_product(2, WarpFunction(ExponentialWarp{1.0}));
    const double lambda = p_poincare_bound(0.25, 2.0);
    const std::vector<double> R{2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto g = uniform(M, 0.0, 40.0, 8001);
    const auto prof = tail_energy_profile(M, 2.0, barrier_limit(M, 2.0, g), R, lambda);
    v.require(prof.pass && prof.slope <= -1.0 / 6.0, "tail log-slope " + g3(prof.slope) + " vs bound -1/6");
    const auto vol = volume_growth_check(M, 2.0, lambda, R);
    v.require(vol.pass, "shell volume bound with C " + g3(vol.C) + " fitted at R=2");
    return v;
}

Verdict finite_q_energy() {
    Verdict v;
    const auto d = gallery_arctan();
    const double E = q_energy(d.field, 3.0);
    v.require(std::abs(E - pi) <= 1e-3, "E_3 = " + f(E));
    const auto M = quartic();
    const bool two = classify_end(M, 3.0, EndDirection::Plus) == EndType::Hyperbolic &&
                     classify_end(M, 3.0, EndDirection::Minus) == EndType::Hyperbolic;
    v.require(two, "both ends hyperbolic");
    const auto B = two_end_barrier(M, 3.0, d.field.grid1d_ptr());
    v.require(std::abs(B.sup - 1.0) <= 1e-3 && std::abs(B.inf) <= 1e-3,
              "barrier sup " + f(B.sup) + " inf " + g3(B.inf));
    v.require(rel(B.energy_numeric, std::pow(pi, -2.0)) <= 5e-3,
              "barrier E_3 " + f(B.energy_numeric) + " vs pi^-2, rel " + g3(rel(B.energy_numeric, std::pow(pi, -2.0))));
    return v;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism() {
    Verdict v;
    const auto base = fs::temp_directory_path() / "plap_acceptance";
    fs::remove_all(base);
    std::ostringstream sink;
    const std::vector<std::string> args{"report", "--seed", "2024", "--samples", "5000", "--out"};
    auto a1 = args, a2 = args;
    a1.push_back((base / "run1").string());
    a2.push_back((base / "run2").string());
    const int c1 = cli::run(a1, sink, sink);
    const int c2 = cli::run(a2, sink, sink);
    std::size_t files = 0, same = 0;
    for (const auto& e : fs::directory_iterator(base / "run1")) {
        ++files;
        if (slurp(e.path()) == slurp(base / "run2" / e.path().filename())) ++same;
    }
    v.require(c1 == 0 && c2 == 0, "battery exit codes " + std::to_string(c1) + "," + std::to_string(c2));
    v.require(files > 0 && same == files, std::to_string(same) + "/" + std::to_string(files) + " files identical");

    const auto m1 = monotonicity_suite(3.0, 20000, 99);
    const auto m2 = monotonicity_suite(3.0, 20000, 99);
    v.require(m1.C_emp == m2.C_emp && m1.fresh_min_ratio == m2.fresh_min_ratio, "seeded suite repeats exactly");
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"capacity oracle", capacity_oracle},
        {"eps-convergence and energy sandwich", eps_convergence},
        {"Kato sharpness", kato_sharpness},
        {"Kato lower bound over the gallery", kato_lower_bound},
        {"Bochner residuals", bochner_residuals},
        {"strong form convergence order", strong_form},
        {"vector monotonicity inequality", monotonicity},
        {"regularization inequality", regularization},
        {"Caccioppoli estimates", caccioppoli},
        {"end classification", end_classification},
        {"decay and volume bounds", decay_volume},
        {"finite q-energy example", finite_q_energy},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("error: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += v.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
