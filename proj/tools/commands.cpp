#include "cli.hpp"

#include "plap/verifiers.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <set>

namespace plap::cli {

namespace {

using Rows = std::vector<std::vector<std::string>>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string yes_no(bool b) { return b ? "true" : "false"; }

struct Options {
    std::string manifold;
    std::string out;
    double p = 2.0;
    std::vector<double> p_list;
    double eps = 1e-8;
    double q = kNaN;
    double a = kNaN;
    double b = kNaN;
    double ua = 1.0;
    double ub = 0.0;
    std::size_t nodes = 0;
    std::string grid = "uniform";
    int steps = 20;
    int max_newton = 50;
    double eps0 = 1.0;
    double ref_eps = 1e-14;
    double tol = kNaN;

    double R0 = kNaN;
    std::vector<double> R;
    double T = kNaN;
    double extent = 1e6;
    double lambda2 = kNaN;
    double lambda_p = kNaN;

    std::string check;
    std::string gallery = "b";
    int m = 4;
    double s = 1.0;
    std::string cutoff = "ramp";
    std::string kappa_variant = "refined";
    double kappa = kNaN;
    double tau = 0.0;
    double eps1 = 0.5;
    double eps2 = 0.5;
    double radius = 1.0;
    double center = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 1;
    std::size_t dim = 3;
};

void check_p(double p) { require(std::isfinite(p) && p > 1.0, ErrorKind::InvalidInput, "p must be > 1"); }

std::size_t nodes_or(const Options& o, std::size_t fallback) {
    const std::size_t n = o.nodes ? o.nodes : fallback;
    require(n >= 8, ErrorKind::InvalidInput, "resolution must be at least 8 nodes");
    return n;
}

ModelManifold manifold_of(const Options& o) {
    require(!o.manifold.empty(), ErrorKind::InvalidInput, "--manifold is required");
    return load_manifold(o.manifold);
}

std::pair<double, double> interval_of(const ModelManifold& M, const Options& o) {
    const double a = std::isnan(o.a) ? M.domain().lo : o.a;
    const double b = std::isnan(o.b) ? M.domain().hi : o.b;
    require(std::isfinite(a) && std::isfinite(b), ErrorKind::InvalidInput, "give finite --a and --b");
    require(a < b, ErrorKind::InvalidInput, "need a < b");
    return {a, b};
}

std::shared_ptr<const Grid1D> grid_of(const ModelManifold& M, double a, double b, std::size_t n,
                                      const std::string& kind) {
    if (kind == "uniform") return std::make_shared<const Grid1D>(Grid1D::uniform(M, a, b, n));
    if (kind == "sinh") return std::make_shared<const Grid1D>(Grid1D::on_manifold(M, sinh_nodes(a, b, n)));
    if (kind == "geometric") return std::make_shared<const Grid1D>(Grid1D::on_manifold(M, geometric_nodes(a, b, n)));
    fail(ErrorKind::InvalidInput, "unknown grid kind " + kind);
}

bool exponential_tail(const ModelManifold& M) {
    if (!M.is_warped()) return false;
    const auto& k = M.warped().eta.kind();
    if (std::holds_alternative<ExponentialWarp>(k) || std::holds_alternative<CoshWarp>(k)) return true;
    if (const auto* t = std::get_if<TabulatedWarp>(&k)) {
        const auto is_exp = [](const std::optional<TailLaw>& l) { return l && l->kind == TailLaw::Kind::Exponential; };
        return is_exp(t->lower_tail) || is_exp(t->upper_tail);
    }
    return false;
}

std::vector<EndDirection> infinite_ends(const ModelManifold& M) {
    std::vector<EndDirection> d;
    if (!M.domain().bounded_above()) d.push_back(EndDirection::Plus);
    if (!M.domain().bounded_below()) d.push_back(EndDirection::Minus);
    require(!d.empty(), ErrorKind::InvalidInput, "manifold has no infinite end");
    return d;
}

const char* to_string(EndDirection d) { return d == EndDirection::Plus ? "+inf" : "-inf"; }

// ---- shared table builders ------------------------------------------------

struct ClassifyRow {
    std::vector<std::string> cells;
    bool agree = false;
};

ClassifyRow classify_row(const std::string& name, const ModelManifold& M, double p, EndDirection dir, double R0,
                         std::vector<double> R) {
    const EndType integral = classify_end(M, p, dir);
    ClassifyRow row;
    std::string sweep, phi = "", far = "";
    try {
        const auto s = end_barrier_sweep(M, p, R0, R, dir);
        sweep = to_string(s.diagnosis);
        phi = fmt(s.phi_limit);
        far = fmt(s.limit_at_far_end);
        row.agree = s.diagnosis == integral;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InternalInconsistency) throw;
        sweep = "disagrees";
    }
    row.cells = {name, to_string(dir), fmt(p), to_string(integral), sweep, phi, far, yes_no(row.agree)};
    return row;
}

const std::vector<std::string> kClassifyHeader{"manifold", "direction", "p",          "integral_test",
                                               "sweep",    "phi_limit", "limit_at_far_end", "agree"};

std::vector<double> default_R(const ModelManifold& M) {
    if (exponential_tail(M)) return {10.0, 20.0, 40.0, 80.0, 160.0};
    return {1e2, 1e3, 1e4, 1e5, 1e6};
}

struct GalleryRow {
    std::vector<std::string> cells;
    bool pass = true;
};

const std::vector<std::string> kGalleryHeader{"id",         "description",   "p",         "m",
                                              "kato_min",   "kato_expected", "kato_pass", "strong_max",
                                              "q_energy",   "q_energy_expected", "pass"};

GalleryRow gallery_row(const GalleryItem& item) {
    GalleryRow row;
    std::string kmin, kexp, kpass, strong, qe, qexp;
    if (item.expected_kato) {
        const auto k = kato_ratio(item.field, item.p, item.checks);
        const double e = *item.expected_kato;
        const bool ok = std::isinf(e) ? std::isinf(k.min) : std::abs(k.min - e) <= 1e-3 && k.pass;
        kmin = fmt(k.min);
        kexp = fmt(e);
        kpass = yes_no(ok);
        row.pass = row.pass && ok;
        strong = fmt(strong_form_residual(item.field, item.p, item.checks).max);
    }
    if (item.q) {
        const double E = q_energy(item.field, *item.q);
        qe = fmt(E);
        if (item.expected_q_energy) {
            qexp = fmt(*item.expected_q_energy);
            row.pass = row.pass && std::abs(E - *item.expected_q_energy) <= 1e-3 * *item.expected_q_energy;
        }
    }
    row.cells = {item.id, item.description, fmt(item.p), std::to_string(item.m), kmin, kexp, kpass,
                 strong,  qe,               qexp,        yes_no(row.pass)};
    return row;
}

const std::vector<std::string> kMonotonicityHeader{"p",     "samples",          "negative_lhs",    "zero_lhs_distinct",
                                                   "C_emp", "fresh_violations", "fresh_min_ratio", "pass"};

std::vector<std::string> monotonicity_row(const MonotonicitySuite& r) {
    return {fmt(r.p),     std::to_string(r.samples),          std::to_string(r.negative_lhs),
            std::to_string(r.zero_lhs_distinct), fmt(r.C_emp), std::to_string(r.fresh_violations),
            fmt(r.fresh_min_ratio),              yes_no(r.pass)};
}

const std::vector<std::string> kRegularizationHeader{"p_lo", "p_hi", "samples", "violations", "min_margin", "pass"};

std::vector<std::string> regularization_row(const RegularizationSuite& r) {
    return {fmt(r.p_lo), fmt(r.p_hi), std::to_string(r.samples), std::to_string(r.violations), fmt(r.min_margin),
            yes_no(r.pass)};
}

const std::vector<std::string> kBoundHeader{"R", "tail", "bound", "pass"};

Rows bound_rows(const std::vector<BoundRow>& rows) {
    Rows out;
    for (const auto& r : rows) out.push_back({fmt(r.R), fmt(r.measured), fmt(r.bound), yes_no(r.pass)});
    return out;
}

const std::vector<std::string> kCheckHeader{"check", "min", "max", "threshold", "pass"};

std::vector<std::string> check_row(const VerifierReport& r) {
    return {r.name, fmt(r.min), fmt(r.max), fmt(r.threshold), yes_no(r.pass)};
}

void print_check(std::ostream& out, const VerifierReport& r) {
    if (r.values.size() <= 1) {
        out << r.name << ": lhs " << fmt(r.max) << " rhs " << fmt(r.threshold) << (r.pass ? " pass" : " FAIL") << '\n';
        return;
    }
    out << r.name << ": min " << fmt(r.min) << " max " << fmt(r.max) << " threshold " << fmt(r.threshold) << " over "
        << r.included << " nodes (" << r.excluded << " excluded) " << (r.pass ? "pass" : "FAIL") << '\n';
}

Rows node_values(const DiscreteField& u, const VerifierReport& r) {
    Rows rows;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        if (std::isnan(r.values[i])) continue;
        if (u.is_1d()) {
            rows.push_back({fmt(u.grid1d().node(i)), fmt(r.values[i])});
        } else {
            const auto& g = u.grid2d();
            rows.push_back({fmt(g.x(i % g.nx())), fmt(g.y(i / g.nx())), fmt(r.values[i])});
        }
    }
    return rows;
}

std::vector<std::string> node_header(const DiscreteField& u) {
    if (u.is_1d()) return {"t", "value"};
    return {"x", "y", "value"};
}

void lambda_of(const Options& o, double p, double& lambda_p) {
    require(std::isnan(o.lambda2) || std::isnan(o.lambda_p), ErrorKind::InvalidInput,
            "give --lambda2 or --lambda-p, not both");
    if (!std::isnan(o.lambda_p))
        lambda_p = o.lambda_p;
    else if (!std::isnan(o.lambda2))
        lambda_p = p_poincare_bound(o.lambda2, p);
    else
        lambda_p = 0.0;
    require(lambda_p >= 0.0, ErrorKind::InvalidInput, "lambda must be >= 0");
}

// ---- commands ---------------------------------------------------------------

Report cmd_solve(const Options& o, std::ostream& out) {
    check_p(o.p);
    const auto M = manifold_of(o);
    const auto [a, b] = interval_of(M, o);
    const auto g = grid_of(M, a, b, nodes_or(o, 513), o.grid);
    const EnergySpec spec{o.p, o.eps};
    spec.validate();
    SolveConfig cfg;
    cfg.max_newton_iters = o.max_newton;
    auto [u, rep] = solve_dirichlet(spec, g, BoundaryCondition::endpoints(*g, o.ua, o.ub), cfg);
    const auto& st = rep.steps.back();

    Report r("solve");
    Rows rows;
    for (std::size_t i = 0; i < u.size(); ++i) rows.push_back({fmt(g->node(i)), fmt(u[i])});
    r.add_table("solution", {"t", "u"}, std::move(rows));
    r.set("p", o.p);
    r.set("eps", o.eps);
    r.set("nodes", static_cast<double>(g->size()));
    r.set("newton_iterations", static_cast<double>(st.iterations));
    r.set("residual", st.residual);
    r.set("E_p_eps", st.energy_eps);
    r.set("E_p", st.energy_p);
    r.set("max_principle", rep.max_principle_ok);
    r.set_pass(rep.max_principle_ok);
    out << "E_p,eps " << fmt(st.energy_eps) << "\nE_p " << fmt(st.energy_p) << "\nnewton iterations "
        << st.iterations << " residual " << fmt(st.residual) << '\n';
    if (!std::isnan(o.q)) {
        require(o.q > 1.0, ErrorKind::InvalidInput, "q must be > 1");
        const double E = q_energy(u, o.q);
        r.set("q", o.q);
        r.set("E_q", E);
        out << "E_q " << fmt(E) << '\n';
    }
    return r;
}

Report cmd_continuation(const Options& o, std::ostream& out) {
    check_p(o.p);
    require(o.steps >= 1, ErrorKind::InvalidInput, "--steps must be >= 1");
    const auto M = manifold_of(o);
    const auto [a, b] = interval_of(M, o);
    const auto g = grid_of(M, a, b, nodes_or(o, 257), o.grid);
    const auto bc = BoundaryCondition::endpoints(*g, o.ua, o.ub);
    SolveConfig cfg;
    cfg.eps_schedule = SolveConfig::default_schedule(o.eps0, o.steps);
    cfg.max_newton_iters = o.max_newton;
    cfg.validate();

    std::optional<DiscreteField> ref;
    if (o.ref_eps > 0.0) {
        SolveConfig rc;
        rc.eps_schedule = {o.ref_eps};
        rc.max_newton_iters = o.max_newton;
        ref = solve_dirichlet({o.p, o.ref_eps}, g, bc, rc).first;
    }
    auto [fields, rep] = epsilon_continuation(o.p, g, bc, cfg, ref ? &*ref : nullptr);

    Report r("continuation");
    Rows rows, sand;
    bool sandwich_ok = true;
    for (const auto& s : rep.steps) {
        rows.push_back({fmt(s.eps), fmt(s.energy_p), fmt(s.energy_eps), fmt(s.dist_to_final)});
        if (s.sandwich) {
            const auto& w = *s.sandwich;
            sandwich_ok = sandwich_ok && w.ok();
            sand.push_back({fmt(s.eps), fmt(*s.dist_to_reference), fmt(w.E_p_ref), fmt(w.E_p_eps), fmt(w.E_peps_eps),
                            fmt(w.E_peps_ref), yes_no(w.ok())});
        }
    }
    r.add_table("continuation", {"eps", "E_p", "E_p_eps", "w1p_dist_to_final"}, std::move(rows));
    if (ref) {
        r.add_table("sandwich",
                    {"eps", "w1p_dist_to_reference", "E_p_ref", "E_p_eps", "E_peps_eps", "E_peps_ref", "pass"},
                    std::move(sand));
        r.set("reference_eps", o.ref_eps);
        r.set("final_dist_to_reference", *rep.steps.back().dist_to_reference);
        r.set("sandwich", sandwich_ok);
    }
    r.set("p", o.p);
    r.set("steps", static_cast<double>(rep.steps.size()));
    r.set("distances_monotone", rep.distances_monotone);
    r.set("max_principle", rep.max_principle_ok);
    r.set_pass(rep.distances_monotone && rep.max_principle_ok && sandwich_ok);
    out << "steps " << rep.steps.size() << " final E_p " << fmt(rep.steps.back().energy_p) << " distances "
        << (rep.distances_monotone ? "monotone" : "NOT monotone");
    if (ref) out << " sandwich " << (sandwich_ok ? "ok" : "FAILED");
    out << '\n';
    return r;
}

Report cmd_capacity(const Options& o, std::ostream& out) {
    check_p(o.p);
    const auto M = manifold_of(o);
    const auto [a, b] = interval_of(M, o);
    const double tol = std::isnan(o.tol) ? 1e-2 : o.tol;
    const auto g = grid_of(M, a, b, nodes_or(o, 2048), o.grid);
    const auto an = capacity_analytic(M, o.p, a, b);
    const auto num = capacity_numeric(g, o.p, Condenser::interval(*g));
    const double rel = std::abs(num.value - an.value) / an.value;

    Report r("capacity");
    r.add_table("capacity", {"a", "b", "p", "analytic", "numeric", "rel_err"},
                {{fmt(a), fmt(b), fmt(o.p), fmt(an.value), fmt(num.value), fmt(rel)}});
    if (num.extremal) {
        Rows rows;
        for (std::size_t i = 0; i < num.extremal->size(); ++i) rows.push_back({fmt(g->node(i)), fmt((*num.extremal)[i])});
        r.add_table("extremal", {"t", "u"}, std::move(rows));
    }
    r.set("analytic", an.value);
    r.set("numeric", num.value);
    r.set("rel_err", rel);
    r.set("tol", tol);
    r.set_pass(rel <= tol);
    out << "analytic " << fmt(an.value) << "\nnumeric " << fmt(num.value) << "\nrelative error " << fmt(rel) << '\n';
    return r;
}

Report cmd_classify(const Options& o, std::ostream& out) {
    const auto M = manifold_of(o);
    const auto ps = o.p_list.empty() ? std::vector<double>{o.p} : o.p_list;
    const auto R = o.R.empty() ? default_R(M) : o.R;
    const double R0 = std::isnan(o.R0) ? 1.0 : o.R0;
    Report r("classify");
    Rows rows;
    for (double p : ps) {
        check_p(p);
        for (auto dir : infinite_ends(M)) {
            auto row = classify_row(std::filesystem::path(o.manifold).filename().string(), M, p, dir, R0, R);
            r.set_pass(row.agree);
            out << "p " << fmt(p) << " end " << to_string(dir) << ": " << row.cells[3] << " (sweep " << row.cells[4]
                << ")\n";
            rows.push_back(std::move(row.cells));
        }
    }
    r.add_table("classify", kClassifyHeader, std::move(rows));
    return r;
}

Report cmd_barrier(const Options& o, std::ostream& out) {
    check_p(o.p);
    const auto M = manifold_of(o);
    require(o.extent > 0.0, ErrorKind::InvalidInput, "--extent must be positive");
    const double lo = M.domain().bounded_below() ? M.domain().lo : -o.extent;
    const double hi = M.domain().bounded_above() ? M.domain().hi : o.extent;
    const auto g = grid_of(M, lo, hi, nodes_or(o, 4001), o.grid == "uniform" ? "sinh" : o.grid);
    const auto B = two_end_barrier(M, o.p, g);

    Report r("barrier");
    Rows rows;
    for (std::size_t i = 0; i < B.h.size(); ++i) rows.push_back({fmt(g->node(i)), fmt(B.h[i])});
    r.add_table("barrier", {"t", "h"}, std::move(rows));
    r.set("phi_inf", B.phi_inf);
    r.set("sup", B.sup);
    r.set("inf", B.inf);
    r.set("energy_analytic", B.energy_analytic);
    r.set("energy_numeric", B.energy_numeric);
    r.set("strictly_between", B.strictly_between);
    r.set_pass(B.strictly_between);
    out << "sup " << fmt(B.sup) << " inf " << fmt(B.inf) << "\nE_p analytic " << fmt(B.energy_analytic)
        << " numeric " << fmt(B.energy_numeric) << '\n';
    return r;
}

Report cmd_decay(const Options& o, std::ostream& out) {
    check_p(o.p);
    const auto M = manifold_of(o);
    const auto R = o.R.empty() ? std::vector<double>{2, 4, 6, 8, 10} : o.R;
    const double R0 = std::isnan(o.R0) ? std::max(M.domain().lo, M.is_warped() ? 0.0 : 1.0) : o.R0;
    const double T = std::isnan(o.T) ? 4.0 * *std::max_element(R.begin(), R.end()) : o.T;
    double lambda_p = 0.0;
    lambda_of(o, o.p, lambda_p);
    const auto g = grid_of(M, R0, T, nodes_or(o, 8001), o.grid);
    const auto w = barrier_limit(M, o.p, g);
    const auto prof = tail_energy_profile(M, o.p, w, R, lambda_p);

    Report r("decay");
    r.add_table("decay", kBoundHeader, bound_rows(prof.rows));
    r.set("lambda_p", lambda_p);
    r.set("C3", prof.C3);
    r.set("slope", prof.slope);
    r.set("slope_bound", prof.slope_bound);
    r.set("tails_nonincreasing", prof.tails_nonincreasing);
    r.set_pass(prof.pass);
    out << "log-slope " << fmt(prof.slope) << " bound " << fmt(prof.slope_bound) << (prof.pass ? " pass" : " FAIL")
        << '\n';
    return r;
}

Report cmd_volume(const Options& o, std::ostream& out) {
    check_p(o.p);
    const auto M = manifold_of(o);
    const auto R = o.R.empty() ? std::vector<double>{2, 3, 4, 5, 6, 7, 8, 9, 10} : o.R;
    double lambda_p = 0.0;
    lambda_of(o, o.p, lambda_p);
    const auto v = volume_growth_check(M, o.p, lambda_p, R);

    Report r("volume");
    auto rows = bound_rows(v.rows);
    r.add_table("volume", {"R", "volume", "bound", "pass"}, std::move(rows));
    r.set("end", std::string(to_string(v.end)));
    r.set("lambda_p", lambda_p);
    r.set("C", v.C);
    r.set_pass(v.pass);
    out << to_string(v.end) << " end, C " << fmt(v.C) << (v.pass ? " pass" : " FAIL") << '\n';
    return r;
}

GalleryItem gallery_of(const Options& o) {
    const std::string& id = o.gallery;
    if (id == "a") {
        if (o.m == 2) return gallery_log_planar(o.nodes ? o.nodes : 512);
        return gallery_log(o.m, nodes_or(o, 2049));
    }
    if (id == "b") {
        check_p(o.p);
        return gallery_power(o.p, o.m, nodes_or(o, 2049));
    }
    if (id == "c") return gallery_linear(1.0, 2.0, nodes_or(o, 33));
    if (id == "d") return gallery_arctan(nodes_or(o, 4001));
    fail(ErrorKind::InvalidInput, "--gallery must be one of a, b, c, d");
}

Report single_check(const std::string& command, const VerifierReport& v, const DiscreteField& u, std::ostream& out) {
    Report r(command);
    r.add_table(command, kCheckHeader, {check_row(v)});
    if (v.values.size() > 1) r.add_table(command + "_values", node_header(u), node_values(u, v));
    r.set("min", v.min);
    r.set("max", v.max);
    r.set("mean", v.mean);
    r.set("threshold", v.threshold);
    r.set("included", static_cast<double>(v.included));
    r.set("excluded", static_cast<double>(v.excluded));
    r.set_pass(v.pass);
    print_check(out, v);
    return r;
}

DiscreteField cutoff(const std::shared_ptr<const Grid1D>& g, const std::string& shape) {
    if (shape == "ramp")
        return DiscreteField::from_function(g, [](double t) { return std::clamp(std::min(t - 1.0, 10.0 - t), 0.0, 1.0); });
    if (shape == "smooth")
        return DiscreteField::from_function(g, [](double t) {
            const double x = std::clamp(std::min(t - 1.0, 10.0 - t), 0.0, 1.0);
            return x * x * (3.0 - 2.0 * x);
        });
    if (shape == "tent") return DiscreteField::from_function(g, [](double t) { return std::min(t - 1.0, 10.0 - t) / 4.5; });
    fail(ErrorKind::InvalidInput, "--cutoff must be ramp, smooth or tent");
}

KappaVariant kappa_variant_of(const std::string& s) {
    if (s == "combined") return KappaVariant::Combined;
    if (s == "refined") return KappaVariant::Refined;
    if (s == "weak") return KappaVariant::Weak;
    fail(ErrorKind::InvalidInput, "--kappa-variant must be combined, refined or weak");
}

Report cmd_verify(const Options& o, std::ostream& out) {
    const std::string& name = o.check;
    CheckOptions opt;
    if (name == "kato" || name == "strong" || name == "bochner" || name == "bochner-s") {
        const auto item = gallery_of(o);
        opt = item.checks;
        if (name == "bochner-s") opt.tol = 1e-8;
        if (!std::isnan(o.tol)) opt.tol = o.tol;
        if (name == "kato") {
            const auto v = kato_ratio(item.field, item.p, opt);
            out << "1 + kappa = " << fmt(1.0 + kappa(item.p, item.m, KappaVariant::Refined));
            if (item.expected_kato) out << ", exact ratio " << fmt(*item.expected_kato);
            out << '\n';
            return single_check("verify_kato", v, item.field, out);
        }
        if (name == "strong") return single_check("verify_strong", strong_form_residual(item.field, item.p, opt), item.field, out);
        const double eps = o.eps;
        if (name == "bochner") {
            if (!o.manifold.empty()) {
                // solver output instead of a gallery field
                check_p(o.p);
                const auto M = manifold_of(o);
                const auto [a, b] = interval_of(M, o);
                const auto g = grid_of(M, a, b, nodes_or(o, 1024), o.grid);
                const auto u = solve_dirichlet({o.p, eps}, g, BoundaryCondition::endpoints(*g, o.ua, o.ub)).first;
                return single_check("verify_bochner", bochner_residual(u, o.p, eps, opt), u, out);
            }
            return single_check("verify_bochner", bochner_residual(item.field, item.p, eps, opt), item.field, out);
        }
        return single_check("verify_bochner_s", bochner_s_residual(item.field, item.p, o.s, eps, opt), item.field, out);
    }
    if (name == "caccioppoli") {
        check_p(o.p);
        require(o.p != 3.0, ErrorKind::InvalidInput, "the radial test field needs p != 3 (m = 3)");
        const auto M = ModelManifold::radial_euclidean(3);
        const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, 1.0, 10.0, nodes_or(o, 1801)));
        const double alpha = (o.p - 3.0) / (o.p - 1.0);
        const double sign = alpha < 0 ? 1.0 : -1.0;
        // t^α is p-harmonic; for α > 0 use the positive shift c − t^α
        const double shift = alpha < 0 ? 0.0 : std::pow(10.0, alpha) + 1.0;
        const auto w = DiscreteField::from_function(g, [=](double t) { return shift + sign * std::pow(t, alpha); });
        const auto v = caccioppoli_check(w, cutoff(g, o.cutoff), o.p);
        auto r = single_check("verify_caccioppoli", v, w, out);
        r.set("cutoff", o.cutoff);
        r.set("margin", v.threshold - v.max);
        return r;
    }
    if (name == "weighted-caccioppoli") {
        check_p(o.p);
        const auto M = manifold_of(o);
        WeightedCaccioppoliInput in;
        in.p = o.p;
        in.eps = o.eps;
        in.kappa = std::isnan(o.kappa) ? kappa(o.p, M.dimension(), kappa_variant_of(o.kappa_variant)) : o.kappa;
        in.tau = o.tau;
        in.eps1 = o.eps1;
        in.eps2 = o.eps2;
        in.R = o.radius;
        in.center = o.center;
        const auto k = weighted_caccioppoli_constants(in);
        out << "B " << fmt(k.B) << " C " << fmt(k.C) << '\n';
        Report r("verify_weighted_caccioppoli");
        r.set("kappa", in.kappa);
        r.set("B", k.B);
        r.set("C", k.C);
        if (k.C <= 0.0) {
            // constants leave nothing to check: report the failure with the constants
            r.add_table("verify_weighted_caccioppoli", {"check", "B", "C", "status", "pass"},
                        {{"weighted_caccioppoli", fmt(k.B), fmt(k.C), "constants-infeasible", "false"}});
            r.set("status", std::string("constants-infeasible"));
            r.set_pass(false);
            out << "constants infeasible: C <= 0\n";
            return r;
        }
        const double lo = o.center - 2.0 * o.radius, hi = o.center + 2.0 * o.radius;
        const auto g = grid_of(M, lo, hi, nodes_or(o, 401), "uniform");
        const auto u = solve_dirichlet({o.p, std::max(o.eps, 1e-10)}, g, BoundaryCondition::endpoints(*g, o.ua, o.ub)).first;
        const auto v = weighted_caccioppoli_check(M, u, in);
        r.add_table("verify_weighted_caccioppoli", kCheckHeader, {check_row(v)});
        r.set("lhs", v.max);
        r.set("rhs", v.threshold);
        r.set("margin", v.threshold - v.max);
        r.set_pass(v.pass);
        print_check(out, v);
        return r;
    }
    if (name == "monotonicity") {
        const auto ps = o.p_list.empty() ? std::vector<double>{1.5, 2.0, 3.0, 4.0} : o.p_list;
        const std::size_t n = o.samples ? o.samples : 10000;
        Report r("verify_monotonicity");
        Rows rows;
        for (double p : ps) {
            check_p(p);
            const auto s = monotonicity_suite(p, n, o.seed, o.dim);
            r.set_pass(s.pass);
            out << "p " << fmt(p) << ": C_emp " << fmt(s.C_emp) << " negative " << s.negative_lhs << " fresh violations "
                << s.fresh_violations << (s.pass ? " pass" : " FAIL") << '\n';
            rows.push_back(monotonicity_row(s));
        }
        r.add_table("verify_monotonicity", kMonotonicityHeader, std::move(rows));
        r.set("seed", static_cast<double>(o.seed));
        return r;
    }
    if (name == "regularization") {
        const std::size_t n = o.samples ? o.samples : 10000;
        Report r("verify_regularization");
        Rows rows;
        for (auto [lo, hi] : {std::pair{1.0, 2.0}, std::pair{2.0, 4.0}, std::pair{4.0, 6.0}}) {
            const auto s = regularization_suite(lo, hi, n, o.seed);
            r.set_pass(s.pass);
            out << "p in (" << fmt(lo) << ", " << fmt(hi) << "]: violations " << s.violations << " min margin "
                << fmt(s.min_margin) << '\n';
            rows.push_back(regularization_row(s));
        }
        r.add_table("verify_regularization", kRegularizationHeader, std::move(rows));
        r.set("seed", static_cast<double>(o.seed));
        return r;
    }
    fail(ErrorKind::InvalidInput, "unknown check " + name);
}

Report cmd_gallery(const Options&, std::ostream& out) {
    Report r("gallery");
    Rows rows;
    for (const auto& item : example_gallery()) {
        auto row = gallery_row(item);
        r.set_pass(row.pass);
        out << item.id << " " << item.description << ": " << (row.pass ? "pass" : "FAIL") << '\n';
        rows.push_back(std::move(row.cells));
    }
    r.add_table("gallery", kGalleryHeader, std::move(rows));
    return r;
}

// The fixed battery behind `plap report`: small enough to run in seconds,
// seeded, and written as one set of files.
Report cmd_report(const Options& o, std::ostream& out) {
    Report r("report");
    const std::size_t n = o.samples ? o.samples : 2000;
    auto note = [&](const std::string& what, bool pass) {
        r.set(what, pass);
        r.set_pass(pass);
        out << what << ": " << (pass ? "pass" : "FAIL") << '\n';
    };

    {
        const auto E = ModelManifold::radial_euclidean(3);
        const auto Q = ModelManifold::warped_product(3, WarpFunction(PolyEvenWarp{2.0}));
        Rows rows;
        bool ok = true;
        for (const auto& [name, M, a, b, p] :
             {std::tuple{std::string("euclidean m=3"), E, 1.0, 2.0, 2.0}, std::tuple{std::string("A=(1+t^2)^2"), Q, -1.0, 1.0, 3.0}}) {
            const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, a, b, 2048));
            const double an = capacity_analytic(M, p, a, b).value;
            const double num = capacity_numeric(g, p, Condenser::interval(*g)).value;
            const double rel = std::abs(num - an) / an;
            ok = ok && rel <= 5e-3;
            rows.push_back({name, fmt(a), fmt(b), fmt(p), fmt(an), fmt(num), fmt(rel)});
        }
        r.add_table("capacity", {"manifold", "a", "b", "p", "analytic", "numeric", "rel_err"}, std::move(rows));
        note("capacity", ok);
    }
    {
        const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(ModelManifold::radial_euclidean(3), 1.0, 2.0, 257));
        const auto bc = BoundaryCondition::endpoints(*g, 1.0, 0.0);
        SolveConfig rc;
        rc.eps_schedule = {1e-14};
        const auto ref = solve_dirichlet({3.0, 1e-14}, g, bc, rc).first;
        const auto rep = epsilon_continuation(3.0, g, bc, {}, &ref).second;
        Rows rows;
        bool ok = rep.distances_monotone;
        for (const auto& s : rep.steps) {
            ok = ok && s.sandwich && s.sandwich->ok();
            rows.push_back({fmt(s.eps), fmt(s.energy_p), fmt(s.energy_eps), fmt(s.dist_to_final)});
        }
        r.add_table("continuation", {"eps", "E_p", "E_p_eps", "w1p_dist_to_final"}, std::move(rows));
        note("continuation", ok);
    }
    {
        Rows rows;
        bool ok = true;
        for (const auto& item : example_gallery()) {
            auto row = gallery_row(item);
            ok = ok && row.pass;
            rows.push_back(std::move(row.cells));
        }
        r.add_table("gallery", kGalleryHeader, std::move(rows));
        note("gallery", ok);
    }
    {
        Rows rows;
        bool ok = true;
        for (double p : {1.5, 2.0, 3.0, 4.0}) {
            const auto s = monotonicity_suite(p, n, o.seed);
            ok = ok && s.pass;
            rows.push_back(monotonicity_row(s));
        }
        r.add_table("monotonicity", kMonotonicityHeader, std::move(rows));
        note("monotonicity", ok);
    }
    {
        Rows rows;
        bool ok = true;
        for (auto [lo, hi] : {std::pair{1.0, 2.0}, std::pair{2.0, 4.0}, std::pair{4.0, 6.0}}) {
            const auto s = regularization_suite(lo, hi, n, o.seed);
            ok = ok && s.pass;
            rows.push_back(regularization_row(s));
        }
        r.add_table("regularization", kRegularizationHeader, std::move(rows));
        note("regularization", ok);
    }
    {
        Rows rows;
        bool ok = true;
        for (int m : {2, 3, 4}) {
            const auto M = ModelManifold::radial_euclidean(m);
            std::set<double> ps{1.5, 2.0, 3.0, 4.0, static_cast<double>(m)};
            for (double p : ps) {
                auto row = classify_row("euclidean m=" + std::to_string(m), M, p, EndDirection::Plus, 1.0, default_R(M));
                ok = ok && row.agree;
                rows.push_back(std::move(row.cells));
            }
        }
        r.add_table("classify", kClassifyHeader, std::move(rows));
        note("classify", ok);
    }
    {
        const auto M = ModelManifold::warped_product(2, WarpFunction(ExponentialWarp{1.0}));
        const double lambda_p = p_poincare_bound(0.25, 2.0);
        const std::vector<double> R{2, 3, 4, 5, 6, 7, 8, 9, 10};
        const auto g = std::make_shared<const Grid1D>(Grid1D::uniform(M, 0.0, 40.0, 8001));
        const auto prof = tail_energy_profile(M, 2.0, barrier_limit(M, 2.0, g), R, lambda_p);
        r.add_table("decay", kBoundHeader, bound_rows(prof.rows));
        note("decay", prof.pass);
        const auto v = volume_growth_check(M, 2.0, lambda_p, R);
        r.add_table("volume", {"R", "volume", "bound", "pass"}, bound_rows(v.rows));
        note("volume", v.pass);
    }
    r.set("seed", static_cast<double>(o.seed));
    r.set("samples", static_cast<double>(n));
    return r;
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonConvergence: return kNonConvergence;
        case ErrorKind::InternalInconsistency: return kCheckFailed;
        default: return kInvalidInput;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"p-Laplace energies, capacities and verifier suites on model manifolds", "plap"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", o.out, "output directory (default $PLAP_OUT_DIR or ./plap-out)");

    const auto manifold = [&](CLI::App* c, bool required) {
        auto* opt = c->add_option("--manifold", o.manifold, "manifold file (key = value)");
        if (required) opt->required();
    };
    const auto interval = [&](CLI::App* c) {
        c->add_option("--a", o.a, "left end (default: domain)");
        c->add_option("--b", o.b, "right end (default: domain)");
        c->add_option("--nodes", o.nodes, "grid nodes");
        c->add_option("--grid", o.grid, "uniform, sinh or geometric");
    };
    const auto dirichlet = [&](CLI::App* c) {
        c->add_option("--ua", o.ua, "value at a");
        c->add_option("--ub", o.ub, "value at b");
    };
    const auto lambdas = [&](CLI::App* c) {
        c->add_option("--lambda2", o.lambda2, "bottom of the spectrum; lambda_p from (2 sqrt(lambda2)/p)^p");
        c->add_option("--lambda-p", o.lambda_p, "lambda_p directly");
    };
    const auto radii = [&](CLI::App* c) {
        c->add_option("--R", o.R, "radii")->delimiter(',');
        c->add_option("--R0", o.R0, "inner radius");
    };

    auto* solve = app.add_subcommand("solve", "minimize E_{p,eps} with Dirichlet data");
    manifold(solve, true);
    interval(solve);
    dirichlet(solve);
    solve->add_option("--p", o.p)->required();
    solve->add_option("--eps", o.eps, "regularization");
    solve->add_option("--q", o.q, "also report the q-energy");
    solve->add_option("--max-newton", o.max_newton, "Newton iteration limit per eps");

    auto* cont = app.add_subcommand("continuation", "eps_k = eps0 2^-k with warm starts");
    manifold(cont, true);
    interval(cont);
    dirichlet(cont);
    cont->add_option("--p", o.p)->required();
    cont->add_option("--steps", o.steps, "schedule length");
    cont->add_option("--eps0", o.eps0, "first eps");
    cont->add_option("--reference-eps", o.ref_eps, "reference solve eps (0 disables)");
    cont->add_option("--max-newton", o.max_newton, "Newton iteration limit per eps");

    auto* cap = app.add_subcommand("capacity", "analytic and numeric condenser capacity of [a, b]");
    manifold(cap, true);
    interval(cap);
    cap->add_option("--p", o.p)->required();
    cap->add_option("--tol", o.tol, "relative agreement required (default 1e-2)");

    auto* cls = app.add_subcommand("classify", "integral test and barrier sweep for each infinite end");
    manifold(cls, true);
    radii(cls);
    cls->add_option("--p", o.p_list, "one or more p")->delimiter(',');

    auto* bar = app.add_subcommand("barrier", "two-end barrier Phi(t)/Phi(+inf)");
    manifold(bar, true);
    bar->add_option("--p", o.p)->required();
    bar->add_option("--nodes", o.nodes);
    bar->add_option("--grid", o.grid, "sinh (default) or uniform");
    bar->add_option("--extent", o.extent, "half-width on infinite ends");

    auto* dec = app.add_subcommand("decay", "tail energy of the barrier limit against the decay bound");
    manifold(dec, true);
    radii(dec);
    lambdas(dec);
    dec->add_option("--p", o.p)->required();
    dec->add_option("--T", o.T, "far end of the grid");
    dec->add_option("--nodes", o.nodes);
    dec->add_option("--grid", o.grid);

    auto* vol = app.add_subcommand("volume", "volume growth against the spectral bound");
    manifold(vol, true);
    radii(vol);
    lambdas(vol);
    vol->add_option("--p", o.p)->required();

    auto* ver = app.add_subcommand("verify", "run one verifier");
    ver->add_option("name", o.check,
                    "kato, strong, bochner, bochner-s, caccioppoli, weighted-caccioppoli, monotonicity, regularization")
        ->required();
    manifold(ver, false);
    interval(ver);
    dirichlet(ver);
    ver->add_option("--gallery", o.gallery, "a, b, c or d");
    ver->add_option("--p", o.p_list, "p (several for monotonicity)")->delimiter(',');
    ver->add_option("--m", o.m, "dimension of the gallery field");
    ver->add_option("--eps", o.eps, "regularization");
    ver->add_option("--s", o.s, "exponent of the L_{s,eps} identity");
    ver->add_option("--tol", o.tol);
    ver->add_option("--cutoff", o.cutoff, "ramp, smooth or tent");
    ver->add_option("--kappa-variant", o.kappa_variant, "combined, refined or weak");
    ver->add_option("--kappa", o.kappa, "kappa value (overrides the variant)");
    ver->add_option("--tau", o.tau);
    ver->add_option("--eps1", o.eps1);
    ver->add_option("--eps2", o.eps2);
    ver->add_option("--radius", o.radius);
    ver->add_option("--center", o.center);
    ver->add_option("--samples", o.samples);
    ver->add_option("--seed", o.seed);
    ver->add_option("--dim", o.dim);

    auto* gal = app.add_subcommand("gallery", "Kato ratios and energies of the exact-solution gallery");
    auto* rep = app.add_subcommand("report", "fixed seeded battery of checks");
    rep->add_option("--seed", o.seed);
    rep->add_option("--samples", o.samples, "samples per vector-inequality branch");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "plap: " << e.what() << "\n\n" << app.help();
        return kInvalidInput;
    }

    const auto* sub = app.get_subcommands().front();
    // verify takes --p as a list; the single-p checks read its first entry
    if (sub == ver && !o.p_list.empty()) o.p = o.p_list.front();
    if (sub == ver && o.check == "weighted-caccioppoli" && !ver->count("--eps")) o.eps = 1e-3;
    // exact gallery fields solve the ε = 0 equation; solver output uses its own ε
    if (sub == ver && (o.check == "bochner" || o.check == "bochner-s") && !ver->count("--eps"))
        o.eps = o.manifold.empty() ? 1e-10 : 1e-2;

    try {
        Report r("");
        if (sub == solve)
            r = cmd_solve(o, out);
        else if (sub == cont)
            r = cmd_continuation(o, out);
        else if (sub == cap)
            r = cmd_capacity(o, out);
        else if (sub == cls)
            r = cmd_classify(o, out);
        else if (sub == bar)
            r = cmd_barrier(o, out);
        else if (sub == dec)
            r = cmd_decay(o, out);
        else if (sub == vol)
            r = cmd_volume(o, out);
        else if (sub == ver)
            r = cmd_verify(o, out);
        else if (sub == gal)
            r = cmd_gallery(o, out);
        else
            r = cmd_report(o, out);
        const auto dir = o.out.empty() ? default_output_dir() : std::filesystem::path(o.out);
        r.write(dir);
        out << "wrote " << dir.string() << '\n';
        return r.pass() ? kOk : kCheckFailed;
    } catch (const Error& e) {
        err << "plap: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "plap: " << e.what() << '\n';
        return kInvalidInput;
    }
}

}  // namespace plap::cli
