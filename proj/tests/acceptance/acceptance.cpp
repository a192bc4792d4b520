#include "cohom/catalog.hpp"
#include "cohom/classify.hpp"
#include "cohom/dynamics.hpp"
#include "support/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

using namespace cohom;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool contains(const std::vector<ParamSet>& v, const ParamSet& p) {
    for (const auto& q : v)
        if (sign_equivalent(p, q)) return true;
    return false;
}

Outcome classification() {
    auto start = std::chrono::steady_clock::now();
    ClassificationResult r = classify(3);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool families = r.ricci_flat_families.size() == 3 && r.einstein_families.size() == 1 &&
                    contains(r.ricci_flat_families, make_params(1, 0, 0, 0, -1, 2)) &&
                    contains(r.ricci_flat_families, make_params(1, 0, -2, 0, -1, 0)) &&
                    contains(r.ricci_flat_families, make_params(1, 0, 0, 0, -1, -2)) &&
                    contains(r.einstein_families, make_params(2, 0, -1, 0, 1, 0));
    bool sweep = r.sweep.points == 117648 && r.sweep.unexpected_ricci_flat.empty() && r.sweep.unexpected_einstein.empty();
    return {families && sweep && r.complete() && seconds <= 60,
            fmt("%zu Ricci-flat, %zu Einstein, sweep %lld points with %zu+%zu unexpected, complete=%d, %.2f s",
                r.ricci_flat_families.size(), r.einstein_families.size(), static_cast<long long>(r.sweep.points),
                r.sweep.unexpected_ricci_flat.size(), r.sweep.unexpected_einstein.size(), r.complete() ? 1 : 0,
                seconds)};
}

Outcome closed_forms() {
    bool pass = true;
    std::string detail;
    for (auto [name, param] : std::vector<std::pair<std::string, double>>{
             {"taub-nut", 1}, {"eguchi-hanson", 1}, {"fubini-study", 1}, {"fubini-study-hyperbolic", 1}, {"case3", 1}}) {
        ClosedForm f = make_form(name, param);
        double ode = 0, ricci = 0;
        for (double x : sample_coords(f, 100)) {
            VerifyRow row = verify_point(f, x);
            ode = std::max({ode, std::abs(row.residual1), std::abs(row.residual2)});
            ricci = std::max(ricci, row.ricci_residual);
        }
        pass = pass && ode <= 1e-12 && ricci <= 1e-9;
        detail += fmt("%s ode %.1e ricci %.1e; ", name.c_str(), ode, ricci);
    }
    return {pass, detail};
}

Outcome einstein_trajectory() {
    bool pass = true;
    std::string detail;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const double t0 = 0.1 / alpha;
        JetPoint j = to_arclength_jet(FubiniStudy{alpha}, t0);
        Trajectory traj = integrate(make_params(2, 0, -1, 0, 1, 0), {t0, j.a1, j.a2}, 1.5 / alpha, 1e-12);
        const double lambda = 12 * alpha * alpha;
        double worst = 0;
        for (const auto& r : ricci_along(traj)) worst = std::max(worst, std::abs(r.ric00 - lambda) / lambda);
        pass = pass && traj.reason == Termination::reached_t_end && worst <= 1e-8;
        detail += fmt("alpha=%g max rel err %.1e; ", alpha, worst);
    }
    return {pass, detail};
}

Outcome case3_against_closed_form() {
    const double rho0 = 0.5, lo = 0.005, hi = 0.5;
    JetPoint j = to_arclength_jet(Case3{1}, rho0);
    const double t_start = case3_t_of_rho(1, rho0);
    Trajectory traj = integrate(make_params(-1, 0, 0, 0, 1, 2), {t_start, j.a1, j.a2}, case3_t_of_rho(1, 0.8 * lo), 1e-13);
    double worst = 0;
    int points = 0;
    for (const auto& s : traj.samples) {
        const double rho = case3_rho_of_t(1, s.t);
        if (rho < lo || rho > hi) continue;
        NativeJet e = evaluate(Case3{1}, rho);
        worst = std::max({worst, std::abs(s.a1 - e.a1) / e.a1, std::abs(s.a2 - e.a2) / e.a2});
        ++points;
    }
    for (int i = 0; i <= 200; ++i) {
        const double rho = lo * std::pow(hi / lo, i / 200.0);
        State s = traj.at(case3_t_of_rho(1, rho));
        NativeJet e = evaluate(Case3{1}, rho);
        worst = std::max({worst, std::abs(s.a1 - e.a1) / e.a1, std::abs(s.a2 - e.a2) / e.a2});
        ++points;
    }
    return {traj.reason == Termination::reached_t_end && worst <= 1e-8,
            fmt("rho in [%g, %g], %d comparisons, sup rel err %.2e", lo, hi, points, worst)};
}

Outcome singular_asymptotics() {
    Trajectory traj = integrate(make_params(1, 0, 0, 0, -1, -2), {0, 2, 2.0 / 3}, 10, 1e-12);
    SingularEvent ev = detect_singularity(traj);
    auto report = [&](FitWindow w) {
        AsymptoticFit a2 = fit_power_law(traj, Component::a2, ev.t0_estimate, w);
        AsymptoticFit a1 = fit_power_law(traj, Component::a1, ev.t0_estimate, w);
        const double ratio = a1.coefficient / (a2.coefficient * a2.coefficient / 3);
        return std::tuple{a2, a1, ratio};
    };
    auto [a2, a1, ratio] = report(FitWindow{1e-10, 1e-6});
    auto [d2, d1, dratio] = report(FitWindow{});
    bool pass = std::abs(a2.exponent - 1.0 / 3) <= 0.02 && std::abs(a1.exponent + 1.0 / 3) <= 0.02 &&
                std::abs(ratio - 1) <= 0.05;
    return {pass, fmt("t0=%.15g; window [1e-10,1e-6]: A2 exp %.5f, A1 exp %.5f, coeff ratio %.4f; "
                      "window [1e-6,1e-2]: A2 exp %.5f, A1 exp %.5f, coeff ratio %.4f",
                      ev.t0_estimate, a2.exponent, a1.exponent, ratio, d2.exponent, d1.exponent, dratio)};
}

Outcome infinity_asymptotics() {
    Trajectory traj = integrate(make_params(-1, 0, 0, 0, 1, 2), {case3_t_of_rho(1, 0.5), 2, 2.0 / 3}, 1e6, 1e-12);
    if (traj.reason != Termination::reached_t_end) return {false, std::string("run stopped: ") + to_string(traj.reason)};
    State s = traj.at(1e4);
    const double a1_over_t = s.a1 / 1e4, a2_over_2t = s.a2 / 2e4;
    InfinityFit fit = fit_infinity_model(traj);
    const double tl = traj.t_last();
    const double scaled = model_B_residual(fit.alpha, fit.beta, tl) * tl * tl / std::log(tl);
    const double target = -fit.beta * fit.beta;
    const double rel = std::abs(scaled - target) / std::abs(target);
    bool pass = a1_over_t <= 1e-3 && std::abs(a2_over_2t - 1) <= 1e-2 && rel <= 0.02;
    return {pass, fmt("A1/t=%.2e, A2/(2t)=%.5f at t=1e4; alpha=%.4f beta=%.5f on [%g, %g]; A1 tail mean %.4f vs "
                      "2 beta %.4f; scaled B residual %.5f vs -beta^2 %.5f (rel %.2e)",
                      a1_over_t, a2_over_2t, fit.alpha, fit.beta, fit.t_lo, fit.t_hi, fit.a1_tail_mean,
                      2 * fit.beta, scaled, target, rel)};
}

Outcome model_c_identity() {
    const double exact = -8.0 / 25;
    int exact_hits = 0;
    double worst_fd = 0;
    for (int i = 0; i < 100; ++i) {
        const double gamma = support::uniform(0.1, 5), t0 = support::uniform(-3, 3), t = t0 + support::uniform(0.1, 3);
        if (model_C_residual(gamma, t0, t) == exact) ++exact_hits;
        worst_fd = std::max(worst_fd, std::abs(model_C_residual(gamma, t0, t, ResidualPath::finite_difference) - exact));
    }
    return {exact_hits == 100 && worst_fd <= 1e-6,
            fmt("closed form exact in %d/100, max finite-difference error %.2e", exact_hits, worst_fd)};
}

Outcome oracle_equivalence() {
    double symbolic = 0, contraction = 0;
    for (int i = 0; i < 1000; ++i) {
        ParamSet p = support::random_params();
        SymbolicRicci<Rational> s = symbolic_ricci(p);
        const double a1 = support::uniform(0.1, 10), a2 = support::uniform(0.1, 10), x = a1 / a2;
        RicciValues r = ricci_from_jet(analytic_jet(NumericParams::from(p), a1, a2));
        const double inv = 1 / (a2 * a2);
        symbolic = std::max({symbolic, support::rel_err(r.ric00, eval_at(s.l00, x) * inv),
                             support::rel_err(r.ric11, eval_at(s.l11, x) * inv),
                             support::rel_err(r.ric22, eval_at(s.l22, x) * inv)});
    }
    for (int i = 0; i < 1000; ++i) {
        JetPoint j = support::random_jet();
        RicciValues a = ricci_from_curvature(j), b = ricci_from_jet(j);
        contraction = std::max({contraction, support::rel_err(a.ric00, b.ric00), support::rel_err(a.ric11, b.ric11),
                                support::rel_err(a.ric22, b.ric22)});
    }
    return {symbolic <= 1e-10 && contraction <= 1e-12,
            fmt("symbolic vs frame %.1e, curvature vs jet %.1e", symbolic, contraction)};
}

Outcome integrator_order() {
    const ParamSet p = make_params(1, 0, 0, 0, -1, 2);
    JetPoint j = to_arclength_jet(TaubNUT{1}, 1.5);
    const double t = arclength(TaubNUT{1}, 1.5);
    double previous = 0, worst_ratio = INFINITY, best_ratio = 0;
    int halvings = 0;
    for (double tol = 1e-6; tol >= 1e-13; tol /= 2) {
        Trajectory traj = integrate(p, {t, j.a1, j.a2}, t + 20, tol);
        const auto& s = traj.samples.back();
        NativeJet e = evaluate(TaubNUT{1}, coordinate_of_arclength(TaubNUT{1}, s.t));
        const double err = std::max(std::abs(s.a1 - e.a1) / e.a1, std::abs(s.a2 - e.a2) / e.a2);
        if (previous > 0 && err > 1e-13) {
            worst_ratio = std::min(worst_ratio, previous / err);
            best_ratio = std::max(best_ratio, previous / err);
            ++halvings;
        }
        if (err <= 1e-13) break;
        previous = err;
    }
    return {worst_ratio >= 4,
            fmt("%d halvings above the 1e-13 floor, error ratio per halving in [%.2f, %.2f]", halvings, worst_ratio,
                best_ratio)};
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 2;
        }
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"classification reproduction", classification},
        {"closed-form verification", closed_forms},
        {"Einstein constant", einstein_trajectory},
        {"case-3 closed form vs integration", case3_against_closed_form},
        {"singular asymptotics", singular_asymptotics},
        {"infinity asymptotics", infinity_asymptotics},
        {"exact identity", model_c_identity},
        {"oracle equivalence", oracle_equivalence},
        {"integrator order", integrator_order},
    };
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        if (!o.pass) ++failures;
    }
    return failures ? 1 : 0;
}
