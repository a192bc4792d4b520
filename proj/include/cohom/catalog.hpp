#pragma once

#include "cohom/errors.hpp"
#include "cohom/family.hpp"
#include "cohom/frame.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace cohom {

struct TaubNUT { double m = 1; };
struct EguchiHanson { double a = 1; };
struct FubiniStudy { double alpha = 1; };
struct FubiniStudyHyperbolic { double alpha = 1; };
struct Case3 { double c = 1; };
struct FlatCone {};

using ClosedForm = std::variant<TaubNUT, EguchiHanson, FubiniStudy, FubiniStudyHyperbolic, Case3, FlatCone>;

inline const std::vector<std::string>& form_names() {
    static const std::vector<std::string> names{"taub-nut", "eguchi-hanson", "fubini-study",
                                                "fubini-study-hyperbolic", "case3", "flat-cone"};
    return names;
}

inline std::string form_name(const ClosedForm& f) { return form_names()[f.index()]; }

/// Name of the native coordinate: r, t or rho.
inline std::string coordinate_name(const ClosedForm& f) {
    switch (f.index()) {
    case 0:
    case 1: return "r";
    case 4: return "rho";
    default: return "t";
    }
}

inline double form_parameter(const ClosedForm& f) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TaubNUT>) return v.m;
            else if constexpr (std::is_same_v<T, EguchiHanson>) return v.a;
            else if constexpr (std::is_same_v<T, Case3>) return v.c;
            else if constexpr (std::is_same_v<T, FlatCone>) return 0.0;
            else return v.alpha;
        },
        f);
}

inline ClosedForm make_form(const std::string& name, double param = 1.0) {
    if (name != "flat-cone" && !(param > 0 && std::isfinite(param)))
        throw InvalidArgument("form parameter must be a positive finite real (got " + std::to_string(param) + ")");
    if (name == "taub-nut") return TaubNUT{param};
    if (name == "eguchi-hanson") return EguchiHanson{param};
    if (name == "fubini-study") return FubiniStudy{param};
    if (name == "fubini-study-hyperbolic") return FubiniStudyHyperbolic{param};
    if (name == "case3") return Case3{param};
    if (name == "flat-cone") return FlatCone{};
    throw InvalidArgument("unknown form '" + name + "'");
}

/// Open coordinate interval (lo, hi).
struct Domain {
    double lo, hi;

    bool contains(double x) const { return x > lo && x < hi; }
};

inline Domain domain(const ClosedForm& f) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (f.index()) {
    case 0: return {std::get<TaubNUT>(f).m, inf};
    case 1: return {std::get<EguchiHanson>(f).a, inf};
    // A1 = sin(2 alpha t)/(2 alpha) stays positive only up to pi/(2 alpha).
    case 2: return {0.0, std::numbers::pi / (2 * std::get<FubiniStudy>(f).alpha)};
    case 4: return {0.0, std::get<Case3>(f).c};
    default: return {0.0, inf};
    }
}

/// Values and native-coordinate derivatives at one point, with the
/// arclength factor phi = dt/d(coord) and its derivative.
struct NativeJet {
    double coord = 0;
    double a1 = 0, a1_d = 0, a1_dd = 0;
    double a2 = 0, a2_d = 0, a2_dd = 0;
    double phi = 1, phi_d = 0;
};

inline void require_in_domain(const ClosedForm& f, double coord) {
    Domain d = domain(f);
    if (!d.contains(coord))
        throw DomainError(form_name(f) + ": coordinate " + std::to_string(coord) + " outside (" +
                          std::to_string(d.lo) + ", " + std::to_string(d.hi) + ")");
}

inline NativeJet evaluate(const ClosedForm& f, double x) {
    require_in_domain(f, x);
    NativeJet j;
    j.coord = x;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TaubNUT>) {
                const double m = v.m, rm = x - m, rp = x + m, s = std::sqrt(rm * rp);
                j.a1 = m * std::sqrt(rm / rp);
                j.a1_d = m * m / (std::sqrt(rm) * rp * std::sqrt(rp));
                j.a1_dd = -j.a1_d * (2 * x - m) / (rm * rp);
                j.a2 = s / 2;
                j.a2_d = x / (2 * s);
                j.a2_dd = -m * m / (2 * s * s * s);
                j.phi = 0.25 * std::sqrt(rp / rm);
                j.phi_d = -j.phi * m / (rm * rp);
            } else if constexpr (std::is_same_v<T, EguchiHanson>) {
                const double a4 = std::pow(v.a, 4), r3 = x * x * x, r4 = r3 * x, u = r4 - a4, su = std::sqrt(u);
                j.a1 = su / x;
                j.a1_d = (r4 + a4) / (x * x * su);
                j.a1_dd = j.a1_d * (4 * r3 / (r4 + a4) - 2 / x - 2 * r3 / u);
                j.a2 = x;
                j.a2_d = 1;
                j.a2_dd = 0;
                j.phi = x * x / su;
                j.phi_d = -2 * x * a4 / (u * su);
            } else if constexpr (std::is_same_v<T, FubiniStudy>) {
                const double al = v.alpha, s2 = std::sin(2 * al * x), s1 = std::sin(al * x);
                j.a1 = s2 / (2 * al);
                j.a1_d = std::cos(2 * al * x);
                j.a1_dd = -2 * al * s2;
                j.a2 = s1 / al;
                j.a2_d = std::cos(al * x);
                j.a2_dd = -al * s1;
            } else if constexpr (std::is_same_v<T, FubiniStudyHyperbolic>) {
                const double al = v.alpha, s2 = std::sinh(2 * al * x), s1 = std::sinh(al * x);
                j.a1 = s2 / (2 * al);
                j.a1_d = std::cosh(2 * al * x);
                j.a1_dd = 2 * al * s2;
                j.a2 = s1 / al;
                j.a2_d = std::cosh(al * x);
                j.a2_dd = al * s1;
            } else if constexpr (std::is_same_v<T, Case3>) {
                const double c2 = v.c * v.c, x2 = x * x, w = c2 - x2;
                j.a1 = 1 / x;
                j.a1_d = -1 / x2;
                j.a1_dd = 2 / (x2 * x);
                j.a2 = x / w;
                j.a2_d = (c2 + x2) / (w * w);
                j.a2_dd = 2 * x * (3 * c2 + x2) / (w * w * w);
                j.phi = x2 / (w * w);
                j.phi_d = 2 * x * (c2 + x2) / (w * w * w);
            } else {
                j.a1 = j.a2 = x;
                j.a1_d = j.a2_d = 1;
            }
        },
        f);
    return j;
}

/// Chain rule d/dt = phi^-1 d/d(coord), applied twice.
inline JetPoint to_arclength_jet(const NativeJet& n) {
    const double p2 = n.phi * n.phi, q = n.phi_d / n.phi;
    return {n.a1, n.a1_d / n.phi, (n.a1_dd - n.a1_d * q) / p2, n.a2, n.a2_d / n.phi, (n.a2_dd - n.a2_d * q) / p2};
}

inline JetPoint to_arclength_jet(const ClosedForm& f, double coord) { return to_arclength_jet(evaluate(f, coord)); }

/// (A1' - rhs1, A2' - rhs2) from the arclength jet.
inline std::pair<double, double> ode_residual(const ClosedForm& f, const ParamSet& params, double coord) {
    JetPoint j = to_arclength_jet(f, coord);
    auto [r1, r2] = rhs(params, j.a1, j.a2);
    return {j.a1p - r1, j.a2p - r2};
}

/// Member of the family that the form solves in its native orientation.
inline ParamSet matching_params(const ClosedForm& f) {
    switch (f.index()) {
    case 1: return make_params(-1, 0, 2, 0, 1, 0);
    case 2:
    case 3: return make_params(2, 0, -1, 0, 1, 0);
    case 4: return make_params(-1, 0, 0, 0, 1, 2);
    default: return make_params(1, 0, 0, 0, -1, 2);
    }
}

/// Expected Ric00 (all Ricci components agree): 12 alpha^2 for the
/// spherical form, -12 alpha^2 for the hyperbolic one, 0 otherwise.
inline double einstein_constant(const ClosedForm& f) {
    if (auto* s = std::get_if<FubiniStudy>(&f)) return 12 * s->alpha * s->alpha;
    if (auto* h = std::get_if<FubiniStudyHyperbolic>(&f)) return -12 * h->alpha * h->alpha;
    return 0.0;
}

/// t(rho) = (1/4)(2 rho/(c^2 - rho^2) - (1/c) ln|(rho + c)/(rho - c)|), with t(0) = 0.
inline double case3_t_of_rho(double c, double rho) {
    if (!(c > 0)) throw InvalidArgument("case3_t_of_rho: c must be positive");
    if (!(rho > 0 && rho < c)) throw DomainError("case3_t_of_rho: rho must lie in (0, c)");
    const double u = rho / c;
    if (u < 0.25) {
        // (1/(2c)) sum_{n>=1} 2n/(2n+1) u^(2n+1), free of the cancellation near 0
        double sum = 0, power = u * u * u, u2 = u * u;
        for (int n = 1; n < 60; ++n) {
            double term = (2.0 * n / (2.0 * n + 1)) * power;
            sum += term;
            if (term < 1e-18 * sum) break;
            power *= u2;
        }
        return sum / (2 * c);
    }
    return 0.25 * (2 * rho / (c * c - rho * rho) - std::log((c + rho) / (c - rho)) / c);
}

inline double case3_dt_drho(double c, double rho) {
    const double w = c * c - rho * rho;
    return rho * rho / (w * w);
}

/// Coefficients of d rho^2, (e1)^2 and (e2)^2 + (e3)^2.
struct Case3MetricCoeffs {
    double g_rhorho, g11, g22;
};

inline Case3MetricCoeffs case3_metric_coeffs(double c, double rho) {
    if (!(c > 0)) throw InvalidArgument("case3_metric_coeffs: c must be positive");
    if (!(rho > 0 && rho < c)) throw DomainError("case3_metric_coeffs: rho must lie in (0, c)");
    const double w = c * c - rho * rho;
    return {std::pow(rho, 4) / std::pow(w, 4), 1 / (rho * rho), rho * rho / (w * w)};
}

/// Arclength t(coord) measured from the lower end of the native domain.
inline double arclength(const ClosedForm& f, double coord) {
    require_in_domain(f, coord);
    switch (f.index()) {
    case 0: {
        const double m = std::get<TaubNUT>(f).m;
        return 0.25 * (std::sqrt(coord * coord - m * m) + m * std::acosh(coord / m));
    }
    case 1: {
        const double a = std::get<EguchiHanson>(f).a;
        // r = a + s^2 turns r^2/sqrt(r^4 - a^4) dr into a smooth integrand.
        auto integrand = [&](double s) {
            const double r = a + s * s;
            return 2 * r * r / std::sqrt((r + a) * (r * r + a * a));
        };
        boost::math::quadrature::tanh_sinh<double> q;
        return q.integrate(integrand, 0.0, std::sqrt(coord - a));
    }
    case 4: return case3_t_of_rho(std::get<Case3>(f).c, coord);
    default: return coord;
    }
}

/// Inverse of arclength by safeguarded Newton iteration (dt/dcoord = phi > 0).
inline double coordinate_of_arclength(const ClosedForm& f, double t) {
    switch (f.index()) {
    case 2:
    case 3:
    case 5: require_in_domain(f, t); return t;
    default: break;
    }
    if (!(t > 0)) throw DomainError(form_name(f) + ": arclength must be positive");
    Domain d = domain(f);
    double lo = d.lo, hi = d.hi;
    if (!std::isfinite(hi)) {
        hi = d.lo + 1;
        while (arclength(f, hi) < t) hi = d.lo + 2 * (hi - d.lo);
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double g = arclength(f, x) - t;
        if (g == 0) return x;
        if (g < 0) lo = x;
        else hi = x;
        double step = g / evaluate(f, x).phi;
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(x)) return next;
        x = next;
    }
    return x;
}

inline double case3_rho_of_t(double c, double t) { return coordinate_of_arclength(Case3{c}, t); }

/// Interior sample window [lo, hi] of the native coordinate used for
/// verification sweeps (kept away from the domain ends, where the metric
/// coefficients degenerate).
inline std::pair<double, double> sample_window(const ClosedForm& f) {
    const double p = form_parameter(f);
    switch (f.index()) {
    case 0:
    case 1: return {1.05 * p, 50 * p};
    case 2: return {0.05 * std::numbers::pi / (2 * p), 0.95 * std::numbers::pi / (2 * p)};
    case 3: return {0.05 / p, 2.0 / p};
    case 4: return {0.2 * p, 0.9 * p};
    default: return {0.1, 10.0};
    }
}

/// n coordinates spanning the sample window: geometric for the unbounded
/// radial forms, uniform otherwise.
inline std::vector<double> sample_coords(const ClosedForm& f, int n) {
    if (n < 2) throw InvalidArgument("need at least 2 sample points");
    auto [lo, hi] = sample_window(f);
    const bool geometric = f.index() <= 1 || f.index() == 5;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = static_cast<double>(i) / (n - 1);
        out.push_back(geometric ? lo * std::pow(hi / lo, s) : lo + s * (hi - lo));
    }
    return out;
}

/// One verification row: residuals and Ricci values at a coordinate.
struct VerifyRow {
    double coord = 0, t = 0, a1 = 0, a2 = 0;
    RicciValues ricci;
    double residual1 = 0, residual2 = 0;
    /// max_i |Ric_ii - expected Einstein constant|
    double ricci_residual = 0;
};

inline VerifyRow verify_point(const ClosedForm& f, double coord) {
    VerifyRow row;
    row.coord = coord;
    row.t = arclength(f, coord);
    JetPoint j = to_arclength_jet(f, coord);
    row.a1 = j.a1;
    row.a2 = j.a2;
    row.ricci = ricci_from_jet(j);
    auto [r1, r2] = rhs(matching_params(f), j.a1, j.a2);
    row.residual1 = j.a1p - r1;
    row.residual2 = j.a2p - r2;
    const double lambda = einstein_constant(f);
    row.ricci_residual = std::max({std::abs(row.ricci.ric00 - lambda), std::abs(row.ricci.ric11 - lambda),
                                   std::abs(row.ricci.ric22 - lambda)});
    return row;
}

} // namespace cohom
