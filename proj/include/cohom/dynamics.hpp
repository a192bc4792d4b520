#pragma once

// Numerical integration of the quadratic family with singular-event
// detection, Ricci values along trajectories and the asymptotic models at
// infinity and at the singular time.

#include "cohom/errors.hpp"
#include "cohom/family.hpp"
#include "cohom/frame.hpp"
#include "cohom/laurent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cohom {

struct State {
    double t = 0, a1 = 0, a2 = 0;
};

enum class Termination { reached_t_end, singular_event, blow_up, step_underflow, step_limit };

inline const char* to_string(Termination t) {
    switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::singular_event: return "singular_event";
    case Termination::blow_up: return "blow_up";
    case Termination::step_underflow: return "step_underflow";
    case Termination::step_limit: return "step_limit";
    }
    return "unknown";
}

/// How each coefficient behaves at the end of a singular run.
enum class Trend { regular, to_zero, blowup };

inline const char* to_string(Trend t) {
    switch (t) {
    case Trend::regular: return "regular";
    case Trend::to_zero: return "to_zero";
    case Trend::blowup: return "blowup";
    }
    return "unknown";
}

struct SingularEvent {
    double t0_estimate = 0;
    double bracket_lo = 0, bracket_hi = 0;
    /// both (A2 -> 0 with A1 -> oo), a2_to_zero, a1_blowup, a1_to_zero,
    /// a2_blowup, collapse (both -> 0), or a "+"-joined combination.
    std::string side;
    Trend a1_trend = Trend::regular, a2_trend = Trend::regular;
    /// threshold (bisection on dense output) or step_underflow.
    std::string trigger;
    /// Local power-law exponents p = 1/(1 - A A''/A'^2) at the last sample.
    double a1_exponent = 0, a2_exponent = 0;

    double width() const { return bracket_hi - bracket_lo; }
};

struct IntegrateOptions {
    double eps_sing = 1e-9;
    long max_steps = 2'000'000;
    /// Initial step; 0 picks one from the data.
    double initial_step = 0;
};

/// Accepted node of the solution with its exact right-hand side, used by
/// the cubic Hermite dense output.
struct Sample {
    double t, a1, a2, d1, d2;
};

struct Trajectory {
    ParamSet params;
    NumericParams numeric{};
    double tol = 0;
    double t_end = 0;
    /// +1 forward in t, -1 backward; samples are strictly monotone in this direction.
    int direction = 1;
    std::vector<Sample> samples;
    Termination reason = Termination::reached_t_end;
    std::optional<SingularEvent> event;
    long accepted = 0, rejected = 0;

    double t_first() const { return samples.front().t; }
    double t_last() const { return samples.back().t; }
    double t_min() const { return std::min(t_first(), t_last()); }
    double t_max() const { return std::max(t_first(), t_last()); }

    bool covers(double t) const { return t >= t_min() && t <= t_max(); }

    /// Dense output by cubic Hermite interpolation on the accepted steps.
    State at(double t) const {
        if (!covers(t)) throw DomainError("time " + std::to_string(t) + " outside trajectory range");
        // index of the first sample at or beyond t in the integration direction
        auto it = std::lower_bound(samples.begin(), samples.end(), t, [&](const Sample& s, double v) {
            return direction > 0 ? s.t < v : s.t > v;
        });
        if (it == samples.begin()) return {it->t, it->a1, it->a2};
        if (it == samples.end()) --it;
        return hermite(*(it - 1), *it, t);
    }

    static State hermite(const Sample& p, const Sample& q, double t) {
        const double h = q.t - p.t;
        const double s = (t - p.t) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        return {t, h00 * p.a1 + h10 * h * p.d1 + h01 * q.a1 + h11 * h * q.d1,
                h00 * p.a2 + h10 * h * p.d2 + h01 * q.a2 + h11 * h * q.d2};
    }
};

/// Full analytic jet of a solution at (a1, a2): first derivatives from the
/// right-hand side, second derivatives from the chain rule.
inline JetPoint analytic_jet(const NumericParams& p, double a1, double a2) {
    auto [d1, d2] = rhs(p, a1, a2);
    auto [s1, s2] = second_derivatives(p, a1, a2);
    return {a1, d1, s1, a2, d2, s2};
}

namespace detail {

struct DP5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b* of the embedded fourth-order solution
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

using Vec2 = std::array<double, 2>;

inline bool finite(const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

inline Vec2 field(const NumericParams& p, const Vec2& y) {
    if (y[1] == 0.0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    auto [d1, d2] = rhs(p, y[0], y[1]);
    return {d1, d2};
}

struct StepResult {
    Vec2 y, dy;   // new state and its derivative (first stage of the next step)
    double error;  // scaled error norm; > 1 means reject
};

inline StepResult dp5_step(const NumericParams& p, const Vec2& y, const Vec2& k1, double h, double tol) {
    using D = DP5;
    auto at = [&](std::initializer_list<std::pair<double, const Vec2*>> terms) {
        Vec2 r = y;
        for (auto [c, k] : terms)
            for (int i = 0; i < 2; ++i) r[i] += h * c * (*k)[i];
        return r;
    };
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const StepResult bad{{nan, nan}, {nan, nan}, std::numeric_limits<double>::infinity()};
    Vec2 k2 = field(p, at({{D::a21, &k1}}));
    if (!finite(k2)) return bad;
    Vec2 k3 = field(p, at({{D::a31, &k1}, {D::a32, &k2}}));
    if (!finite(k3)) return bad;
    Vec2 k4 = field(p, at({{D::a41, &k1}, {D::a42, &k2}, {D::a43, &k3}}));
    if (!finite(k4)) return bad;
    Vec2 k5 = field(p, at({{D::a51, &k1}, {D::a52, &k2}, {D::a53, &k3}, {D::a54, &k4}}));
    if (!finite(k5)) return bad;
    Vec2 k6 = field(p, at({{D::a61, &k1}, {D::a62, &k2}, {D::a63, &k3}, {D::a64, &k4}, {D::a65, &k5}}));
    if (!finite(k6)) return bad;
    Vec2 yn = at({{D::b1, &k1}, {D::b3, &k3}, {D::b4, &k4}, {D::b5, &k5}, {D::b6, &k6}});
    if (!finite(yn)) return bad;
    Vec2 k7 = field(p, yn);
    if (!finite(k7)) return bad;
    double err = 0;
    for (int i = 0; i < 2; ++i) {
        double e = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] + D::e6 * k6[i] +
                        D::e7 * k7[i]);
        double scale = tol * std::max(std::abs(y[i]), std::abs(yn[i]));
        err = std::max(err, scale > 0 ? std::abs(e) / scale : std::numeric_limits<double>::infinity());
    }
    return {yn, k7, err};
}

// Local exponent p of A ~ C s^p from the analytic jet: A A''/A'^2 = (p-1)/p.
inline double local_exponent(double a, double ap, double app) {
    if (ap == 0) return 0;
    double q = a * app / (ap * ap);
    return 1.0 / (1.0 - q);
}

// Remaining time to the singularity predicted by component (a, a', a'') in
// the integration direction, or nullopt when the component looks regular.
inline std::optional<double> time_to_singularity(double a, double ap, double app, int direction) {
    double p = local_exponent(a, ap, app);
    if (!(std::abs(p) >= 0.05 && std::abs(p) <= 20)) return std::nullopt;
    // A ~ C s^p with s = |t0 - t| gives A/A' = -direction s/p
    double s = -p * a / (ap * direction);
    if (!(s >= 0) || !std::isfinite(s)) return std::nullopt;
    return s;
}

inline Trend trend_of(double ap, int direction, double p) {
    const bool shrinking = ap * direction < 0;
    if (p > 0 && shrinking) return Trend::to_zero;
    if (p < 0 && !shrinking) return Trend::blowup;
    return Trend::regular;
}

inline std::string side_label(Trend t1, Trend t2) {
    if (t2 == Trend::to_zero && t1 == Trend::blowup) return "both";
    if (t1 == Trend::to_zero && t2 == Trend::to_zero) return "collapse";
    std::vector<std::string> parts;
    if (t2 == Trend::to_zero) parts.push_back("a2_to_zero");
    if (t1 == Trend::blowup) parts.push_back("a1_blowup");
    if (t1 == Trend::to_zero) parts.push_back("a1_to_zero");
    if (t2 == Trend::blowup) parts.push_back("a2_blowup");
    if (parts.empty()) return "none";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += "+" + parts[i];
    return s;
}

// Classifies the end of `traj` and extrapolates t0 from the last samples.
inline std::optional<SingularEvent> build_event(const Trajectory& traj, const std::string& trigger) {
    const int dir = traj.direction;
    auto estimate = [&](double t, double a1, double a2)
        -> std::optional<std::pair<double, std::pair<Trend, Trend>>> {
        JetPoint j;
        try {
            j = analytic_jet(traj.numeric, a1, a2);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        double p1 = local_exponent(j.a1, j.a1p, j.a1pp), p2 = local_exponent(j.a2, j.a2p, j.a2pp);
        auto s1 = time_to_singularity(j.a1, j.a1p, j.a1pp, dir);
        auto s2 = time_to_singularity(j.a2, j.a2p, j.a2pp, dir);
        Trend t1 = s1 ? trend_of(j.a1p, dir, p1) : Trend::regular;
        Trend t2 = s2 ? trend_of(j.a2p, dir, p2) : Trend::regular;
        std::optional<double> rest;
        // prefer the collapsing coefficient, it carries the cleaner power law
        if (t2 != Trend::regular) rest = s2;
        else if (t1 != Trend::regular) rest = s1;
        if (!rest) return std::nullopt;
        return std::make_pair(t + dir * *rest, std::make_pair(t1, t2));
    };
    const Sample& last = traj.samples.back();
    auto main = estimate(last.t, last.a1, last.a2);
    if (!main) return std::nullopt;
    SingularEvent ev;
    ev.trigger = trigger;
    ev.t0_estimate = main->first;
    ev.a1_trend = main->second.first;
    ev.a2_trend = main->second.second;
    ev.side = side_label(ev.a1_trend, ev.a2_trend);
    JetPoint j = analytic_jet(traj.numeric, last.a1, last.a2);
    ev.a1_exponent = local_exponent(j.a1, j.a1p, j.a1pp);
    ev.a2_exponent = local_exponent(j.a2, j.a2p, j.a2pp);
    // Repeating the extrapolation from twice the distance to t0 measures how
    // far the local power law is from exact; that spread sets the bracket.
    double spread = 0;
    const double t_back = last.t - (main->first - last.t);
    if (traj.covers(t_back) && t_back != last.t) {
        State sb = traj.at(t_back);
        if (auto second = estimate(t_back, sb.a1, sb.a2)) spread = std::abs(second->first - ev.t0_estimate);
    }
    spread += 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ev.t0_estimate));
    double lo = ev.t0_estimate - spread, hi = ev.t0_estimate + spread;
    ev.bracket_lo = lo;
    ev.bracket_hi = hi;
    return ev;
}

inline double initial_step(const NumericParams& p, const Vec2& y, const Vec2& f, double tol, double span) {
    double d0 = 0, d1 = 0;
    for (int i = 0; i < 2; ++i) {
        double sc = std::abs(y[i]);
        d0 = std::max(d0, std::abs(y[i]) / sc);
        d1 = std::max(d1, std::abs(f[i]) / sc);
    }
    double h = d1 > 1e-300 ? 0.01 * d0 / d1 : 1e-3;
    h *= std::pow(tol / 1e-6, 0.2);
    (void)p;
    return std::min(h, std::abs(span));
}

// Time in the last step where component `which` of the Hermite interpolant
// crosses `level` (sign change is guaranteed by the caller).
inline double bisect_crossing(const Sample& p, const Sample& q, int which, double level) {
    auto g = [&](double t) {
        State s = Trajectory::hermite(p, q, t);
        return (which == 0 ? s.a1 : s.a2) - level;
    };
    double lo = p.t, hi = q.t, glo = g(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double gm = g(mid);
        if ((gm < 0) == (glo < 0)) { lo = mid; glo = gm; }
        else hi = mid;
    }
    return (std::abs(g(lo)) <= std::abs(g(hi))) ? lo : hi;
}

} // namespace detail

/// Embedded Dormand-Prince 5(4) with per-step relative error control and
/// local extrapolation. Stops at t_end, when a coefficient falls below
/// eps_sing or exceeds 1/eps_sing (crossing time bisected on the dense
/// output), or when the step size underflows; an underflow that shows a
/// coherent power-law singularity is reported as a singular event.
inline Trajectory integrate(const ParamSet& params, const State& init, double t_end, double tol,
                            const IntegrateOptions& opt = {}) {
    if (!(tol >= 1e-14 && tol <= 1e-3)) throw InvalidArgument("tol must lie in [1e-14, 1e-3]");
    validate(params);
    if (!(init.a1 > 0) || !(init.a2 > 0) || !std::isfinite(init.a1) || !std::isfinite(init.a2) ||
        !std::isfinite(init.t))
        throw InvalidArgument("initial state requires finite a1 > 0 and a2 > 0");
    if (!std::isfinite(t_end) || t_end == init.t) throw InvalidArgument("t_end must be finite and differ from t");
    const double eps = opt.eps_sing;
    if (init.a1 < eps || init.a2 < eps || init.a1 > 1 / eps || init.a2 > 1 / eps)
        throw DomainError("initial state is already at a singular threshold");

    Trajectory traj;
    traj.params = params;
    traj.numeric = NumericParams::from(params);
    traj.tol = tol;
    traj.t_end = t_end;
    traj.direction = t_end > init.t ? 1 : -1;
    const int dir = traj.direction;
    const NumericParams& np = traj.numeric;

    detail::Vec2 y{init.a1, init.a2};
    detail::Vec2 f = detail::field(np, y);
    double t = init.t;
    traj.samples.push_back({t, y[0], y[1], f[0], f[1]});
    double h = opt.initial_step > 0 ? opt.initial_step : detail::initial_step(np, y, f, tol, t_end - t);
    h = std::max(h, 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)));

    auto finish_threshold = [&](int which, double level, Termination reason) {
        Sample q = traj.samples.back();
        Sample p = traj.samples[traj.samples.size() - 2];
        double tc = detail::bisect_crossing(p, q, which, level);
        traj.samples.pop_back();
        if (tc != p.t) {
            State s = Trajectory::hermite(p, q, tc);
            auto [d1, d2] = rhs(np, s.a1, s.a2);
            traj.samples.push_back({tc, s.a1, s.a2, d1, d2});
        }
        traj.reason = reason;
        traj.event = detail::build_event(traj, "threshold");
        if (!traj.event) {
            // crossing without a detectable power law: report the crossing itself
            SingularEvent ev;
            ev.trigger = "threshold";
            ev.t0_estimate = ev.bracket_lo = ev.bracket_hi = traj.samples.back().t;
            ev.a1_trend = which == 0 ? (level < 1 ? Trend::to_zero : Trend::blowup) : Trend::regular;
            ev.a2_trend = which == 1 ? (level < 1 ? Trend::to_zero : Trend::blowup) : Trend::regular;
            ev.side = detail::side_label(ev.a1_trend, ev.a2_trend);
            traj.event = ev;
        }
    };

    const double safety = 0.9, grow_max = 5.0, shrink_min = 0.2;
    for (long step = 0;; ++step) {
        if (step >= opt.max_steps) {
            traj.reason = Termination::step_limit;
            return traj;
        }
        const double remaining = (t_end - t) * dir;
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const double floor = 16 * std::numeric_limits<double>::epsilon() * std::max(1e-300, std::abs(t));
        if (h <= floor || t + dir * h == t) {
            traj.event = detail::build_event(traj, "step_underflow");
            traj.reason = traj.event ? Termination::singular_event : Termination::step_underflow;
            return traj;
        }
        detail::StepResult r = detail::dp5_step(np, y, f, dir * h, tol);
        if (!(r.error <= 1.0)) {
            ++traj.rejected;
            double factor = std::isfinite(r.error) ? std::max(shrink_min, safety * std::pow(r.error, -0.2)) : 0.25;
            h *= factor;
            continue;
        }
        ++traj.accepted;
        t = last ? t_end : t + dir * h;
        y = r.y;
        f = r.dy;
        traj.samples.push_back({t, y[0], y[1], f[0], f[1]});

        if (y[1] < eps || y[0] < eps) {
            const int which = (y[1] < eps) ? 1 : 0;
            finish_threshold(which, eps, Termination::singular_event);
            return traj;
        }
        if (y[0] > 1 / eps) {
            finish_threshold(0, 1 / eps, Termination::singular_event);
            return traj;
        }
        if (y[1] > 1 / eps) {
            finish_threshold(1, 1 / eps, Termination::blow_up);
            return traj;
        }
        if (last) {
            traj.reason = Termination::reached_t_end;
            return traj;
        }
        double factor = r.error > 0 ? std::min(grow_max, std::max(shrink_min, safety * std::pow(r.error, -0.2)))
                                    : grow_max;
        h *= factor;
    }
}

/// Ricci values at every sample from the analytic jet (no finite differences).
inline std::vector<RicciValues> ricci_along(const Trajectory& traj) {
    std::vector<RicciValues> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) out.push_back(ricci_from_jet(analytic_jet(traj.numeric, s.a1, s.a2)));
    return out;
}

/// Ric_ii = L_ii(x)/A2^2 evaluated from the symbolic residuals.
inline RicciValues symbolic_ricci_at(const SymbolicRicci<Rational>& s, double a1, double a2) {
    const double x = a1 / a2, inv = 1 / (a2 * a2);
    return with_scalar(s.l00.eval(x) * inv, s.l11.eval(x) * inv, s.l22.eval(x) * inv);
}

inline bool singular_reason(Termination r) {
    return r == Termination::singular_event || r == Termination::blow_up;
}

inline SingularEvent detect_singularity(const Trajectory& traj) {
    if (!singular_reason(traj.reason) || !traj.event)
        throw DomainError(std::string("trajectory did not terminate singularly (reason: ") + to_string(traj.reason) +
                          ")");
    return *traj.event;
}

enum class Component { a1, a2 };

struct FitWindow {
    double lo = 1e-6, hi = 1e-2;
};

struct AsymptoticFit {
    double exponent = 0, coefficient = 0;
    /// range of |t - t0| actually used
    double window_lo = 0, window_hi = 0;
    /// RMS of the residuals in (ln s, ln A) coordinates
    double goodness = 0;
    std::size_t points = 0;
};

/// Least-squares line through (ln s_i, ln A_i).
inline AsymptoticFit fit_power_law(const std::vector<double>& s, const std::vector<double>& a) {
    if (s.size() != a.size()) throw InvalidArgument("fit_power_law: size mismatch");
    if (s.size() < 3) throw InvalidArgument("fit_power_law: need at least 3 samples");
    double mx = 0, my = 0;
    const double n = static_cast<double>(s.size());
    std::vector<double> lx(s.size()), ly(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0) || !(a[i] > 0)) throw InvalidArgument("fit_power_law: samples must be positive");
        lx[i] = std::log(s[i]);
        ly[i] = std::log(a[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0) throw InvalidArgument("fit_power_law: samples span no range");
    AsymptoticFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.coefficient = std::exp(intercept);
    double rss = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double r = ly[i] - (intercept + fit.exponent * lx[i]);
        rss += r * r;
    }
    fit.goodness = std::sqrt(rss / n);
    auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    fit.window_lo = *lo;
    fit.window_hi = *hi;
    fit.points = s.size();
    return fit;
}

/// Fits A ~ C |t - t0|^p over |t - t0| in the window, resampling the dense
/// output log-uniformly. The window must span at least `min_decades`.
inline AsymptoticFit fit_power_law(const Trajectory& traj, Component which, double t0, FitWindow window = {},
                                   double min_decades = 2, int points = 200) {
    if (!(window.lo > 0 && window.hi > window.lo)) throw InvalidArgument("fit window must satisfy 0 < lo < hi");
    if (std::log10(window.hi / window.lo) < min_decades)
        throw InvalidArgument("fit window spans fewer than the required decades");
    // t0 lies beyond the end of the run; s = |t - t0| grows back along the trajectory
    const double side = t0 >= traj.t_last() ? -1.0 : 1.0;
    std::vector<double> s, a;
    for (int i = 0; i < points; ++i) {
        double u = window.lo * std::pow(window.hi / window.lo, static_cast<double>(i) / (points - 1));
        double t = t0 + side * u;
        if (!traj.covers(t))
            throw InvalidArgument("insufficient samples: trajectory does not cover |t - t0| = " + std::to_string(u));
        State st = traj.at(t);
        s.push_back(u);
        a.push_back(which == Component::a1 ? st.a1 : st.a2);
    }
    return fit_power_law(s, a);
}

/// B2 = alpha + beta ln t + 2t, B1 = B2 (B2' - 2).
struct ModelB {
    double alpha, beta;

    double b2(double t) const { return alpha + beta * std::log(t) + 2 * t; }
    double b1(double t) const { return 2 * beta + alpha * beta / t + beta * beta * std::log(t) / t; }
    double b1_prime(double t) const { return (beta * beta - alpha * beta - beta * beta * std::log(t)) / (t * t); }
};

/// B1' + B1^2/B2^2 with B1^2/B2^2 replaced by its leading term (beta/t)^2:
/// (beta^2 - alpha beta - beta^2 ln t)/t^2 + (beta/t)^2.
inline double model_B_residual(double alpha, double beta, double t) {
    if (!(t > 0)) throw DomainError("model_B_residual requires t > 0");
    return ModelB{alpha, beta}.b1_prime(t) + (beta / t) * (beta / t);
}

/// C2 = gamma s^(1/3) + (9/5) s, C1 = C2 (C2' - 2), s = t - t0.
struct ModelC {
    double gamma, t0;

    double c2(double t) const { double s = t - t0; return gamma * std::cbrt(s) + 1.8 * s; }
    double c2_prime(double t) const { double s = t - t0; return gamma / (3 * std::cbrt(s * s)) + 1.8; }
    double c1(double t) const { return c2(t) * (c2_prime(t) - 2); }
    /// d/dt of C1 = (gamma^2/3) s^(-1/3) + (2/5) gamma s^(1/3) - (9/25) s
    double c1_prime(double t) const {
        double s = t - t0, r = std::cbrt(s);
        return -gamma * gamma / (9 * r * r * r * r) + 2 * gamma / (15 * r * r) - 0.36;
    }
};

enum class ResidualPath { closed_form, analytic, finite_difference };

namespace detail {

// C1' + (C1/C2)^2 with u = s^(1/3) and gamma kept symbolic: a Laurent
// polynomial in u whose coefficients are Laurent polynomials in gamma.
inline LaurentPoly<RationalLaurent> model_C_symbolic() {
    using G = RationalLaurent;
    using U = LaurentPoly<G>;
    const G gamma = G::x();
    auto d_ds = [](const U& p) { return U::monomial(G(Rational(1, 3)), -2) * p.derivative(); };  // ds = 3u^2 du
    const U c2 = U::monomial(gamma, 1) + U::monomial(G(Rational(9, 5)), 3);
    const U ratio = d_ds(c2) - U(G(2));  // C1/C2 = C2' - 2
    const U c1 = c2 * ratio;
    return d_ds(c1) + ratio * ratio;
}

} // namespace detail

/// C1' + C1^2/C2^2 for the singular-time model. The closed-form path
/// simplifies the expression exactly (it is the constant -8/25); the
/// analytic path evaluates hand-differentiated formulas in floating point;
/// the finite-difference path replaces C1' by a central difference with step h.
inline double model_C_residual(double gamma, double t0, double t, ResidualPath path = ResidualPath::closed_form,
                               double h = 1e-5) {
    if (!(t > t0)) throw DomainError("model_C_residual requires t > t0");
    ModelC m{gamma, t0};
    switch (path) {
    case ResidualPath::closed_form: {
        static const LaurentPoly<RationalLaurent> r = detail::model_C_symbolic();
        const double u = std::cbrt(t - t0);
        if (r.is_constant()) return to_double(r.coefficient(0).coefficient(0));
        double sum = 0;
        for (const auto& [n, c] : r.terms()) sum += c.eval(gamma) * std::pow(u, static_cast<double>(n));
        return sum;
    }
    case ResidualPath::analytic: {
        double q = m.c1(t) / m.c2(t);
        return m.c1_prime(t) + q * q;
    }
    case ResidualPath::finite_difference: {
        if (!(t - h > t0)) throw DomainError("finite-difference step reaches t0");
        double d = (m.c1(t + h) - m.c1(t - h)) / (2 * h);
        double q = m.c1(t) / m.c2(t);
        return d + q * q;
    }
    }
    return 0;
}

struct InfinityFit {
    double alpha = 0, beta = 0;
    /// mean of A1 over the tail, the 2 beta estimate
    double a1_tail_mean = 0;
    double t_lo = 0, t_hi = 0;
    double rms = 0;
};

/// Least squares of A2 - 2t against (1, ln t) on the pairs (t_i, A2_i).
inline InfinityFit fit_infinity_model(const std::vector<double>& t, const std::vector<double>& a2,
                                      const std::vector<double>& a1 = {}) {
    if (t.size() != a2.size() || (!a1.empty() && a1.size() != t.size()))
        throw InvalidArgument("fit_infinity_model: size mismatch");
    if (t.size() < 3) throw InvalidArgument("fit_infinity_model: tail too short");
    const double n = static_cast<double>(t.size());
    double mx = 0, my = 0;
    std::vector<double> lx(t.size()), yy(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0)) throw InvalidArgument("fit_infinity_model: times must be positive");
        lx[i] = std::log(t[i]);
        yy[i] = a2[i] - 2 * t[i];
        mx += lx[i];
        my += yy[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (yy[i] - my);
    }
    if (sxx == 0) throw InvalidArgument("fit_infinity_model: tail spans no range");
    InfinityFit fit;
    fit.beta = sxy / sxx;
    fit.alpha = my - fit.beta * mx;
    double rss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double r = yy[i] - (fit.alpha + fit.beta * lx[i]);
        rss += r * r;
    }
    fit.rms = std::sqrt(rss / n);
    if (!a1.empty()) {
        double s = 0;
        for (double v : a1) s += v;
        fit.a1_tail_mean = s / n;
    }
    auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    fit.t_lo = *lo;
    fit.t_hi = *hi;
    return fit;
}

/// Tail fit over t in [t_max / tail_ratio, t_max], resampled log-uniformly.
inline InfinityFit fit_infinity_model(const Trajectory& traj, double tail_ratio = 100, int points = 200) {
    if (traj.direction < 0 || traj.t_last() < 1e3 || singular_reason(traj.reason))
        throw InvalidArgument("fit_infinity_model needs a forward non-singular run reaching t >= 1e3");
    const double hi = traj.t_last(), lo = std::max(hi / tail_ratio, traj.t_first());
    if (!(lo > 0) || hi / lo < 2) throw InvalidArgument("fit_infinity_model: tail too short");
    std::vector<double> t, a1, a2;
    for (int i = 0; i < points; ++i) {
        double ti = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        State s = traj.at(ti);
        t.push_back(ti);
        a1.push_back(s.a1);
        a2.push_back(s.a2);
    }
    return fit_infinity_model(t, a2, a1);
}

struct AlcSlope {
    double a1_rate = 0, a2_rate = 0;
    /// ALE (both rates 1), ALC (finite rates, one direction may stay bounded)
    /// or cone-degenerate (both rates 0).
    std::string label;
};

/// Secant slopes of A1 and A2 over the second half of the tail.
inline AlcSlope alc_slope(const Trajectory& traj, double rate_tol = 2e-2) {
    if (singular_reason(traj.reason)) throw InvalidArgument("alc_slope needs a non-singular tail");
    const double t1 = traj.t_last(), t0 = traj.t_first() + 0.5 * (t1 - traj.t_first());
    if (traj.samples.size() < 3 || t1 == t0) throw InvalidArgument("alc_slope: tail too short");
    State a = traj.at(t0), b = traj.at(t1);
    AlcSlope r;
    r.a1_rate = (b.a1 - a.a1) / (t1 - t0);
    r.a2_rate = (b.a2 - a.a2) / (t1 - t0);
    auto near = [&](double v, double target) { return std::abs(v - target) <= rate_tol; };
    if (near(r.a1_rate, 1) && near(r.a2_rate, 1)) r.label = "ALE";
    else if (near(r.a1_rate, 0) && near(r.a2_rate, 0)) r.label = "cone-degenerate";
    else r.label = "ALC";
    return r;
}

} // namespace cohom
