#pragma once

// JSON and CSV rendering of results. JSON objects keep insertion order so
// identical inputs give byte-identical output.

#include "cohom/catalog.hpp"
#include "cohom/classify.hpp"
#include "cohom/dynamics.hpp"
#include "cohom/frame.hpp"

#include <json.hpp>

#include <charconv>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

namespace cohom {

using Json = nlohmann::ordered_json;

/// Shortest text with 17 significant digits, '.' separator regardless of locale.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, end);
}

inline Json to_json(const ParamSet& p) {
    Json a = Json::array();
    for (const auto& v : p.values) a.push_back(to_fraction_string(v));
    return a;
}

inline Json to_json(const RicciValues& r) {
    return Json{{"ric00", r.ric00}, {"ric11", r.ric11}, {"ric22", r.ric22}, {"scalar", r.scalar}};
}

inline Json to_json(const JetPoint& j) {
    return Json{{"a1", j.a1}, {"a1p", j.a1p}, {"a1pp", j.a1pp}, {"a2", j.a2}, {"a2p", j.a2p}, {"a2pp", j.a2pp}};
}

inline Json to_json(const SweepReport& s) {
    Json unexpected_flat = Json::array(), unexpected_einstein = Json::array();
    for (const auto& p : s.unexpected_ricci_flat) unexpected_flat.push_back(to_json(p));
    for (const auto& p : s.unexpected_einstein) unexpected_einstein.push_back(to_json(p));
    return Json{{"bound", s.bound},
                {"points", s.points},
                {"ricci_flat_hits", s.ricci_flat_hits},
                {"einstein_hits", s.einstein_hits},
                {"unexpected_ricci_flat", unexpected_flat},
                {"unexpected_einstein", unexpected_einstein}};
}

inline Json to_json(const ClassificationResult& r) {
    Json flat = Json::array(), einstein = Json::array(), excluded = Json::array(), unresolved = Json::array(),
         leaves = Json::array();
    for (const auto& p : r.ricci_flat_families) flat.push_back(to_json(p));
    for (const auto& p : r.einstein_families) einstein.push_back(to_json(p));
    for (const auto& e : r.excluded_branches) excluded.push_back(Json{{"case", e.label}, {"reason", e.reason}});
    for (const auto& s : r.unresolved) unresolved.push_back(Json{{"case", s.label}, {"conditions", s.conditions}});
    for (const auto& l : r.leaves) leaves.push_back(Json{{"case", l.label}, {"params", to_json(l.params())}});
    return Json{{"ricci_flat_families", flat},
                {"einstein_families", einstein},
                {"excluded_branches", excluded},
                {"unresolved", unresolved},
                {"leaves", leaves},
                {"l00_factorization", r.l00_factorization ? "L00 = -2*x^-1*P*Q" : "failed"},
                {"sweep", to_json(r.sweep)},
                {"complete", r.complete()}};
}

inline Json to_json(const SingularEvent& e) {
    return Json{{"t0_estimate", e.t0_estimate},
                {"bracket", Json::array({e.bracket_lo, e.bracket_hi})},
                {"width", e.width()},
                {"side", e.side},
                {"a1_trend", to_string(e.a1_trend)},
                {"a2_trend", to_string(e.a2_trend)},
                {"a1_local_exponent", e.a1_exponent},
                {"a2_local_exponent", e.a2_exponent},
                {"trigger", e.trigger}};
}

inline Json to_json(const AsymptoticFit& f) {
    return Json{{"exponent", f.exponent},
                {"coefficient", f.coefficient},
                {"window", Json::array({f.window_lo, f.window_hi})},
                {"goodness", f.goodness},
                {"points", f.points}};
}

inline Json to_json(const InfinityFit& f) {
    return Json{{"alpha", f.alpha},
                {"beta", f.beta},
                {"a1_tail_mean", f.a1_tail_mean},
                {"window", Json::array({f.t_lo, f.t_hi})},
                {"rms", f.rms}};
}

inline Json to_json(const AlcSlope& s) {
    return Json{{"a1_rate", s.a1_rate}, {"a2_rate", s.a2_rate}, {"label", s.label}};
}

/// Summary of a run; samples are added by the caller when requested.
inline Json trajectory_summary(const Trajectory& t) {
    Json j{{"params", to_json(t.params)},
           {"tol", t.tol},
           {"t_end", t.t_end},
           {"direction", t.direction},
           {"termination", to_string(t.reason)},
           {"t_reached", t.t_last()},
           {"accepted_steps", t.accepted},
           {"rejected_steps", t.rejected},
           {"samples", t.samples.size()}};
    j["event"] = t.event ? to_json(*t.event) : Json(nullptr);
    return j;
}

struct TrajectoryRow {
    double t, a1, a2, x;
    RicciValues ricci;
};

inline std::vector<TrajectoryRow> trajectory_rows(const Trajectory& traj) {
    std::vector<RicciValues> ric = ricci_along(traj);
    std::vector<TrajectoryRow> rows;
    rows.reserve(ric.size());
    for (std::size_t i = 0; i < ric.size(); ++i) {
        const auto& s = traj.samples[i];
        rows.push_back({s.t, s.a1, s.a2, s.a1 / s.a2, ric[i]});
    }
    return rows;
}

inline const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{"t", "A1", "A2", "x", "ric00", "ric11", "ric22", "scalar"};
    return cols;
}

inline std::vector<double> row_values(const TrajectoryRow& r) {
    return {r.t, r.a1, r.a2, r.x, r.ricci.ric00, r.ricci.ric11, r.ricci.ric22, r.ricci.scalar};
}

inline std::vector<std::string> verify_columns(const std::string& coord) {
    return {coord, "t", "A1", "A2", "ric00", "ric11", "ric22", "residual1", "residual2"};
}

inline std::vector<double> row_values(const VerifyRow& r) {
    return {r.coord, r.t, r.a1, r.a2, r.ricci.ric00, r.ricci.ric11, r.ricci.ric22, r.residual1, r.residual2};
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << "\n";
    }
}

/// Fixed-width text table.
inline void write_table(std::ostream& os, const std::vector<std::string>& header,
                        const std::vector<std::vector<double>>& rows) {
    constexpr int width = 24;
    auto pad = [&](const std::string& s) { return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' '); };
    for (const auto& h : header) os << pad(h);
    os << "\n";
    for (const auto& r : rows) {
        for (double v : r) os << pad(format_double(v));
        os << "\n";
    }
}

} // namespace cohom
