#pragma once

#include "cohom/catalog.hpp"
#include "cohom/classify.hpp"
#include "cohom/dynamics.hpp"
#include "cohom/errors.hpp"
#include "cohom/frame.hpp"
#include "cohom/io.hpp"
#include "cohom/rational.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cohom::cli {

enum ExitCode : int { ok = 0, validation_error = 2, numerical_failure = 3 };

inline double parse_real(const std::string& text) {
    std::string s = text;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    double v = 0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [end, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
        throw InvalidArgument("not a finite real: '" + text + "'");
    return v;
}

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(item);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
}

/// "k1,k2,k3,l1,l2,l3"; each entry "p/q" or an exact decimal.
inline ParamSet parse_params(const std::string& text) {
    auto parts = split_commas(text);
    if (parts.size() != 6) throw InvalidArgument("--params needs six comma-separated rationals, got '" + text + "'");
    ParamSet p;
    for (int i = 0; i < 6; ++i) p.values[static_cast<std::size_t>(i)] = parse_rational(parts[static_cast<std::size_t>(i)]);
    validate(p);
    return p;
}

inline std::pair<double, double> parse_pair(const std::string& text, const std::string& flag) {
    auto parts = split_commas(text);
    if (parts.size() != 2) throw InvalidArgument(flag + " needs two comma-separated reals, got '" + text + "'");
    return {parse_real(parts[0]), parse_real(parts[1])};
}

/// Reads a flat key=value file. Blank lines and lines starting with '#' are ignored.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    while (std::getline(in, line)) {
        ++number;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(path + ":" + std::to_string(number) + ": expected key=value");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key.empty()) throw InvalidArgument(path + ":" + std::to_string(number) + ": empty key");
        out.emplace_back(key, value);
    }
    return out;
}

/// Splices `--config FILE` entries into the argument list. Keys name long
/// flags; flags given on the command line take precedence. A `subcommand`
/// key supplies the subcommand when none is given.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw InvalidArgument("--config needs a file argument");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (!path) return args;
    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    for (const auto& [key, value] : read_config(*path)) {
        if (key == "subcommand") {
            if (args.empty() || args.front().rfind("-", 0) == 0) args.insert(args.begin(), value);
            continue;
        }
        if (!given(key)) {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

struct Output {
    std::string format = "json";
    std::string path;
};

// Flattens nested JSON into dotted key paths.
inline void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
    } else if (j.is_number_float()) {
        out.emplace_back(prefix, format_double(j.get<double>()));
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

struct Report {
    std::string command;
    Json options;
    Json result;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void emit(const Report& r, const Output& o, std::ostream& out) {
    std::ofstream file;
    std::ostream* os = &out;
    if (!o.path.empty()) {
        file.open(o.path);
        if (!file) throw InvalidArgument("cannot write '" + o.path + "'");
        os = &file;
    }
    if (o.format == "json") {
        Json j{{"command", r.command}, {"options", r.options}, {"result", r.result}};
        if (!r.columns.empty()) {
            j["columns"] = r.columns;
            j["rows"] = r.rows;
        }
        *os << j.dump(2) << "\n";
        return;
    }
    std::vector<std::pair<std::string, std::string>> meta;
    flatten(Json{{"command", r.command}, {"options", r.options}, {"result", r.result}}, "", meta);
    if (r.columns.empty()) {
        for (const auto& [k, v] : meta) *os << k << (o.format == "csv" ? "," : " = ") << v << "\n";
        return;
    }
    for (const auto& [k, v] : meta) *os << "# " << k << "=" << v << "\n";
    if (o.format == "csv") write_csv(*os, r.columns, r.rows);
    else write_table(*os, r.columns, r.rows);
}

inline Json init_json(double t0, double a1, double a2) { return Json{{"t0", t0}, {"a1", a1}, {"a2", a2}}; }

/// Runs one command line (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cohomogeneity-one metric verification engine", "cohom"};
    app.require_subcommand(1);
    Output output;
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", output.format, "json | csv | table")
            ->check(CLI::IsMember({"json", "csv", "table"}))
            ->capture_default_str();
        sub->add_option("--output", output.path, "write to this file instead of standard output");
    };

    int bound = 3, workers = 1;
    auto* classify_cmd = app.add_subcommand("classify", "re-derive the Ricci-flat and Einstein families");
    classify_cmd->add_option("--bound", bound, "sweep grid [-N, N]^6")->capture_default_str();
    classify_cmd->add_option("--workers", workers, "threads for the sweep")->capture_default_str();
    add_output(classify_cmd);

    std::string form_name_opt;
    double form_param = 1.0;
    int points = 100;
    auto* verify_cmd = app.add_subcommand("verify", "ODE and Ricci residuals of a closed form over its domain");
    auto* catalog_cmd = app.add_subcommand("catalog", "sample table of a closed form");
    for (auto* sub : {verify_cmd, catalog_cmd}) {
        sub->add_option("--form", form_name_opt, "taub-nut | eguchi-hanson | fubini-study | "
                                                 "fubini-study-hyperbolic | case3 | flat-cone")
            ->required();
        sub->add_option("--param", form_param, "m, a, alpha or c")->capture_default_str();
        sub->add_option("--points", points, "number of sample coordinates")->capture_default_str();
        add_output(sub);
    }

    JetPoint jet;
    auto* ricci_cmd = app.add_subcommand("ricci", "Ricci components of one jet");
    ricci_cmd->add_option("--a1", jet.a1)->required();
    ricci_cmd->add_option("--a1p", jet.a1p)->capture_default_str();
    ricci_cmd->add_option("--a1pp", jet.a1pp)->capture_default_str();
    ricci_cmd->add_option("--a2", jet.a2)->required();
    ricci_cmd->add_option("--a2p", jet.a2p)->capture_default_str();
    ricci_cmd->add_option("--a2pp", jet.a2pp)->capture_default_str();
    add_output(ricci_cmd);

    std::string params_text, init_text, mode;
    double t0 = 0, tol = 1e-10, eps_sing = 1e-9;
    std::optional<double> t_end;
    long max_steps = 2'000'000;
    double window_lo = 1e-6, window_hi = 1e-2, tail_ratio = 100;
    auto* integrate_cmd = app.add_subcommand("integrate", "integrate the family and export the trajectory");
    auto* asymptote_cmd = app.add_subcommand("asymptote", "singular-time or infinity asymptotics of a run");
    asymptote_cmd->add_option("--mode", mode, "singular | infinity")
        ->required()
        ->check(CLI::IsMember({"singular", "infinity"}));
    for (auto* sub : {integrate_cmd, asymptote_cmd}) {
        auto* p = sub->add_option("--params", params_text, "k1,k2,k3,l1,l2,l3 as exact rationals");
        auto* i = sub->add_option("--init", init_text, "a1,a2 at t0");
        auto* e = sub->add_option("--t-end", t_end, "end time");
        if (sub == integrate_cmd) {
            p->required();
            i->required();
            e->required();
        }
        sub->add_option("--t0", t0, "initial time")->capture_default_str();
        sub->add_option("--tol", tol, "relative error per step")->capture_default_str();
        sub->add_option("--eps-sing", eps_sing, "singular threshold")->capture_default_str();
        sub->add_option("--max-steps", max_steps)->capture_default_str();
        add_output(sub);
    }
    asymptote_cmd->add_option("--window-lo", window_lo, "smallest |t - t0| of the singular fit")->capture_default_str();
    asymptote_cmd->add_option("--window-hi", window_hi, "largest |t - t0| of the singular fit")->capture_default_str();
    asymptote_cmd->add_option("--tail-ratio", tail_ratio, "infinity fit over [t_max/ratio, t_max]")
        ->capture_default_str();

    std::vector<std::string> args;
    try {
        args = expand_config(argv);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return validation_error;
    }

    try {
        Report r;
        int code = ok;
        if (*classify_cmd) {
            if (workers < 1) throw InvalidArgument("--workers must be at least 1");
            r.command = "classify";
            r.options = Json{{"bound", bound}, {"workers", workers}};
            ClassificationResult c = classify(bound, workers);
            r.result = to_json(c);
        } else if (*verify_cmd || *catalog_cmd) {
            if (points < 2) throw InvalidArgument("--points must be at least 2");
            ClosedForm f = make_form(form_name_opt, form_param);
            r.command = *verify_cmd ? "verify" : "catalog";
            r.options = Json{{"form", form_name_opt}, {"param", form_param}, {"points", points}};
            double max_ode = 0, max_ricci = 0;
            r.columns = verify_columns(coordinate_name(f));
            for (double x : sample_coords(f, points)) {
                VerifyRow row = verify_point(f, x);
                max_ode = std::max({max_ode, std::abs(row.residual1), std::abs(row.residual2)});
                max_ricci = std::max(max_ricci, row.ricci_residual);
                r.rows.push_back(row_values(row));
            }
            auto [lo, hi] = sample_window(f);
            r.result = Json{{"matching_params", to_json(matching_params(f))},
                            {"einstein_constant", einstein_constant(f)},
                            {"coordinate", coordinate_name(f)},
                            {"window", Json::array({lo, hi})},
                            {"max_ode_residual", max_ode},
                            {"max_ricci_residual", max_ricci}};
            if (*verify_cmd) {
                r.result["ode_residual_ok"] = max_ode <= 1e-12;
                r.result["ricci_residual_ok"] = max_ricci <= 1e-9;
                if (output.format == "json") r.columns.clear(), r.rows.clear();
            }
        } else if (*ricci_cmd) {
            r.command = "ricci";
            r.options = to_json(jet);
            RicciValues v = ricci_from_jet(jet);
            r.result = to_json(v);
        } else {
            const bool singular_mode = *asymptote_cmd && mode == "singular";
            ParamSet params = params_text.empty() ? (singular_mode ? make_params(1, 0, 0, 0, -1, -2)
                                                                   : make_params(-1, 0, 0, 0, 1, 2))
                                                  : parse_params(params_text);
            auto [a1, a2] = init_text.empty() ? std::pair<double, double>{2.0, 2.0 / 3} : parse_pair(init_text, "--init");
            const double end = t_end ? *t_end : (singular_mode ? t0 + 10 : t0 + 1e4);
            if (!(eps_sing > 0 && eps_sing < 1)) throw InvalidArgument("--eps-sing must lie in (0, 1)");
            if (max_steps < 1) throw InvalidArgument("--max-steps must be positive");
            IntegrateOptions opt;
            opt.eps_sing = eps_sing;
            opt.max_steps = max_steps;
            r.options = Json{{"params", to_json(params)}, {"init", init_json(t0, a1, a2)}, {"t_end", end},
                             {"tol", tol},                {"eps_sing", eps_sing},          {"max_steps", max_steps}};
            Trajectory traj = integrate(params, {t0, a1, a2}, end, tol, opt);
            if (*integrate_cmd) {
                r.command = "integrate";
                r.result = trajectory_summary(traj);
                r.columns = trajectory_columns();
                for (const auto& row : trajectory_rows(traj)) r.rows.push_back(row_values(row));
                if (traj.reason != Termination::reached_t_end) code = numerical_failure;
            } else if (singular_mode) {
                r.command = "asymptote";
                r.options["mode"] = mode;
                r.options["window"] = Json::array({window_lo, window_hi});
                r.result = Json{{"trajectory", trajectory_summary(traj)}};
                if (!singular_reason(traj.reason)) {
                    code = numerical_failure;
                } else {
                    SingularEvent ev = detect_singularity(traj);
                    FitWindow w{window_lo, window_hi};
                    AsymptoticFit f2 = fit_power_law(traj, Component::a2, ev.t0_estimate, w);
                    AsymptoticFit f1 = fit_power_law(traj, Component::a1, ev.t0_estimate, w);
                    const double predicted = f2.coefficient * f2.coefficient / 3;
                    r.result["a2_fit"] = to_json(f2);
                    r.result["a1_fit"] = to_json(f1);
                    r.result["gamma"] = f2.coefficient;
                    r.result["gamma_squared_over_3"] = predicted;
                    r.result["a1_coefficient_ratio"] = f1.coefficient / predicted;
                }
            } else {
                r.command = "asymptote";
                r.options["mode"] = mode;
                r.options["tail_ratio"] = tail_ratio;
                r.result = Json{{"trajectory", trajectory_summary(traj)}};
                if (traj.reason != Termination::reached_t_end) {
                    code = numerical_failure;
                } else {
                    InfinityFit fit = fit_infinity_model(traj, tail_ratio);
                    AlcSlope slope = alc_slope(traj);
                    const double tl = traj.t_last();
                    State s = traj.at(tl);
                    r.result["fit"] = to_json(fit);
                    r.result["alc"] = to_json(slope);
                    r.result["a1_over_t"] = s.a1 / tl;
                    r.result["a2_over_2t"] = s.a2 / (2 * tl);
                    r.result["b_residual_scaled"] = model_B_residual(fit.alpha, fit.beta, tl) * tl * tl / std::log(tl);
                    r.result["minus_beta_squared"] = -fit.beta * fit.beta;
                }
            }
            if (code != ok) {
                err << "integration stopped before t_end: " << to_string(traj.reason);
                if (traj.event) err << " (t0 ~ " << format_double(traj.event->t0_estimate) << ", " << traj.event->side << ")";
                err << "\n";
            }
        }
        emit(r, output, out);
        return code;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    }
}

} // namespace cohom::cli
