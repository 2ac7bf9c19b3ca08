#include "nfarray/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "nfarray/acceptance.hpp"
#include "nfarray/bandgap.hpp"
#include "nfarray/constants.hpp"

namespace nfa {

using nlohmann::json;

namespace {

constexpr double kTwoPiMHz = 2 * phys::pi * 1e6;

// Runs fn(i) for i in [0, n) on a small thread pool; results land by index.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

RadiationOptions radiation_options(const ScenarioConfig& cfg) {
    RadiationOptions opt;
    opt.m_truncation_tol = cfg.tolerances.m_truncation_tol;
    return opt;
}

// Atom positions from run.r_over_a_range, or the single configured r.
std::vector<double> r_grid(const ScenarioConfig& cfg, bool allow_inside = false) {
    if (!cfg.run.contains("r_over_a_range")) return {cfg.r};
    const json& v = cfg.run.at("r_over_a_range");
    if (!v.is_object() || !v.contains("start") || !v.contains("stop") || !v.contains("step") ||
        !v.at("start").is_number() || !v.at("stop").is_number() || !v.at("step").is_number())
        throw ConfigError("run.r_over_a_range", "must be an object {start, stop, step} of numbers");
    const Range r{v.at("start").get<double>(), v.at("stop").get<double>(), v.at("step").get<double>()};
    if (!(r.step > 0) || r.stop < r.start) throw ConfigError("run.r_over_a_range", "needs step > 0 and stop >= start");
    std::vector<double> out;
    for (double x : r.values()) {
        if (!allow_inside && !(x > 1.0))
            throw ConfigError("run.r_over_a_range", "atom positions must satisfy r/a > 1");
        out.push_back(x * cfg.fiber.radius);
    }
    return out;
}

json mode_summary(const ModeSolution& m) {
    return {{"beta_per_m", m.beta},   {"v_group_over_c", m.v_group / phys::c},
            {"v_phase_over_c", m.v_phase / phys::c}, {"s", m.s_param},
            {"C", m.norm_C},          {"eigen_residual", m.residual},
            {"single_mode", m.single_mode}};
}

void cplx_cells(cplx z, std::vector<std::string>& row) {
    row.push_back(fmt_num(z.real()));
    row.push_back(fmt_num(z.imag()));
}

Channel channel_of(const ScenarioConfig& cfg) {
    if (cfg.polarization == Pol::X) return Channel::X;
    if (cfg.polarization == Pol::Y) return Channel::Y;
    throw ConfigError("field.polarization", "this command needs a quasilinear polarization (x or y)");
}

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

ScanAxis parse_axis(const std::string& s) {
    if (s == "N") return ScanAxis::N;
    if (s == "lambda" || s == "Lambda") return ScanAxis::Lambda;
    if (s == "delta") return ScanAxis::Delta;
    throw ConfigError("--axis", "expected N, lambda or delta; got '" + s + "'");
}

ResultTable cmd_mode(const ScenarioConfig& cfg) {
    const HyperfineTransition tr = cesium_d2_default();
    const ModeSolution mode = solve_mode(cfg.fiber, tr.omega0, cfg.tolerances.root_rel_tol);
    ResultTable t;
    t.meta["mode"] = mode_summary(mode);
    t.columns = {"r_over_a", "re_e_r[1/m]", "im_e_r[1/m]", "re_e_phi[1/m]", "im_e_phi[1/m]",
                 "re_e_z[1/m]",  "im_e_z[1/m]", "abs_e_r_over_abs_e_z"};
    std::vector<double> xs;
    if (cfg.run.contains("r_over_a_range")) {
        for (double r : r_grid(cfg, true)) xs.push_back(r / cfg.fiber.radius);
    } else {
        for (int i = 1; i <= 60; ++i) xs.push_back(0.05 * i);
    }
    // Rows just inside and outside the surface expose the e_r jump.
    xs.push_back(1 - 1e-9);
    xs.push_back(1 + 1e-9);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) {
        const CylVec e = profile_reference(mode, cfg.fiber, x * cfg.fiber.radius);
        std::vector<std::string> row{fmt_num(x)};
        cplx_cells(e.r, row);
        cplx_cells(e.phi, row);
        cplx_cells(e.z, row);
        row.push_back(fmt_num(std::abs(e.r) / std::abs(e.z)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

ResultTable cmd_rates(const ScenarioConfig& cfg) {
    const HyperfineTransition tr = cesium_d2_default();
    const double g0 = free_space_rate(tr);
    const std::vector<double> rs = r_grid(cfg);
    const auto models = parallel_map<AtomModel>(
        rs.size(), [&](std::size_t i) { return build_atom_model(cfg.fiber, tr, rs[i], radiation_options(cfg)); });
    ResultTable t;
    t.meta["mode"] = mode_summary(models.front().site.mode);
    t.meta["gamma0_rad_per_s"] = g0;
    t.columns = {"r_over_a",          "delta[MHz]",        "gamma_gyd[gamma0]", "gamma_rad[gamma0]",
                 "gamma[gamma0]",     "gamma_s[gamma0]",   "gamma_1d_y[gamma0]", "u0_er2[gamma0]",
                 "u0_ephi2[gamma0]",  "u0_ez2[gamma0]",    "D_circ",            "D_x",
                 "D_y"};
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const AtomModel& a = models[i];
        const DecayRates& q = a.rates;
        for (double d : cfg.detunings) {
            const ScatteringMatrix lin = scattering_matrix(a, d, Basis::Linear);
            const ScatteringMatrix circ = scattering_matrix(a, d, Basis::Circular);
            t.rows.push_back({fmt_num(rs[i] / cfg.fiber.radius), fmt_num(d / kTwoPiMHz),
                              fmt_num(q.gamma_gyd / g0), fmt_num(q.gamma_rad / g0),
                              fmt_num(q.gamma_total / g0), fmt_num(q.gamma_s / g0),
                              fmt_num(q.gamma_1d_y / g0), fmt_num(q.u0 * a.site.er * a.site.er / g0),
                              fmt_num(q.u0 * a.site.ephi * a.site.ephi / g0),
                              fmt_num(q.u0 * a.site.ez * a.site.ez / g0), fmt_num(optical_depth(circ, 0)),
                              fmt_num(optical_depth(lin, 0)), fmt_num(optical_depth(lin, 1))});
        }
    }
    return t;
}

ResultTable cmd_single(const ScenarioConfig& cfg) {
    const HyperfineTransition tr = cesium_d2_default();
    const Channel xi = channel_of(cfg);
    const std::vector<double> rs = r_grid(cfg);
    const auto models = parallel_map<AtomModel>(
        rs.size(), [&](std::size_t i) { return build_atom_model(cfg.fiber, tr, rs[i], radiation_options(cfg)); });
    ResultTable t;
    t.meta["mode"] = mode_summary(models.front().site.mode);
    t.meta["channel"] = to_string(xi);
    t.columns = {"r_over_a", "delta[MHz]", "re_R", "im_R", "re_T", "im_T", "abs_R2", "abs_T2"};
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (double d : cfg.detunings) {
            const PolarizationChannel ch = single_atom_transfer(xi, channel_scalars(models[i], d));
            std::vector<std::string> row{fmt_num(rs[i] / cfg.fiber.radius), fmt_num(d / kTwoPiMHz)};
            cplx_cells(ch.R, row);
            cplx_cells(ch.T, row);
            row.push_back(fmt_num(std::norm(ch.R)));
            row.push_back(fmt_num(std::norm(ch.T)));
            t.rows.push_back(std::move(row));
        }
    return t;
}

ResultTable cmd_scan(const ScenarioConfig& cfg, ScanAxis axis) {
    const HyperfineTransition tr = cesium_d2_default();
    const AtomModel atom = build_atom_model(cfg.fiber, tr, cfg.r, radiation_options(cfg));
    const ModeSolution& mode = atom.site.mode;
    std::vector<double> periods{cfg.period(mode)};
    if (axis == ScanAxis::Lambda) {
        if (!cfg.run.contains("lambda_range_nm"))
            throw ConfigError("run.lambda_range_nm", "required for --axis lambda ({start, stop, step} in nm)");
        const json& v = cfg.run.at("lambda_range_nm");
        if (!v.is_object() || !v.contains("start") || !v.contains("stop") || !v.contains("step"))
            throw ConfigError("run.lambda_range_nm", "must be an object {start, stop, step}");
        const Range r{v.at("start").get<double>(), v.at("stop").get<double>(), v.at("step").get<double>()};
        if (!(r.step > 0) || r.stop < r.start || !(r.start > 0))
            throw ConfigError("run.lambda_range_nm", "needs 0 < start <= stop and step > 0");
        periods.clear();
        for (double x : r.values()) periods.push_back(x * 1e-9);
    }
    if (axis == ScanAxis::N && !cfg.N_is_range && cfg.N_values.size() == 1 && cfg.N_values.front() == 1)
        std::cerr << "warning: --axis N with a single N value\n";

    ResultTable t;
    t.meta["mode"] = mode_summary(mode);
    t.meta["axis"] = axis == ScanAxis::N ? "N" : axis == ScanAxis::Lambda ? "lambda" : "delta";
    t.meta["route"] = "closed-form sinh(N theta) transfer";
    t.columns = {"N",      "Lambda[nm]",  "delta[MHz]", "P_forward_same", "P_forward_opposite",
                 "P_backward_same", "P_backward_opposite", "abs_RN2", "abs_TN2", "P_tot"};

    struct Point {
        long N;
        double Lambda, delta;
    };
    std::vector<Point> pts;
    for (long N : cfg.N_values)
        for (double L : periods)
            for (double d : cfg.detunings) pts.push_back({N, L, d});

    const auto rows = parallel_map<std::vector<std::string>>(pts.size(), [&](std::size_t i) {
        const Point& p = pts[i];
        const double beta = beta_at_detuning(mode, p.delta);
        auto resp = [&](Channel xi) {
            return array_response(channel_matrix(atom, xi, p.delta, false), beta, p.Lambda, p.N);
        };
        double pf_s, pf_o = 0, pb_s, pb_o = 0, r2, t2, ptot;
        if (cfg.polarization == Pol::X || cfg.polarization == Pol::Y) {
            const ArrayResponse a = resp(channel_of(cfg));
            pf_s = t2 = a.transmittivity;
            pb_s = r2 = a.reflectivity;
            ptot = a.P_tot;
        } else {
            const CircularResponse c = circular_response(resp(Channel::X), resp(Channel::Y));
            pf_s = c.P_forward_same;
            pf_o = c.P_forward_opposite;
            pb_s = c.P_backward_same;
            pb_o = c.P_backward_opposite;
            r2 = pb_s + pb_o;
            t2 = pf_s + pf_o;
            ptot = c.P_tot;
        }
        return std::vector<std::string>{std::to_string(p.N), fmt_num(p.Lambda * 1e9), fmt_num(p.delta / kTwoPiMHz),
                                        fmt_num(pf_s), fmt_num(pf_o), fmt_num(pb_s), fmt_num(pb_o),
                                        fmt_num(r2), fmt_num(t2), fmt_num(ptot)};
    });
    t.rows = rows;
    return t;
}

ResultTable cmd_bandgap(const ScenarioConfig& cfg) {
    const HyperfineTransition tr = cesium_d2_default();
    const AtomModel atom = build_atom_model(cfg.fiber, tr, cfg.r, radiation_options(cfg));
    const ModeSolution& mode = atom.site.mode;
    const double Lambda = cfg.period(mode);
    const double delta_lat = lattice_detuning(mode, Lambda);
    const long N = cfg.N_values.front();
    const std::string table = cfg.run.value("table", std::string("sweep"));
    if (table != "sweep" && table != "summary") throw ConfigError("run.table", "expected \"sweep\" or \"summary\"");

    ResultTable t;
    t.meta["mode"] = mode_summary(mode);
    t.meta["Lambda_nm"] = Lambda * 1e9;
    t.meta["delta_lat_mhz"] = delta_lat / kTwoPiMHz;
    t.meta["N"] = N;

    const GapReport gx = gap_report(atom, Channel::X, Lambda, delta_lat, N);
    const GapReport gy = gap_report(atom, Channel::Y, Lambda, delta_lat, N);
    const bool measure = cfg.run.value("measure_delta_flat", true) && std::abs(delta_lat) < 1e-6 * kTwoPiMHz;
    const double flat = measure ? measure_delta_flat(atom, Lambda, N) : std::nan("");

    if (table == "summary") {
        t.columns = {"channel",          "Delta_min[GHz]",      "Delta_max[GHz]",      "Delta_gap[GHz]",
                     "N_gap",            "delta_mid[GHz]",      "re_R_gap_plus",       "im_R_gap_plus",
                     "re_R_gap_minus",   "im_R_gap_minus",      "abs_Rinf2_at_plus_mid", "abs_Rinf2_at_minus_mid",
                     "gap_lo[GHz]",      "gap_hi[GHz]",         "tau_delay[ns]",       "delta_flat_estimate[MHz]",
                     "delta_flat_measured[MHz]", "validity_ratio"};
        for (const GapReport* g : {&gx, &gy}) {
            double lo = std::nan(""), hi = std::nan("");
            for (const auto& [a, b] : g->numeric_gaps)
                if (a <= g->omega_c_offset + g->delta_mid && g->omega_c_offset + g->delta_mid <= b) lo = a, hi = b;
            std::vector<std::string> row{to_string(g->xi), fmt_num(g->Delta_min / (1e3 * kTwoPiMHz)),
                                         fmt_num(g->Delta_max / (1e3 * kTwoPiMHz)),
                                         fmt_num(g->Delta_gap / (1e3 * kTwoPiMHz)), fmt_num(g->N_gap),
                                         fmt_num(g->delta_mid / (1e3 * kTwoPiMHz))};
            cplx_cells(g->R_gap_plus, row);
            cplx_cells(g->R_gap_minus, row);
            row.push_back(fmt_num(std::norm(g->R_inf_plus)));
            row.push_back(fmt_num(std::norm(g->R_inf_minus)));
            row.push_back(fmt_num(lo / (1e3 * kTwoPiMHz)));
            row.push_back(fmt_num(hi / (1e3 * kTwoPiMHz)));
            row.push_back(fmt_num(g->tau_delay * 1e9));
            const bool x = g->xi == Channel::X;
            row.push_back(x ? fmt_num(g->delta_flat_estimate / kTwoPiMHz) : "nan");
            row.push_back(x ? fmt_num(flat / kTwoPiMHz) : "nan");
            row.push_back(fmt_num(g->validity_ratio));
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    // Default sweep: -3 GHz to 3 GHz in 10 MHz steps.
    std::vector<double> deltas = cfg.detunings;
    if (!cfg.detuning_is_range) {
        deltas.clear();
        for (double mhz : Range{-3000, 3000, 10}.values()) deltas.push_back(mhz * kTwoPiMHz);
    }
    for (double d : deltas)
        if (std::abs(mismatch_phase(atom, Lambda, d, delta_lat)) >= 0.1)
            throw ConfigError("field.detuning_range_mhz",
                              "sweep leaves the region |delta - delta_lat| Lambda / v_g < 0.1");

    json gaps;
    for (const GapReport* g : {&gx, &gy})
        gaps[to_string(g->xi)] = {{"Delta_min_ghz", g->Delta_min / (1e3 * kTwoPiMHz)},
                                  {"Delta_max_ghz", g->Delta_max / (1e3 * kTwoPiMHz)},
                                  {"N_gap", g->N_gap},
                                  {"delta_mid_ghz", g->delta_mid / (1e3 * kTwoPiMHz)},
                                  {"tau_delay_ns", g->tau_delay * 1e9}};
    gaps["x"]["delta_flat_estimate_mhz"] = gx.delta_flat_estimate / kTwoPiMHz;
    if (measure) gaps["x"]["delta_flat_measured_mhz"] = flat / kTwoPiMHz;
    t.meta["gaps"] = gaps;

    t.columns = {"delta[MHz]",  "abs_RN2_x", "abs_TN2_x", "abs_Rinf2_x", "arg_Rinf_x[rad]",
                 "abs_RN2_y",   "abs_TN2_y", "abs_Rinf2_y", "arg_Rinf_y[rad]"};
    t.rows = parallel_map<std::vector<std::string>>(deltas.size(), [&](std::size_t i) {
        const double d = deltas[i];
        std::vector<std::string> row{fmt_num(d / kTwoPiMHz)};
        for (Channel xi : {Channel::X, Channel::Y}) {
            const ArrayResponse a =
                array_response(channel_matrix(atom, xi, d, false), beta_at_detuning(mode, d), Lambda, N);
            const cplx rinf = r_infinity(atom, xi, Lambda, d, delta_lat);
            row.push_back(fmt_num(a.reflectivity));
            row.push_back(fmt_num(a.transmittivity));
            row.push_back(fmt_num(std::norm(rinf)));
            row.push_back(fmt_num(std::arg(rinf)));
        }
        return row;
    });
    return t;
}

void write_csv(std::ostream& out, const std::string& command, const ScenarioConfig& cfg,
               const ResultTable& table) {
    out << "# tool: nfarray " << kVersion << "\n";
    out << "# command: " << command << "\n";
    out << "# generated: " << iso_timestamp() << "\n";
    out << "# config: " << cfg.resolved().dump() << "\n";
    for (const auto& [k, v] : table.meta.items()) out << "# " << k << ": " << v.dump() << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

namespace {

void error_line(const std::string& kind, const std::string& field, const std::string& message) {
    json j{{"error", kind}, {"message", message}};
    if (!field.empty()) j["field"] = field;
    std::cerr << j.dump() << std::endl;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Guided light through atom arrays near an optical nanofiber"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path, out_path, axis = "N";
    int criterion = 0;
    std::vector<CLI::App*> table_cmds;
    for (const char* name : {"mode", "rates", "single", "scan", "bandgap"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario JSON file")->required();
        sub->add_option("--out", out_path, "output CSV path (default stdout)");
        if (std::string(name) == "scan") sub->add_option("--axis", axis, "N | lambda | delta");
        table_cmds.push_back(sub);
    }
    CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the acceptance criteria");
    selfcheck->add_option("--criterion", criterion, "run a single criterion (1-10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        error_line("usage", "", e.what());
        return 2;
    }

    try {
        if (selfcheck->parsed()) {
            if (criterion < 0 || criterion > 10) throw ConfigError("--criterion", "must be in 1..10");
            const auto results = run_acceptance(std::cout, criterion);
            bool ok = true;
            for (const auto& r : results) ok = ok && r.pass;
            return ok ? 0 : 1;
        }
        const ScenarioConfig cfg = load_scenario(config_path);
        std::string command;
        ResultTable table;
        for (CLI::App* sub : table_cmds) {
            if (!sub->parsed()) continue;
            command = sub->get_name();
            if (command == "mode") table = cmd_mode(cfg);
            else if (command == "rates") table = cmd_rates(cfg);
            else if (command == "single") table = cmd_single(cfg);
            else if (command == "scan") table = cmd_scan(cfg, parse_axis(axis));
            else table = cmd_bandgap(cfg);
        }
        if (out_path.empty()) {
            write_csv(std::cout, command, cfg, table);
        } else {
            std::ofstream f(out_path);
            if (!f) throw ConfigError("--out", "cannot open '" + out_path + "' for writing");
            write_csv(f, command, cfg, table);
        }
        return 0;
    } catch (const ConfigError& e) {
        error_line("config", e.field, e.what());
        return 2;
    } catch (const std::exception& e) {
        error_line("computation", "", e.what());
        return 3;
    }
}

}  // namespace nfa
