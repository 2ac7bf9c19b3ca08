#include "nfarray/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nfarray/array.hpp"
#include "nfarray/atoms.hpp"
#include "nfarray/constants.hpp"

namespace nfa {

using nlohmann::json;

namespace {

const json& section(const json& doc, const char* name) {
    static const json empty = json::object();
    if (!doc.contains(name)) return empty;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ConfigError(name, "must be an object");
    return s;
}

void reject_unknown(const json& sec, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : sec.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(path + "." + key, "unknown field");
    }
}

double number(const json& sec, const std::string& path, const char* key) {
    const json& v = sec.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path + "." + key, "must be finite");
    return x;
}

Range range(const json& sec, const std::string& path, const char* key) {
    const json& v = sec.at(key);
    const std::string p = path + "." + key;
    if (!v.is_object()) throw ConfigError(p, "must be an object {start, stop, step}");
    reject_unknown(v, p, {"start", "stop", "step"});
    for (const char* k : {"start", "stop", "step"})
        if (!v.contains(k)) throw ConfigError(p + "." + k, "missing");
    Range r{number(v, p, "start"), number(v, p, "stop"), number(v, p, "step")};
    if (!(r.step > 0)) throw ConfigError(p + ".step", "must be positive");
    if (r.stop < r.start) throw ConfigError(p, "stop must not be below start");
    if ((r.stop - r.start) / r.step > 1e7) throw ConfigError(p, "more than 1e7 points");
    return r;
}

}  // namespace

std::vector<double> Range::values() const {
    std::vector<double> out;
    const long n = long(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + step * double(i));
    return out;
}

Pol parse_polarization(const std::string& s) {
    if (s == "x") return Pol::X;
    if (s == "y") return Pol::Y;
    if (s == "circ+" || s == "circ−" || s == "circ-") return s == "circ+" ? Pol::CircPlus : Pol::CircMinus;
    throw ConfigError("field.polarization", "expected one of circ+, circ-, x, y; got '" + s + "'");
}

double ScenarioConfig::period(const ModeSolution& mode) const {
    if (period_nm) return *period_nm * 1e-9;
    return bragg_period(mode, bragg_order.value_or(2));
}

ScenarioConfig parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    reject_unknown(doc, "<root>", {"fiber", "atom", "array", "field", "run", "tolerances"});
    ScenarioConfig c;

    const json& fib = section(doc, "fiber");
    reject_unknown(fib, "fiber", {"radius_nm", "n1", "n2"});
    if (fib.contains("radius_nm")) c.fiber.radius = number(fib, "fiber", "radius_nm") * 1e-9;
    if (fib.contains("n2")) c.fiber.n2 = number(fib, "fiber", "n2");
    if (fib.contains("n1")) {
        const json& v = fib.at("n1");
        if (v.is_string() && v.get<std::string>() == "sellmeier") {
            c.fiber.n1 = sellmeier_silica(cesium_d2_default().wavelength());
            c.n1_source = "sellmeier";
        } else if (v.is_number()) {
            c.fiber.n1 = v.get<double>();
            c.n1_source = "explicit";
        } else {
            throw ConfigError("fiber.n1", "must be a number or \"sellmeier\"");
        }
    }
    try {
        c.fiber.validate();
    } catch (const std::exception& e) {
        throw ConfigError("fiber", e.what());
    }

    const json& atom = section(doc, "atom");
    reject_unknown(atom, "atom", {"species", "r_minus_a_nm", "r_over_a"});
    if (atom.contains("species")) {
        if (!atom.at("species").is_string() || atom.at("species").get<std::string>() != "cesium_d2")
            throw ConfigError("atom.species", "only \"cesium_d2\" is supported");
    }
    if (atom.contains("r_minus_a_nm") && atom.contains("r_over_a"))
        throw ConfigError("atom.r_minus_a_nm,atom.r_over_a", "give exactly one of r_minus_a_nm and r_over_a");
    if (atom.contains("r_over_a")) {
        c.r_over_a = number(atom, "atom", "r_over_a");
        c.r = *c.r_over_a * c.fiber.radius;
    } else {
        c.r_minus_a_nm = atom.contains("r_minus_a_nm") ? number(atom, "atom", "r_minus_a_nm") : 200.0;
        c.r = c.fiber.radius + *c.r_minus_a_nm * 1e-9;
    }
    if (!(c.r > c.fiber.radius))
        throw ConfigError(c.r_over_a ? "atom.r_over_a" : "atom.r_minus_a_nm", "atom must sit outside the fiber");

    const json& arr = section(doc, "array");
    reject_unknown(arr, "array", {"N", "N_range", "period_nm", "bragg_order"});
    if (arr.contains("N") && arr.contains("N_range"))
        throw ConfigError("array.N,array.N_range", "give exactly one of N and N_range");
    if (arr.contains("N_range")) {
        c.N_values.clear();
        for (double v : range(arr, "array", "N_range").values()) c.N_values.push_back(std::lround(v));
        c.N_is_range = true;
    } else if (arr.contains("N")) {
        const json& v = arr.at("N");
        if (!v.is_number_integer()) throw ConfigError("array.N", "must be an integer");
        c.N_values = {v.get<long>()};
    }
    for (long n : c.N_values)
        if (n < 1) throw ConfigError(c.N_is_range ? "array.N_range" : "array.N", "N must be >= 1");
    if (arr.contains("period_nm") && arr.contains("bragg_order"))
        throw ConfigError("array.period_nm,array.bragg_order", "give exactly one of period_nm and bragg_order");
    if (arr.contains("period_nm")) {
        c.period_nm = number(arr, "array", "period_nm");
        if (!(*c.period_nm > 0)) throw ConfigError("array.period_nm", "must be positive");
    } else {
        c.bragg_order = 2;
        if (arr.contains("bragg_order")) {
            const json& v = arr.at("bragg_order");
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw ConfigError("array.bragg_order", "must be a positive integer");
            c.bragg_order = v.get<int>();
        }
    }

    const json& fld = section(doc, "field");
    reject_unknown(fld, "field", {"polarization", "detuning_mhz", "detuning_range_mhz"});
    if (fld.contains("polarization")) {
        if (!fld.at("polarization").is_string()) throw ConfigError("field.polarization", "must be a string");
        c.polarization = parse_polarization(fld.at("polarization").get<std::string>());
    }
    if (fld.contains("detuning_mhz") && fld.contains("detuning_range_mhz"))
        throw ConfigError("field.detuning_mhz,field.detuning_range_mhz",
                          "give exactly one of detuning_mhz and detuning_range_mhz");
    const double to_rad = 2 * phys::pi * 1e6;
    if (fld.contains("detuning_range_mhz")) {
        for (double v : range(fld, "field", "detuning_range_mhz").values()) c.detunings.push_back(v * to_rad);
        c.detuning_is_range = true;
    } else {
        c.detunings = {fld.contains("detuning_mhz") ? number(fld, "field", "detuning_mhz") * to_rad : 0.0};
    }

    if (doc.contains("run")) {
        if (!doc.at("run").is_object()) throw ConfigError("run", "must be an object");
        c.run = doc.at("run");
    }

    const json& tol = section(doc, "tolerances");
    reject_unknown(tol, "tolerances", {"root_rel_tol", "quad_rel_tol", "series_abs_tol", "m_truncation_tol"});
    if (tol.contains("root_rel_tol")) c.tolerances.root_rel_tol = number(tol, "tolerances", "root_rel_tol");
    if (tol.contains("quad_rel_tol")) c.tolerances.quad_rel_tol = number(tol, "tolerances", "quad_rel_tol");
    if (tol.contains("series_abs_tol")) c.tolerances.series_abs_tol = number(tol, "tolerances", "series_abs_tol");
    if (tol.contains("m_truncation_tol"))
        c.tolerances.m_truncation_tol = number(tol, "tolerances", "m_truncation_tol");
    try {
        c.tolerances.validate();
    } catch (const std::exception& e) {
        throw ConfigError("tolerances", e.what());
    }
    return c;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + long(upto), '\n');
        throw ConfigError("<line " + std::to_string(line) + ">", e.what());
    }
    return parse_scenario(doc);
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

namespace {

// Metres to nanometres, rounded to 1e-6 nm to drop binary noise.
double nm(double metres) { return std::round(metres * 1e15) / 1e6; }

}  // namespace

json ScenarioConfig::resolved() const {
    json j;
    j["fiber"] = json{{"radius_nm", nm(fiber.radius)}, {"n1", fiber.n1}, {"n1_source", n1_source}, {"n2", fiber.n2}};
    j["atom"] = json{{"species", species}, {"r_nm", nm(r)}, {"r_over_a", std::round(r / fiber.radius * 1e12) / 1e12},
                 {"r_minus_a_nm", nm(r - fiber.radius)}};
    json a;
    if (N_is_range) a["N_values"] = N_values;
    else a["N"] = N_values.front();
    if (period_nm) a["period_nm"] = *period_nm;
    else a["bragg_order"] = *bragg_order;
    j["array"] = a;
    std::vector<double> mhz;
    for (double d : detunings) mhz.push_back(d / (2 * phys::pi * 1e6));
    j["field"] = json{{"polarization", to_string(polarization)}, {"detunings_mhz", mhz}};
    j["run"] = run;
    j["tolerances"] = json{{"root_rel_tol", tolerances.root_rel_tol},
                       {"quad_rel_tol", tolerances.quad_rel_tol},
                       {"series_abs_tol", tolerances.series_abs_tol},
                       {"m_truncation_tol", tolerances.m_truncation_tol}};
    return j;
}

}  // namespace nfa
