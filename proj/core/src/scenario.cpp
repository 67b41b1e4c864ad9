// SPDX-License-Identifier: Apache-2.0
#include "airs/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "airs/options.hpp"
#include "airs/types.hpp"

namespace airs {

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::infeasible_start: return "infeasible_start";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
    case SolveStatus::line_search_stall: return "line_search_stall";
    case SolveStatus::numerical_error: return "numerical_error";
    }
    return "unknown";
}

void SolverOptions::validate() const {
    if (!(tol_gap > 0.0)) throw std::invalid_argument("SolverOptions: tol_gap must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverOptions: max_iter must be >= 1");
    if (!(barrier_growth > 1.0)) throw std::invalid_argument("SolverOptions: barrier_growth must be > 1");
    if (!(sdp_tol > 0.0)) throw std::invalid_argument("SolverOptions: sdp_tol must be > 0");
    if (!(rank_one_ratio > 0.0 && rank_one_ratio <= 1.0))
        throw std::invalid_argument("SolverOptions: rank_one_ratio must be in (0, 1]");
    if (restarts < 1) throw std::invalid_argument("SolverOptions: restarts must be >= 1");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

namespace {

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_point(const Point3& p) {
    return fmt_double(p[0]) + "," + fmt_double(p[1]) + "," + fmt_double(p[2]);
}

double parse_double(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("scenario key '" + key + "': not a number: '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("scenario key '" + key + "': trailing characters in '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(parse_double(key, item.substr(b, e - b + 1)));
    }
    return out;
}

Point3 parse_point(const std::string& key, const std::string& s) {
    auto v = parse_list(key, s);
    if (v.size() != 3) throw std::invalid_argument("scenario key '" + key + "': expected x,y,z");
    return {v[0], v[1], v[2]};
}

int parse_int(const std::string& key, const std::string& s) {
    const double d = parse_double(key, s);
    if (d != std::floor(d)) throw std::invalid_argument("scenario key '" + key + "': expected integer");
    return static_cast<int>(d);
}

} // namespace

void Scenario::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("Scenario: " + m); };
    if (K < 1) fail("K must be >= 1");
    if (N < 1) fail("N must be >= 1");
    if (!(T_max > 0.0)) fail("T_max must be > 0");
    if (static_cast<int>(E.size()) != K) fail("E must have K entries");
    for (double e : E)
        if (!(e > 0.0) || !std::isfinite(e)) fail("every E_k must be finite and > 0");
    if (!(P_r > 0.0)) fail("P_r must be > 0");
    if (!(sigma2 > 0.0)) fail("sigma2 must be > 0");
    if (!(sigma_r2 >= 0.0)) fail("sigma_r2 must be >= 0");
    if (!(alpha_ris > 0.0) || !(alpha_direct > 0.0)) fail("path-loss exponents must be > 0");
    if (!(device_radius >= 0.0)) fail("device_radius must be >= 0");
    for (const auto* p : {&ap_pos, &irs_pos, &device_center})
        for (double c : *p)
            if (!std::isfinite(c)) fail("positions must be finite");
}

void Scenario::set_device_count(int k, double energy) {
    K = k;
    const double fill = energy > 0.0 ? energy : (E.empty() ? 0.01 : E.front());
    E.assign(static_cast<std::size_t>(std::max(k, 0)), fill);
}

std::map<std::string, std::string> Scenario::to_key_values() const {
    std::map<std::string, std::string> kv;
    kv["ap_pos"] = fmt_point(ap_pos);
    kv["irs_pos"] = fmt_point(irs_pos);
    kv["device_center"] = fmt_point(device_center);
    kv["device_radius"] = fmt_double(device_radius);
    kv["K"] = std::to_string(K);
    kv["N"] = std::to_string(N);
    kv["T_max"] = fmt_double(T_max);
    std::string e;
    for (std::size_t i = 0; i < E.size(); ++i) e += (i ? "," : "") + fmt_double(E[i]);
    kv["E"] = e;
    kv["P_r"] = fmt_double(P_r);
    kv["sigma2"] = fmt_double(sigma2);
    kv["sigma_r2"] = fmt_double(sigma_r2);
    kv["alpha_ris"] = fmt_double(alpha_ris);
    kv["alpha_direct"] = fmt_double(alpha_direct);
    kv["ref_loss_db"] = fmt_double(ref_loss_db);
    return kv;
}

Scenario Scenario::from_key_values(const std::map<std::string, std::string>& kv, const Scenario& base) {
    Scenario sc = base;
    std::vector<double> energies;
    bool have_energy = false;
    for (const auto& [key, val] : kv) {
        if (key == "ap_pos") sc.ap_pos = parse_point(key, val);
        else if (key == "irs_pos") sc.irs_pos = parse_point(key, val);
        else if (key == "x_irs") sc.irs_pos[0] = parse_double(key, val);
        else if (key == "device_center") sc.device_center = parse_point(key, val);
        else if (key == "x_d") sc.device_center[0] = parse_double(key, val);
        else if (key == "device_radius") sc.device_radius = parse_double(key, val);
        else if (key == "K") sc.K = parse_int(key, val);
        else if (key == "N") sc.N = parse_int(key, val);
        else if (key == "T_max") sc.T_max = parse_double(key, val);
        else if (key == "E") { energies = parse_list(key, val); have_energy = true; }
        else if (key == "P_r") sc.P_r = parse_double(key, val);
        else if (key == "P_r_dbm") sc.P_r = dbm_to_watt(parse_double(key, val));
        else if (key == "sigma2") sc.sigma2 = parse_double(key, val);
        else if (key == "sigma2_dbm") sc.sigma2 = dbm_to_watt(parse_double(key, val));
        else if (key == "sigma_r2") sc.sigma_r2 = parse_double(key, val);
        else if (key == "sigma_r2_dbm") sc.sigma_r2 = dbm_to_watt(parse_double(key, val));
        else if (key == "alpha_ris") sc.alpha_ris = parse_double(key, val);
        else if (key == "alpha_direct") sc.alpha_direct = parse_double(key, val);
        else if (key == "ref_loss_db") sc.ref_loss_db = parse_double(key, val);
        else if (key == "preset") continue;
        else throw std::invalid_argument("unknown scenario key '" + key + "'");
    }
    if (have_energy) {
        if (energies.size() == 1) sc.E.assign(static_cast<std::size_t>(sc.K), energies.front());
        else sc.E = energies;
    } else if (static_cast<int>(sc.E.size()) != sc.K) {
        sc.set_device_count(sc.K);
    }
    sc.validate();
    return sc;
}

std::uint64_t Scenario::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [k, v] : to_key_values()) {
        for (char c : k + "=" + v + ";") {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

Scenario preset(const std::string& name) {
    if (name == "paper-v" || name == "default") {
        Scenario sc;
        sc.sigma2 = dbm_to_watt(-75.0);
        sc.sigma_r2 = dbm_to_watt(-75.0);
        sc.P_r = dbm_to_watt(0.0);
        sc.set_device_count(10, 0.01);
        return sc;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

} // namespace airs
