// SPDX-License-Identifier: Apache-2.0
#include "airs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "airs/noma.hpp"
#include "airs/oracle.hpp"
#include "airs/passive.hpp"
#include "airs/tdma.hpp"

namespace airs::harness {

SchemeKind parse_scheme(const std::string& name) {
    if (name == "tdma") return SchemeKind::tdma;
    if (name == "tdma_single") return SchemeKind::tdma_single;
    if (name == "noma") return SchemeKind::noma;
    if (name == "hybrid") return SchemeKind::hybrid;
    if (name == "passive" || name == "passive_simplified") return SchemeKind::passive;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

const char* to_string(SchemeKind s) {
    switch (s) {
    case SchemeKind::tdma: return "tdma";
    case SchemeKind::tdma_single: return "tdma_single";
    case SchemeKind::noma: return "noma";
    case SchemeKind::hybrid: return "hybrid";
    case SchemeKind::passive: return "passive_simplified";
    }
    return "?";
}

namespace {

const std::vector<std::string> kAxes{"K", "N", "E", "P_r", "P_r_dbm", "x_d", "x_irs", "L"};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

void add_flag(std::string& flags, const std::string& f) {
    if (flags.find(f) != std::string::npos) return;
    if (!flags.empty()) flags += ';';
    flags += f;
}

void add_status(std::string& flags, SolveStatus s) {
    if (s != SolveStatus::optimal) add_flag(flags, to_string(s));
}

} // namespace

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

void SweepConfig::validate() const {
    base.validate();
    opts.validate();
    if (std::find(kAxes.begin(), kAxes.end(), axis) == kAxes.end())
        throw std::invalid_argument("SweepConfig: unknown axis '" + axis + "'");
    if (values.empty()) throw std::invalid_argument("SweepConfig: no axis values");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("SweepConfig: non-finite axis value");
    if (seeds < 1) throw std::invalid_argument("SweepConfig: seeds must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("SweepConfig: no schemes");
    if (workers < 1) throw std::invalid_argument("SweepConfig: workers must be >= 1");
    for (double v : values) scenario_at(v).validate();
}

Scenario SweepConfig::scenario_at(double value) const {
    Scenario sc = base;
    if (axis == "K") sc.set_device_count(static_cast<int>(std::lround(value)));
    else if (axis == "N") sc.N = static_cast<int>(std::lround(value));
    else if (axis == "E") sc.E.assign(static_cast<std::size_t>(sc.K), value);
    else if (axis == "P_r") sc.P_r = value;
    else if (axis == "P_r_dbm") sc.P_r = dbm_to_watt(value);
    else if (axis == "x_d") sc.device_center[0] = value;
    else if (axis == "x_irs") sc.irs_pos[0] = value;
    return sc;
}

SweepConfig parse_sweep_config(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    pt::ini_parser::read_ini(is, tree);
    SweepConfig cfg;

    std::map<std::string, std::string> kv;
    std::string preset_name = "paper-v";
    if (auto sc = tree.get_child_optional("scenario")) {
        for (const auto& [key, node] : *sc) kv[key] = node.data();
        if (kv.count("preset")) preset_name = kv["preset"];
    }
    cfg.base = Scenario::from_key_values(kv, preset(preset_name));

    if (auto sw = tree.get_child_optional("sweep")) {
        for (const auto& [key, node] : *sw) {
            const std::string& val = node.data();
            if (key == "axis") cfg.axis = val;
            else if (key == "values") {
                cfg.values.clear();
                for (const auto& s : split(val)) cfg.values.push_back(std::stod(s));
            } else if (key == "seeds") cfg.seeds = std::stoi(val);
            else if (key == "seed_base") cfg.seed_base = std::stoull(val);
            else if (key == "schemes") {
                cfg.schemes.clear();
                for (const auto& s : split(val)) cfg.schemes.push_back(parse_scheme(s));
            } else if (key == "L") {
                cfg.L_values.clear();
                for (const auto& s : split(val)) cfg.L_values.push_back(std::stoi(s));
            } else if (key == "grouping") cfg.grouping = hybrid::parse_strategy(val);
            else if (key == "workers") cfg.workers = std::stoi(val);
            else if (key == "output") cfg.output = val;
            else if (key == "record_timing") cfg.record_timing = val == "true" || val == "1" || val == "yes";
            else throw std::invalid_argument("unknown [sweep] key '" + key + "'");
        }
    }
    if (auto so = tree.get_child_optional("solver")) {
        for (const auto& [key, node] : *so) {
            const std::string& val = node.data();
            if (key == "restarts") cfg.opts.restarts = std::stoi(val);
            else if (key == "sca_tol") cfg.opts.sca_tol = std::stod(val);
            else if (key == "sca_max_iter") cfg.opts.sca_max_iter = std::stoi(val);
            else if (key == "ao_tol") cfg.opts.ao_tol = std::stod(val);
            else if (key == "ao_max_iter") cfg.opts.ao_max_iter = std::stoi(val);
            else if (key == "inner_sca_max_iter") cfg.opts.inner_sca_max_iter = std::stoi(val);
            else if (key == "tol_gap") cfg.opts.tol_gap = std::stod(val);
            else if (key == "sdp_tol") cfg.opts.sdp_tol = std::stod(val);
            else if (key == "randomization_samples") cfg.opts.randomization_samples = std::stoi(val);
            else if (key == "seed") cfg.opts.seed = std::stoull(val);
            else if (key == "group_workers") cfg.opts.group_workers = std::stoi(val);
            else if (key == "noma_single_beam_start")
                cfg.opts.noma_single_beam_start = val == "true" || val == "1" || val == "yes";
            else if (key == "device_starts")
                cfg.opts.device_starts = val == "true" || val == "1" || val == "yes";
            else throw std::invalid_argument("unknown [solver] key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_sweep_config(in);
}

std::string config_json(const SweepConfig& cfg) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : cfg.base.to_key_values()) j["scenario"][k] = v;
    auto& sw = j["sweep"];
    sw["axis"] = cfg.axis;
    sw["values"] = cfg.values;
    sw["seeds"] = cfg.seeds;
    sw["seed_base"] = cfg.seed_base;
    std::vector<std::string> schemes;
    for (auto s : cfg.schemes) schemes.emplace_back(to_string(s));
    sw["schemes"] = schemes;
    sw["L"] = cfg.L_values;
    sw["grouping"] = hybrid::to_string(cfg.grouping);
    sw["workers"] = cfg.workers;
    sw["output"] = cfg.output;
    sw["record_timing"] = cfg.record_timing;
    auto& so = j["solver"];
    so["restarts"] = cfg.opts.restarts;
    so["sca_tol"] = cfg.opts.sca_tol;
    so["sca_max_iter"] = cfg.opts.sca_max_iter;
    so["ao_tol"] = cfg.opts.ao_tol;
    so["ao_max_iter"] = cfg.opts.ao_max_iter;
    so["inner_sca_max_iter"] = cfg.opts.inner_sca_max_iter;
    so["tol_gap"] = cfg.opts.tol_gap;
    so["sdp_tol"] = cfg.opts.sdp_tol;
    so["randomization_samples"] = cfg.opts.randomization_samples;
    so["seed"] = cfg.opts.seed;
    so["group_workers"] = cfg.opts.group_workers;
    so["noma_single_beam_start"] = cfg.opts.noma_single_beam_start;
    so["device_starts"] = cfg.opts.device_starts;
    return j.dump(2);
}

RunRecord solve_point(const Scenario& sc, std::uint64_t seed, SchemeKind scheme, int L,
                      hybrid::GroupingStrategy grouping, const SolverOptions& opts) {
    RunRecord rec;
    rec.scenario_hash = sc.hash();
    rec.seed = seed;
    rec.scheme = to_string(scheme);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const ChannelSet ch = generate_channels(sc, seed);
        switch (scheme) {
        case SchemeKind::tdma:
        case SchemeKind::tdma_single:
        case SchemeKind::passive: {
            const tdma::TdmaSolution s = scheme == SchemeKind::tdma ? tdma::solve_tdma(ch, sc, opts)
                                         : scheme == SchemeKind::tdma_single
                                             ? tdma::solve_tdma_single_beam(ch, sc, opts)
                                             : solve_passive_baseline(ch, sc, opts);
            rec.L = sc.K;
            rec.objective = s.objective;
            rec.iterations = s.iterations;
            rec.overhead = static_cast<long>(s.shared_beam ? 1 : sc.K) * sc.N;
            add_status(rec.flags, s.status);
            break;
        }
        case SchemeKind::noma: {
            const noma::NomaSolution s = noma::solve_noma(ch, sc, opts);
            rec.L = 1;
            rec.objective = s.objective;
            rec.iterations = s.iterations;
            rec.overhead = sc.N;
            if (!s.sdp_rank_exact) add_flag(rec.flags, "rank_fallback");
            add_status(rec.flags, s.status);
            break;
        }
        case SchemeKind::hybrid: {
            const hybrid::Grouping g = hybrid::partition_devices(ch, sc, L, grouping, seed, opts);
            const hybrid::HybridSolution s = hybrid::solve_hybrid(ch, sc, g, opts);
            rec.L = L;
            rec.objective = s.objective;
            rec.iterations = s.iterations;
            rec.overhead = hybrid::signaling_overhead(g, sc.N);
            if (!s.sdp_rank_exact) add_flag(rec.flags, "rank_fallback");
            if (s.skipped_slots > 0) add_flag(rec.flags, "skipped_slot");
            add_status(rec.flags, s.status);
            break;
        }
        }
    } catch (const std::exception& e) {
        std::string what = e.what();
        std::replace(what.begin(), what.end(), ',', ' ');
        std::replace(what.begin(), what.end(), ';', ' ');
        rec.objective = 0.0;
        add_flag(rec.flags, "error:" + what);
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<RunRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    struct Task {
        double value;
        std::uint64_t seed;
        SchemeKind scheme;
        int L;
    };
    std::vector<Task> tasks;
    for (double value : cfg.values)
        for (int s = 0; s < cfg.seeds; ++s)
            for (SchemeKind scheme : cfg.schemes) {
                const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(s);
                if (cfg.axis == "L") {
                    tasks.push_back({value, seed, scheme, static_cast<int>(std::lround(value))});
                } else if (scheme == SchemeKind::hybrid) {
                    for (int L : cfg.L_values) tasks.push_back({value, seed, scheme, L});
                } else {
                    tasks.push_back({value, seed, scheme, 0});
                }
            }

    std::vector<RunRecord> records(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), cfg.workers, [&](int i) {
        const Task& t = tasks[i];
        RunRecord r = solve_point(cfg.scenario_at(t.value), t.seed, t.scheme, t.L, cfg.grouping, cfg.opts);
        r.axis = cfg.axis;
        r.axis_value = t.value;
        if (!cfg.record_timing) r.wall_time = 0.0;
        records[i] = std::move(r);
    });
    return records;
}

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os << "scenario_hash,axis,axis_value,seed,scheme,L,objective,iterations,wall_time,overhead,flags\n";
    for (const auto& r : records) {
        char hash[24];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.scenario_hash));
        os << hash << ',' << r.axis << ',' << fmt(r.axis_value) << ',' << r.seed << ',' << r.scheme << ',' << r.L
           << ',' << fmt(r.objective) << ',' << r.iterations << ',' << fmt(r.wall_time) << ',' << r.overhead << ','
           << r.flags << '\n';
    }
}

std::vector<CompareRow> compare_schemes(const ChannelSet& ch, const Scenario& sc, const std::vector<int>& L_values,
                                        hybrid::GroupingStrategy grouping, const SolverOptions& opts) {
    std::vector<CompareRow> rows;
    rows.push_back({"tdma", sc.K, tdma::solve_tdma(ch, sc, opts).objective, static_cast<long>(sc.K) * sc.N});
    rows.push_back({"noma", 1, noma::solve_noma(ch, sc, opts).objective, static_cast<long>(sc.N)});
    for (int L : L_values) {
        const hybrid::Grouping g = hybrid::partition_devices(ch, sc, L, grouping, opts.seed, opts);
        rows.push_back({"hybrid", L, hybrid::solve_hybrid(ch, sc, g, opts).objective, hybrid::signaling_overhead(g, sc.N)});
    }
    return rows;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
    os << "scheme,L,objective,overhead\n";
    for (const auto& r : rows) os << r.scheme << ',' << r.L << ',' << fmt(r.objective) << ',' << r.overhead << '\n';
}

std::vector<VerifyRecord> run_verify(int instances, int workers, const SolverOptions& opts) {
    Scenario sc = preset("paper-v");
    sc.set_device_count(2);
    sc.N = 2;
    oracle::GridSpec grid;
    const hybrid::Grouping singles = hybrid::partition_devices(2, 2, hybrid::GroupingStrategy::round_robin);

    std::vector<std::vector<VerifyRecord>> per(static_cast<std::size_t>(std::max(instances, 0)));
    parallel_for(instances, workers, [&](int i) {
        const std::uint64_t seed = static_cast<std::uint64_t>(i) + 1;
        const ChannelSet ch = generate_channels(sc, seed);
        auto& out = per[i];
        auto check = [&](const std::string& name, double value, double reference, bool pass) {
            out.push_back({name, seed, value, reference, pass});
        };
        auto monotone = [](const std::vector<double>& t) {
            for (std::size_t j = 1; j < t.size(); ++j)
                if (t[j] < t[j - 1] - 1e-9) return false;
            return true;
        };

        const auto td = tdma::solve_tdma(ch, sc, opts);
        const auto nm = noma::solve_noma(ch, sc, opts);
        const auto hy = hybrid::solve_hybrid(ch, sc, singles, opts);
        const auto sb = tdma::solve_tdma_single_beam(ch, sc, opts);
        const auto g_td = oracle::brute_force(ch, sc, oracle::Scheme::tdma, grid);
        const auto g_nm = oracle::brute_force(ch, sc, oracle::Scheme::noma, grid);
        const auto g_hy = oracle::brute_force(ch, sc, oracle::Scheme::hybrid, grid, &singles);

        check("tdma_vs_grid", td.objective, g_td.objective, td.objective >= 0.98 * g_td.objective);
        check("noma_vs_grid", nm.objective, g_nm.objective, nm.objective >= 0.98 * g_nm.objective);
        check("hybrid_vs_grid", hy.objective, g_hy.objective, hy.objective >= 0.98 * g_hy.objective);
        double depletion = 0.0;
        for (int k = 0; k < sc.K; ++k) depletion = std::max(depletion, std::abs(td.tau[k] * td.p[k] - sc.E[k]) / sc.E[k]);
        check("tdma_energy_depletion", depletion, 1e-6, depletion <= 1e-6);
        check("noma_full_duration", nm.tau, sc.T_max, nm.tau == sc.T_max);
        check("noma_ge_single_beam_tdma", nm.objective, sb.objective, nm.objective >= sb.objective - 1e-6);
        check("tdma_trace_monotone", td.trace.back(), td.trace.front(), monotone(td.trace));
        check("noma_trace_monotone", nm.ao_trace.back(), nm.ao_trace.front(), monotone(nm.ao_trace));
        check("hybrid_trace_monotone", hy.ao_trace.back(), hy.ao_trace.front(), monotone(hy.ao_trace));
    });
    std::vector<VerifyRecord> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    return all;
}

void write_verify_csv(std::ostream& os, const std::vector<VerifyRecord>& records) {
    os << "check,seed,value,reference,pass\n";
    for (const auto& r : records)
        os << r.check << ',' << r.seed << ',' << fmt(r.value) << ',' << fmt(r.reference) << ','
           << (r.pass ? "true" : "false") << '\n';
}

} // namespace airs::harness
