// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "airs/channel.hpp"
#include "airs/harness.hpp"
#include "airs/hybrid.hpp"
#include "airs/scenario.hpp"

using namespace airs;

namespace {

struct Common {
    std::string preset = "paper-v";
    std::vector<std::string> overrides;
    std::string out;
    std::string json;
    int workers = 1;
};

Scenario resolve_scenario(const Common& c) {
    Scenario sc = preset(c.preset);
    std::map<std::string, std::string> kv;
    for (const auto& item : c.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    if (!kv.empty()) sc = Scenario::from_key_values(kv, sc);
    sc.validate();
    return sc;
}

/// CSV to --out (or stdout); JSON echo to --json (or stderr).
class Sink {
public:
    explicit Sink(const Common& c) {
        if (!c.out.empty()) {
            file_ = std::make_unique<std::ofstream>(c.out);
            if (!*file_) throw std::runtime_error("cannot open " + c.out);
        }
        json_path_ = c.json;
    }
    std::ostream& csv() { return file_ ? *file_ : std::cout; }
    void echo(const harness::SweepConfig& cfg) const {
        const std::string text = harness::config_json(cfg);
        if (json_path_.empty()) {
            std::cerr << text << '\n';
            return;
        }
        std::ofstream os(json_path_);
        if (!os) throw std::runtime_error("cannot open " + json_path_);
        os << text << '\n';
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::string json_path_;
};

void add_common(CLI::App* cmd, Common& c, bool scenario) {
    if (scenario) {
        cmd->add_option("--preset", c.preset, "Named scenario defaults")->check(CLI::IsMember({"paper-v", "default"}));
        cmd->add_option("--set", c.overrides, "Scenario override key=value (repeatable), e.g. K=4 N=20 P_r_dbm=10");
    }
    cmd->add_option("--out", c.out, "CSV output path (default stdout)");
    cmd->add_option("--json", c.json, "Resolved-config JSON path (default stderr)");
    cmd->add_option("--workers", c.workers, "Concurrent solves")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-IRS uplink throughput optimizer"};
    app.require_subcommand(1);

    Common solve_c;
    std::uint64_t solve_seed = 1;
    std::string solve_scheme = "tdma";
    int solve_L = 2;
    std::string solve_grouping = "round_robin";
    std::string solve_channels;
    auto* solve = app.add_subcommand("solve", "Solve one channel draw with one scheme");
    add_common(solve, solve_c, true);
    solve->add_option("--seed", solve_seed, "Channel seed");
    solve->add_option("--scheme", solve_scheme, "tdma, tdma_single, noma, hybrid or passive");
    solve->add_option("--L", solve_L, "Group count for hybrid")->check(CLI::PositiveNumber);
    solve->add_option("--grouping", solve_grouping, "round_robin, random, exhaust_best or exhaust_worst");
    solve->add_option("--channels", solve_channels, "Also write the channel draw as CSV");

    Common sweep_c;
    std::string sweep_config;
    bool sweep_no_timing = false;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from an INI config");
    add_common(sweep, sweep_c, false);
    sweep->add_option("config", sweep_config, "Sweep config file")->required()->check(CLI::ExistingFile);
    sweep->add_flag("--no-timing", sweep_no_timing, "Write 0 in the wall_time column");

    Common verify_c;
    int verify_instances = 50;
    auto* verify = app.add_subcommand("verify", "Oracle and invariant checks on K = 2, N = 2 instances");
    add_common(verify, verify_c, false);
    verify->add_option("--instances", verify_instances, "Number of seeds")->check(CLI::PositiveNumber);

    Common compare_c;
    std::uint64_t compare_seed = 1;
    std::vector<int> compare_L{1, 2};
    std::string compare_grouping = "round_robin";
    auto* compare = app.add_subcommand("compare", "TDMA, NOMA and hybrid on one channel draw");
    add_common(compare, compare_c, true);
    compare->add_option("--seed", compare_seed, "Channel seed");
    compare->add_option("--L", compare_L, "Hybrid group counts")->delimiter(',');
    compare->add_option("--grouping", compare_grouping, "Hybrid grouping strategy");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            harness::SweepConfig cfg;
            cfg.base = resolve_scenario(solve_c);
            cfg.values = {static_cast<double>(cfg.base.K)};
            cfg.seeds = 1;
            cfg.seed_base = solve_seed;
            cfg.schemes = {harness::parse_scheme(solve_scheme)};
            cfg.L_values = {solve_L};
            cfg.grouping = hybrid::parse_strategy(solve_grouping);
            cfg.validate();
            Sink sink(solve_c);
            sink.echo(cfg);
            if (!solve_channels.empty()) {
                std::ofstream os(solve_channels);
                if (!os) throw std::runtime_error("cannot open " + solve_channels);
                write_channels_csv(os, generate_channels(cfg.base, solve_seed));
            }
            const auto rec = harness::solve_point(cfg.base, solve_seed, cfg.schemes.front(), solve_L, cfg.grouping, cfg.opts);
            harness::write_records_csv(sink.csv(), {rec});
            return rec.flags.find("error:") == std::string::npos ? 0 : 2;
        }
        if (*sweep) {
            harness::SweepConfig cfg = harness::load_sweep_config(sweep_config);
            cfg.workers = sweep_c.workers;
            if (!sweep_c.out.empty()) cfg.output = sweep_c.out;
            if (sweep_no_timing) cfg.record_timing = false;
            cfg.validate();
            Common c = sweep_c;
            c.out = cfg.output;
            Sink sink(c);
            sink.echo(cfg);
            harness::write_records_csv(sink.csv(), harness::run_sweep(cfg));
            return 0;
        }
        if (*verify) {
            Sink sink(verify_c);
            const auto records = harness::run_verify(verify_instances, verify_c.workers);
            harness::write_verify_csv(sink.csv(), records);
            int failed = 0;
            for (const auto& r : records) failed += r.pass ? 0 : 1;
            std::cerr << records.size() - failed << "/" << records.size() << " checks passed\n";
            return failed == 0 ? 0 : 1;
        }
        if (*compare) {
            harness::SweepConfig cfg;
            cfg.base = resolve_scenario(compare_c);
            cfg.axis = "L";
            cfg.values.assign(compare_L.begin(), compare_L.end());
            cfg.seeds = 1;
            cfg.seed_base = compare_seed;
            cfg.schemes = {harness::SchemeKind::tdma, harness::SchemeKind::noma, harness::SchemeKind::hybrid};
            cfg.L_values = compare_L;
            cfg.grouping = hybrid::parse_strategy(compare_grouping);
            cfg.validate();
            Sink sink(compare_c);
            sink.echo(cfg);
            const auto ch = generate_channels(cfg.base, compare_seed);
            harness::write_compare_csv(sink.csv(),
                                       harness::compare_schemes(ch, cfg.base, compare_L, cfg.grouping, cfg.opts));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "airs: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
