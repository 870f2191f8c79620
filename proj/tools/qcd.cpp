// qcd: quantum channel discrimination toolkit.
//
// Subcommands: div (state divergences), bounds (setting reports), gad
// (amplitude-damping bound grids), simulate (adaptive protocols), check
// (property suites). Exit codes: 0 success, 1 property failure, 2 usage or
// input error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcd/chandiv.hpp"
#include "qcd/channel.hpp"
#include "qcd/divergence.hpp"
#include "qcd/exponents.hpp"
#include "qcd/io.hpp"
#include "qcd/property_suites.hpp"
#include "qcd/protosim.hpp"

using namespace qcd;

namespace {

// Shortest round-trip decimal text for CSV fields.
std::string fmt_shortest(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_value(const DivergenceValue& v) {
    if (v.is_infinite()) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12f", v.bits);
    return buf;
}

DivergenceKind parse_kind(const std::string& name, double alpha) {
    if (name == "relative") return DivergenceKind::relative();
    if (name == "petz") return DivergenceKind::petz(alpha);
    if (name == "sandwiched") return DivergenceKind::sandwiched(alpha);
    if (name == "log-euclidean") return DivergenceKind::log_euclidean(alpha);
    if (name == "max") return DivergenceKind::max();
    if (name == "chernoff") return DivergenceKind::chernoff();
    if (name == "chernoff-flat") return DivergenceKind::chernoff_flat();
    if (name == "hilbert") return DivergenceKind::hilbert(alpha);
    if (name == "trace") return DivergenceKind::trace_dist();
    if (name == "fidelity") return DivergenceKind::fidelity();
    if (name == "c-distance") return DivergenceKind::c_dist();
    if (name == "bures") return DivergenceKind::bures();
    throw DomainError("unknown divergence kind: " + name);
}

int cmd_div(const std::string& kind_name, double alpha, const std::string& rho_path,
            const std::string& sigma_path) {
    DensityMatrix rho = state_from_json(load_json_file(rho_path));
    DensityMatrix sigma = state_from_json(load_json_file(sigma_path));
    DivergenceValue v = evaluate(parse_kind(kind_name, alpha), rho, sigma);
    std::printf("%s\n", fmt_value(v).c_str());
    return 0;
}

int cmd_bounds(const std::string& setting_name, const std::string& n_path,
               const std::string& m_path, double eps, double rate, double prior,
               std::optional<std::size_t> rounds, std::uint64_t seed, int multistarts,
               const std::string& out_dir) {
    TypedChannel n = typed_channel_from_json(load_json_file(n_path));
    TypedChannel m = typed_channel_from_json(load_json_file(m_path));
    ChannelDivOptions opt;
    opt.seed = seed;
    opt.multistarts = multistarts;

    BoundsReport rep;
    if (setting_name == "stein") {
        rep = stein_report(n, m, eps, rounds, opt);
    } else if (setting_name == "chernoff") {
        rep = chernoff_report(n, m, prior, rounds, opt);
    } else if (setting_name == "hk") {
        if (n.cq && m.cq) {
            rep = cq_exponents(*n.cq, *m.cq, Setting::han_kobayashi(rate));
        } else if (m.replacer_tau) {
            rep = replacer_exponents(n.channel, *m.replacer_tau, Setting::han_kobayashi(rate), {},
                                     opt);
        } else {
            rep.setting = Setting::han_kobayashi(rate);
            rep.lower = sc_exponent_lower(n, m, rate, opt);
            rep.lower_strategy = "amortized converse bound";
            rep.upper = kInf;
            rep.upper_rule = "none";
        }
    } else if (setting_name == "hoeffding") {
        if (n.cq && m.cq) {
            rep = cq_exponents(*n.cq, *m.cq, Setting::hoeffding(rate));
        } else if (m.replacer_tau) {
            rep = replacer_exponents(n.channel, *m.replacer_tau, Setting::hoeffding(rate), {}, opt);
        } else {
            throw Unsupported("no Hoeffding machinery for untyped channel pairs");
        }
    } else {
        throw DomainError("unknown setting: " + setting_name);
    }

    std::printf("setting      lower            upper            rule                          tight\n");
    std::printf("%-12s %-16s %-16s %-29s %s\n", rep.setting.name().c_str(),
                fmt_shortest(rep.lower).c_str(), fmt_shortest(rep.upper).c_str(),
                rep.upper_rule.c_str(), rep.tight ? "yes" : "no");
    if (rep.trivial_regime) std::printf("note: trivial regime (raw value %s)\n",
                                        fmt_shortest(rep.raw_upper).c_str());

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/bounds.csv");
        csv << "setting,parameter,n,lower,lower_strategy,upper,upper_rule,tight\n";
        csv << rep.setting.name() << "," << fmt_shortest(rep.setting.parameter) << ","
            << (rep.rounds ? std::to_string(*rep.rounds) : "inf") << "," << fmt_shortest(rep.lower)
            << "," << rep.lower_strategy << "," << fmt_shortest(rep.upper) << "," << rep.upper_rule
            << "," << (rep.tight ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_gad(double eta1, double eta2, int grid_steps, const std::string& out_dir) {
    if (grid_steps < 2) throw DomainError("gad: grid must have at least 2 steps");
    std::vector<double> grid(grid_steps);
    for (int i = 0; i < grid_steps; ++i)
        grid[i] = static_cast<double>(i) / static_cast<double>(grid_steps - 1);
    std::vector<GadCell> cells = gad_bounds_grid(eta1, eta2, grid);

    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
    const std::string base = out_dir.empty() ? "." : out_dir;
    const std::string csv_path = base + "/gad_bounds.csv";
    std::ofstream csv(csv_path);
    const bool with_env = !cells.empty() && cells.back().env_upper.has_value();
    csv << "p1,p2,lower,upper,diff" << (with_env ? ",env_upper" : "") << "\n";
    for (const auto& c : cells) {
        csv << fmt_shortest(c.p1) << "," << fmt_shortest(c.p2) << "," << fmt_shortest(c.lower)
            << "," << fmt_shortest(c.upper) << "," << fmt_shortest(c.diff);
        if (with_env) csv << "," << (c.env_upper ? fmt_shortest(*c.env_upper) : "");
        csv << "\n";
    }
    csv.close();

    const std::string plot_path = base + "/plot_gad.py";
    std::ofstream plot(plot_path);
    plot << "#!/usr/bin/env python3\n"
            "\"\"\"Heat map of the Stein bound gap for generalized amplitude damping.\"\"\"\n"
            "import csv\n"
            "import math\n"
            "import matplotlib\n"
            "matplotlib.use('Agg')\n"
            "import matplotlib.pyplot as plt\n\n"
            "rows = list(csv.DictReader(open('gad_bounds.csv')))\n"
            "p1 = sorted({float(r['p1']) for r in rows})\n"
            "p2 = sorted({float(r['p2']) for r in rows})\n"
            "grid = [[math.nan] * len(p2) for _ in p1]\n"
            "for r in rows:\n"
            "    d = float(r['diff'])\n"
            "    grid[p1.index(float(r['p1']))][p2.index(float(r['p2']))] = d\n"
            "fig, ax = plt.subplots(figsize=(6, 5))\n"
            "im = ax.imshow(grid, origin='lower', extent=(p2[0], p2[-1], p1[0], p1[-1]),\n"
            "               aspect='auto', cmap='viridis')\n"
            "ax.set_xlabel('p2')\n"
            "ax.set_ylabel('p1')\n"
            "ax.set_title('upper - lower Stein bound gap (eta1="
         << fmt_shortest(eta1) << ", eta2=" << fmt_shortest(eta2)
         << ")')\n"
            "fig.colorbar(im, ax=ax, label='bits')\n"
            "fig.tight_layout()\n"
            "fig.savefig('gad_bounds.png', dpi=160)\n"
            "print('wrote gad_bounds.png')\n";
    plot.close();
    std::printf("wrote %s (%zu rows) and %s\n", csv_path.c_str(), cells.size(), plot_path.c_str());
    return 0;
}

int cmd_simulate(const std::string& n_path, const std::string& m_path, std::size_t rounds,
                 const std::string& mode_name, double eps, double prior, std::size_t memory_cap,
                 int multistarts, std::uint64_t seed, const std::string& strategy_in,
                 const std::string& strategy_out) {
    if (rounds == 0 || rounds > 3) throw DomainError("simulate: rounds must be 1..3");
    if (memory_cap > 8) throw DomainError("simulate: memory cap is 8");
    TypedChannel n = typed_channel_from_json(load_json_file(n_path));
    TypedChannel m = typed_channel_from_json(load_json_file(m_path));
    Setting mode = mode_name == "stein" ? Setting::stein(eps) : Setting::chernoff(prior);

    OptimizedProtocol best;
    if (!strategy_in.empty()) {
        AdaptiveStrategy s = strategy_from_json(load_json_file(strategy_in));
        RunResult run = run_protocol(n.channel, m.channel, s, prior);
        best.strategy = s;
        best.outcome = run.outcome;
        const double err = prior * run.outcome.alpha + (1.0 - prior) * run.outcome.beta;
        best.objective = -std::log2(std::max(err, 1e-300)) / static_cast<double>(s.rounds);
        rounds = s.rounds;
    } else {
        SeeSawOptions opt;
        opt.multistarts = multistarts;
        opt.seed = seed;
        opt.memory_cap = memory_cap;
        best = optimize_strategy(n.channel, m.channel, rounds, mode, opt);
    }

    SphereSearchOptions bopt;
    bopt.multistarts = std::max(4, multistarts / 2);
    bopt.seed = mix_seed(seed, 101);
    OptimizedProtocol base = nonadaptive_baseline(n.channel, m.channel, rounds, mode, bopt);

    std::printf("alpha_n     %s\n", fmt_shortest(best.outcome.alpha).c_str());
    std::printf("beta_n      %s\n", fmt_shortest(best.outcome.beta).c_str());
    std::printf("objective   %s  (%s exponent, n=%zu)\n", fmt_shortest(best.objective).c_str(),
                mode.name().c_str(), rounds);
    std::printf("baseline    %s  (non-adaptive)\n", fmt_shortest(base.objective).c_str());

    // Meta-converse slack for every certified rule that applies.
    for (auto kind : {DivergenceKind::max(), DivergenceKind::relative()}) {
        AmortizedUpper up = amortized_upper(kind, n, m);
        if (up.rule == UpperRule::Unknown) continue;
        MetaConverseResult res = meta_converse_check(best.outcome, rounds, kind, up);
        std::printf("meta-converse [%s via %s]: slack %s (%s)\n", kind.name().c_str(),
                    rule_name(up.rule).c_str(), fmt_shortest(res.slack).c_str(),
                    res.holds ? "holds" : "VIOLATED");
    }

    if (!strategy_out.empty()) {
        save_json_file(strategy_out, strategy_to_json(best.strategy));
        std::printf("strategy saved to %s\n", strategy_out.c_str());
    }
    return 0;
}

int cmd_check(const std::string& suite, std::uint64_t seed) {
    std::vector<SuiteReport> reports = run_suites(suite, seed);
    int failures = 0;
    for (const auto& rep : reports) {
        std::printf("suite %s\n", rep.suite.c_str());
        for (const auto& p : rep.properties) {
            std::printf("  %-55s %5d checks  %d failures\n", p.name.c_str(), p.checks, p.failures);
            for (const auto& msg : p.messages) std::printf("    violation: %s\n", msg.c_str());
            failures += p.failures;
        }
    }
    std::printf("%s\n", failures == 0 ? "all properties passed" : "PROPERTY FAILURES DETECTED");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum channel discrimination toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "master seed for randomized subroutines");

    // div
    auto* div = app.add_subcommand("div", "state divergence between two density-matrix files");
    std::string kind_name = "relative", rho_path, sigma_path;
    double alpha = 2.0;
    div->add_option("--kind", kind_name, "relative|petz|sandwiched|log-euclidean|max|chernoff|"
                                         "chernoff-flat|hilbert|trace|fidelity|c-distance|bures");
    div->add_option("--alpha", alpha, "Renyi order where applicable");
    div->add_option("rho", rho_path, "density matrix JSON")->required();
    div->add_option("sigma", sigma_path, "density matrix JSON")->required();

    // bounds
    auto* bounds = app.add_subcommand("bounds", "setting report for a channel pair");
    std::string setting_name = "stein", n_path, m_path, out_dir;
    double eps = 0.05, rate = 1.0, prior = 0.5;
    int multistarts = 16;
    std::optional<std::size_t> rounds_opt;
    std::size_t rounds_value = 0;
    bounds->add_option("--setting", setting_name, "stein|hk|hoeffding|chernoff");
    bounds->add_option("--epsilon", eps, "Stein type-I cap");
    bounds->add_option("--rate", rate, "type-II rate r");
    bounds->add_option("--prior", prior, "Chernoff prior");
    auto* nopt = bounds->add_option("--n", rounds_value, "finite round count (default asymptotic)");
    bounds->add_option("--multistarts", multistarts, "search starts");
    bounds->add_option("--out", out_dir, "directory for bounds.csv");
    bounds->add_option("N", n_path, "null-hypothesis channel JSON")->required();
    bounds->add_option("M", m_path, "alternative channel JSON")->required();

    // gad
    auto* gad = app.add_subcommand("gad", "generalized-amplitude-damping bound grid");
    double eta1 = 0.2, eta2 = 0.3;
    int grid_steps = 21;
    std::string gad_out = ".";
    gad->add_option("--eta1", eta1, "transmissivity of N");
    gad->add_option("--eta2", eta2, "transmissivity of M");
    gad->add_option("--grid", grid_steps, "grid steps per axis");
    gad->add_option("--out", gad_out, "output directory");

    // simulate
    auto* sim = app.add_subcommand("simulate", "optimize and run an adaptive protocol");
    std::string sim_n, sim_m, sim_mode = "chernoff", strategy_in, strategy_out;
    std::size_t sim_rounds = 1, memory_cap = 4;
    sim->add_option("N", sim_n, "null-hypothesis channel JSON")->required();
    sim->add_option("M", sim_m, "alternative channel JSON")->required();
    sim->add_option("--n", sim_rounds, "rounds (1..3)");
    sim->add_option("--mode", sim_mode, "stein|chernoff");
    sim->add_option("--epsilon", eps, "Stein type-I cap");
    sim->add_option("--prior", prior, "Chernoff prior");
    sim->add_option("--memory-cap", memory_cap, "memory dimension cap (<= 8)");
    sim->add_option("--multistarts", multistarts, "see-saw starts");
    sim->add_option("--strategy", strategy_in, "run a saved strategy instead of optimizing");
    sim->add_option("--save-strategy", strategy_out, "write the optimized strategy JSON");

    // check
    auto* check = app.add_subcommand("check", "run property suites");
    std::string suite = "all";
    check->add_option("suite", suite, "divergences|channels|chandiv|exponents|protosim|all");

    CLI11_PARSE(app, argc, argv);

    try {
        if (div->parsed()) return cmd_div(kind_name, alpha, rho_path, sigma_path);
        if (bounds->parsed()) {
            if (nopt->count() > 0) rounds_opt = rounds_value;
            return cmd_bounds(setting_name, n_path, m_path, eps, rate, prior, rounds_opt, seed,
                              multistarts, out_dir);
        }
        if (gad->parsed()) return cmd_gad(eta1, eta2, grid_steps, gad_out);
        if (sim->parsed())
            return cmd_simulate(sim_n, sim_m, sim_rounds, sim_mode, eps, prior, memory_cap,
                                multistarts, seed, strategy_in, strategy_out);
        if (check->parsed()) return cmd_check(suite, seed);
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Unsupported& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: malformed input file (%s)\n", e.what());
        return 2;
    }
    return 2;
}
