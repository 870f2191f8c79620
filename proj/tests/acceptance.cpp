// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] must point at the qcd CLI binary (used by the determinism
// criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcd/chandiv.hpp"
#include "qcd/channel.hpp"
#include "qcd/divergence.hpp"
#include "qcd/exponents.hpp"
#include "qcd/property_suites.hpp"
#include "qcd/protosim.hpp"
#include "qcd/rng.hpp"

using namespace qcd;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<DivergenceKind> section22_kinds() {
    return {DivergenceKind::relative(),      DivergenceKind::petz(0.3),
            DivergenceKind::petz(0.7),       DivergenceKind::petz(1.5),
            DivergenceKind::petz(2.0),       DivergenceKind::sandwiched(0.5),
            DivergenceKind::sandwiched(0.7), DivergenceKind::sandwiched(1.5),
            DivergenceKind::sandwiched(3.0), DivergenceKind::max(),
            DivergenceKind::chernoff()};
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng master(42);
    const auto kinds = section22_kinds();
    int bad = 0;
    for (int it = 0; it < 300; ++it) {
        Rng rng = master.derive(it);
        const std::size_t d = 2 + rng.uniform_index(5);
        DensityMatrix rho = rng.random_state(d);
        DensityMatrix sigma = rng.random_state(d);
        Rng chan = rng.derive(1);
        ComplexMatrix iso(0, 0);
        DensityMatrix nrho = suites::apply_cptp(chan, rho, d, d, &iso);
        DensityMatrix nsigma = suites::apply_cptp(chan, sigma, d, d, &iso);
        for (const auto& k : kinds) {
            if (evaluate(k, nrho, nsigma).bits > evaluate(k, rho, sigma).bits + 1e-8) ++bad;
            if (std::abs(evaluate(k, rho, rho).bits) > 1e-8) ++bad;
        }
        DensityMatrix pr = rng.random_pd_state(d), ps = rng.random_pd_state(d);
        for (double a : {0.3, 0.7}) {
            const double petz = petz_renyi(pr, ps, a).bits;
            const double sand = sandwiched_renyi(pr, ps, a).bits;
            const double flat = log_euclidean_renyi(pr, ps, a).bits;
            if (!(a * petz <= sand + 1e-8 && sand <= petz + 1e-8 && petz <= flat + 1e-8)) ++bad;
        }
        for (double a : {1.5, 3.0}) {
            const double petz = petz_renyi(pr, ps, a).bits;
            const double sand = sandwiched_renyi(pr, ps, a).bits;
            const double flat = log_euclidean_renyi(pr, ps, a).bits;
            if (!(flat <= sand + 1e-8 && sand <= petz + 1e-8)) ++bad;
        }
    }
    const double dt = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "%d violations, %.1f s (budget 60 s)", bad, dt);
    report(1, bad == 0 && dt < 60.0,
           "divergence suite: data processing, faithfulness, ordering chain on 300 pairs", detail);
}

void criterion_2() {
    Rng master(4242);
    int bad = 0;
    for (int it = 0; it < 50; ++it) {
        Rng rng = master.derive(it);
        const std::size_t d = 2 + rng.uniform_index(3);
        DensityMatrix rho = rng.random_pd_state(d);
        DensityMatrix sigma = rng.random_pd_state(d);
        const double dref = relative_entropy(rho, sigma).bits;
        if (std::abs(sandwiched_renyi(rho, sigma, 1.0 + 1e-4).bits - dref) > 1e-3) ++bad;
        if (std::abs(sandwiched_renyi(rho, sigma, 1.0 - 1e-4).bits - dref) > 1e-3) ++bad;
        if (std::abs(log_euclidean_renyi(rho, sigma, 1.0 - 1e-4).bits - dref) > 1e-2) ++bad;
    }
    report(2, bad == 0, "alpha -> 1 limit checks on 50 positive-definite pairs",
           bad ? std::to_string(bad) + " violations" : "");
}

void criterion_3() {
    Rng master(333);
    int bad = 0;
    for (int pair = 0; pair < 100; ++pair) {
        Rng rng = master.derive(pair);
        const std::size_t din = 2 + rng.uniform_index(2);
        const std::size_t dout = 2 + rng.uniform_index(2);
        QuantumChannel n = suites::random_channel(rng, din, dout, din * dout);
        QuantumChannel m = suites::random_channel(rng, din, dout, din * dout);
        const double val = dmax_channel(n, m).bits;

        // Bisection oracle on 2^lambda C_M - C_N >= 0.
        ComplexMatrix cn = choi(n).state.matrix();
        ComplexMatrix cm = choi(m).state.matrix();
        double lo = -5.0, hi = 80.0;
        for (int k = 0; k < 240; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (min_eigenvalue(cm * Complex(std::pow(2.0, mid), 0.0) - cn) >= -1e-13)
                hi = mid;
            else
                lo = mid;
        }
        if (std::abs(val - hi) > 1e-8) ++bad;

        // Domination over sampled pure inputs; equality at Phi.
        Rng sampler = rng.derive(1);
        for (int s = 0; s < 10; ++s) {
            PureState psi = sampler.random_pure(din * din);
            const double at = max_relative_entropy(apply_with_reference(n, psi.density(), din),
                                                   apply_with_reference(m, psi.density(), din))
                                  .bits;
            if (at > val + 1e-8) ++bad;
        }
        PureState phi = PureState::maximally_entangled(din);
        const double at_phi = max_relative_entropy(apply_with_reference(n, phi.density(), din),
                                                   apply_with_reference(m, phi.density(), din))
                                  .bits;
        if (std::abs(at_phi - val) > 1e-9) ++bad;
    }
    report(3, bad == 0,
           "max-divergence collapse: SDP oracle, 1000 sampled inputs, Phi attainment (100 pairs)",
           bad ? std::to_string(bad) + " violations" : "");
}

void criterion_4() {
    Rng master(444);
    std::vector<DivergenceKind> kinds = {
        DivergenceKind::relative(),      DivergenceKind::petz(0.5),
        DivergenceKind::petz(1.5),       DivergenceKind::petz(2.0),
        DivergenceKind::sandwiched(0.5), DivergenceKind::sandwiched(2.0),
        DivergenceKind::max()};
    int bad = 0, samples_used = 0;
    for (int pair = 0; pair < 50; ++pair) {
        Rng rng = master.derive(pair);
        const std::size_t alphabet = 2 + rng.uniform_index(2);
        const std::size_t dim = 2 + rng.uniform_index(2);
        CqChannel cqn = suites::random_cq(rng, alphabet, dim);
        CqChannel cqm = suites::random_cq(rng, alphabet, dim);
        QuantumChannel qn = cqn.as_channel(), qm = cqm.as_channel();

        std::vector<double> max_x(kinds.size(), -kInf);
        for (std::size_t ki = 0; ki < kinds.size(); ++ki)
            for (std::size_t x = 0; x < alphabet; ++x)
                max_x[ki] = std::max(max_x[ki],
                                     evaluate(kinds[ki], cqn.outputs()[x], cqm.outputs()[x]).bits);

        const std::size_t r = 4;
        for (int s = 0; s < 40; ++s) {
            Rng local = rng.derive(100 + s);
            DensityMatrix rho = local.random_state(r * alphabet);
            DensityMatrix sigma = local.random_state(r * alphabet);
            DensityMatrix on = apply_with_reference(qn, rho, r);
            DensityMatrix om = apply_with_reference(qm, sigma, r);
            ++samples_used;
            for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
                const double cost = evaluate(kinds[ki], rho, sigma).bits;
                const double gain = evaluate(kinds[ki], on, om).bits;
                if (std::isinf(cost) || std::isinf(gain)) continue;  // invalid sample
                if (gain - cost > max_x[ki] + 1e-7) ++bad;
            }
        }

        // Equality at the best-letter basis input.
        for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
            double best = -kInf;
            for (std::size_t x = 0; x < alphabet; ++x) {
                PureState exx = tensor(PureState::basis_state(alphabet, x),
                                       PureState::basis_state(alphabet, x));
                DensityMatrix on = apply_with_reference(qn, exx.density(), alphabet);
                DensityMatrix om = apply_with_reference(qm, exx.density(), alphabet);
                best = std::max(best, evaluate(kinds[ki], on, om).bits);
            }
            if (std::isinf(max_x[ki]) != std::isinf(best)) {
                ++bad;
            } else if (!std::isinf(best) && std::abs(best - max_x[ki]) > 1e-8) {
                ++bad;
            }
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d samples, %d violations", samples_used, bad);
    report(4, bad == 0 && samples_used == 2000,
           "cq amortization collapse over 2000 amortized samples (7 kinds, 50 pairs)", detail);
}

void criterion_5() {
    Rng master(555);
    ChannelDivOptions fast;
    fast.multistarts = 4;
    fast.max_iters = 60;
    int bad = 0;
    for (int it = 0; it < 100; ++it) {
        Rng rng = master.derive(it);
        QuantumChannel n = suites::random_channel(rng, 2, 2, 4);
        QuantumChannel m = suites::random_channel(rng, 2, 2, 4);
        BoundsReport rep = stein_report(TypedChannel::plain(n), TypedChannel::plain(m), 0.15, {},
                                        fast);
        if (!(rep.lower <= rep.upper + 1e-6)) ++bad;
    }

    int untight = 0;
    Rng rng = master.derive(9000);
    for (int it = 0; it < 10; ++it) {
        CqChannel a = suites::random_cq(rng, 2 + it % 2, 2);
        CqChannel b = suites::random_cq(rng, 2 + it % 2, 2);
        BoundsReport rep = stein_report(TypedChannel::from_cq(a), TypedChannel::from_cq(b), 0.2);
        if (!rep.tight || std::abs(rep.upper - rep.lower) > 1e-6) ++untight;
    }
    for (int it = 0; it < 5; ++it) {
        BoundsReport er = stein_report(TypedChannel::erasure(0.1 + 0.15 * it, 2),
                                       TypedChannel::erasure(0.75 - 0.1 * it, 2), 0.3);
        if (!er.tight || std::abs(er.upper - er.lower) > 1e-6) ++untight;
        std::vector<double> p = rng.random_probability_vector(3);
        std::vector<double> q = rng.random_probability_vector(3);
        BoundsReport dp = stein_report(TypedChannel::dephasing(p, 3), TypedChannel::dephasing(q, 3),
                                       0.3);
        if (!dp.tight || std::abs(dp.upper - dp.lower) > 1e-6) ++untight;
        QuantumChannel probe = suites::random_channel(rng, 2, 2, 2);
        BoundsReport rp = replacer_exponents(probe, rng.random_pd_state(2), Setting::stein(0.2), {},
                                             fast);
        if (!rp.tight || std::abs(rp.upper - rp.lower) > 1e-6) ++untight;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d bracket violations, %d tightness failures", bad,
                  untight);
    report(5, bad == 0 && untight == 0,
           "Stein brackets on 100 random pairs; tight for cq/seizable/replacer", detail);
}

void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> grid(21);
    for (int i = 0; i < 21; ++i) grid[i] = i / 20.0;

    int bad = 0;
    std::vector<GadCell> fig2 = gad_bounds_grid(0.2, 0.3, grid);
    if (fig2.size() != 441) ++bad;
    for (const auto& c : fig2)
        if (!(c.diff >= -1e-8)) ++bad;

    std::vector<GadCell> fig3 = gad_bounds_grid(0.5, 0.5, grid);
    if (fig3.size() != 441) ++bad;
    for (const auto& c : fig3) {
        if (!(c.diff >= -1e-8)) ++bad;
        if (c.p1 == c.p2) {
            if (std::abs(c.lower) > 1e-8 || std::abs(c.upper) > 1e-8) ++bad;
        } else {
            if (!c.env_upper) {
                ++bad;
            } else if (!(*c.env_upper >= c.lower - 1e-8)) {
                ++bad;
            }
        }
    }
    const double dt = seconds_since(t0);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d violations, %.1f s (budget 600 s)", bad, dt);
    report(6, bad == 0 && dt < 600.0, "GAD 21x21 grids at (0.2,0.3) and (0.5,0.5)", detail);
}

void criterion_7() {
    Rng master(777);
    SeeSawOptions opt;
    opt.multistarts = 4;
    opt.outer_rounds = 5;
    int bad = 0;
    for (int pair = 0; pair < 20; ++pair) {
        Rng rng = master.derive(pair);
        const bool use_cq = pair >= 14;
        TypedChannel tn = use_cq ? TypedChannel::from_cq(suites::random_cq(rng, 2, 2))
                                 : TypedChannel::plain(suites::random_channel(rng, 2, 2, 2));
        TypedChannel tm = use_cq ? TypedChannel::from_cq(suites::random_cq(rng, 2, 2))
                                 : TypedChannel::plain(suites::random_channel(rng, 2, 2, 2));
        opt.seed = mix_seed(777, pair);
        for (std::size_t rounds : {std::size_t(1), std::size_t(2)}) {
            OptimizedProtocol best =
                optimize_strategy(tn.channel, tm.channel, rounds, Setting::chernoff(0.5), opt);
            AmortizedUpper dmax_up = amortized_upper(DivergenceKind::max(), tn, tm);
            MetaConverseResult res =
                meta_converse_check(best.outcome, rounds, DivergenceKind::max(), dmax_up);
            if (!res.holds) ++bad;
            if (use_cq) {
                AmortizedUpper rel_up = amortized_upper(DivergenceKind::relative(), tn, tm);
                if (rel_up.rule != UpperRule::CqCollapse) {
                    ++bad;
                } else {
                    MetaConverseResult rres =
                        meta_converse_check(best.outcome, rounds, DivergenceKind::relative(), rel_up);
                    if (!rres.holds) ++bad;
                }
            }
        }
    }
    report(7, bad == 0, "meta-converse on see-saw protocols (n in {1,2}, 20 pairs)",
           bad ? std::to_string(bad) + " violations" : "");
}

void criterion_8() {
    Rng master(888);
    int bad = 0;
    for (int it = 0; it < 1000; ++it) {
        Rng rng = master.derive(it);
        const std::size_t d = 2 + rng.uniform_index(5);
        ComplexMatrix ga = rng.ginibre(d, d), gb = rng.ginibre(d, d);
        FvdgResult res = fvdg_check(ga * ga.dagger() * Complex(0.4 / d, 0.0),
                                    gb * gb.dagger() * Complex(0.6 / d, 0.0));
        if (res.slack < -1e-10) ++bad;
    }
    Rng rng = master.derive(5000);
    for (int it = 0; it < 200; ++it) {
        Rng local = rng.derive(it);
        const std::size_t d = 2 + local.uniform_index(2);
        DensityMatrix rho = local.random_state(d);
        DensityMatrix sigma = local.random_state(d);
        DensityMatrix omega = local.random_state(d);
        Rng chan = local.derive(1);
        ComplexMatrix iso(0, 0);
        DensityMatrix prho = suites::apply_cptp(chan, rho, d, d, &iso);
        DensityMatrix psigma = suites::apply_cptp(chan, sigma, d, d, &iso);
        const double a = 1.0 + 4.0 * local.uniform();
        if (hilbert_alpha(prho, omega, a).bits >
            hilbert_alpha(rho, sigma, a).bits + hilbert_alpha(psigma, omega, a).bits + 1e-7)
            ++bad;
        if (metrics(prho, omega).c_distance >
            metrics(rho, sigma).c_distance + metrics(psigma, omega).c_distance + 1e-7)
            ++bad;
        if (metrics(prho, omega).bures >
            metrics(rho, sigma).bures + metrics(psigma, omega).bures + 1e-7)
            ++bad;
    }
    report(8, bad == 0,
           "appendix suites: FvdG on 1000 PSD pairs, triangle inequalities on 200 instances",
           bad ? std::to_string(bad) + " violations" : "");
}

void criterion_9() {
    Rng master(999);
    int bad = 0;
    for (int it = 0; it < 100; ++it) {
        Rng rng = master.derive(it);
        CqChannel n = suites::random_cq(rng, 2 + rng.uniform_index(2), 2 + rng.uniform_index(2));
        CqChannel m = suites::random_cq(rng, n.alphabet(), n.out_dim());
        BoundsReport rep = cq_exponents(n, m, Setting::chernoff(0.5));
        if (!(rep.upper <= 2.0 * rep.lower + 1e-6)) ++bad;
        if (!(rep.lower <= rep.upper + 1e-6)) ++bad;
    }
    report(9, bad == 0, "cq Chernoff factor-two bracket on 100 pairs",
           bad ? std::to_string(bad) + " violations" : "");
}

void criterion_10(const std::string& cli_path) {
    const std::string log1 = "acceptance_check_run1.log";
    const std::string log2 = "acceptance_check_run2.log";
    const std::string cmd1 = cli_path + " check all --seed 42 > " + log1 + " 2>&1";
    const std::string cmd2 = cli_path + " check all --seed 42 > " + log2 + " 2>&1";
    const int rc1 = std::system(cmd1.c_str());
    const int rc2 = std::system(cmd2.c_str());
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(log1), b = slurp(log2);
    const bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "exit codes %d/%d, %zu bytes, %s", rc1, rc2, a.size(),
                  a == b ? "byte-identical" : "logs differ");
    report(10, ok, "check all --seed 42 passes twice with byte-identical logs", detail);
}

}  // namespace

int main(int argc, char** argv) {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (argc > 1) {
        criterion_10(argv[1]);
    } else {
        report(10, false, "determinism", "CLI path not supplied");
    }
    std::printf("%d criterion failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
