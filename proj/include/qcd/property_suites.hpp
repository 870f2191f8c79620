#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qcd/chandiv.hpp"
#include "qcd/channel.hpp"
#include "qcd/divergence.hpp"
#include "qcd/exponents.hpp"
#include "qcd/protosim.hpp"
#include "qcd/rng.hpp"

namespace qcd {

/// Pass/fail counters for one named property; failures keep the first few
/// messages for reporting.
struct PropertyReport {
    std::string name;
    int checks = 0;
    int failures = 0;
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failures;
            if (messages.size() < 10) messages.push_back(what);
        }
    }
};

struct SuiteReport {
    std::string suite;
    std::vector<PropertyReport> properties;

    int total_failures() const {
        int f = 0;
        for (const auto& p : properties) f += p.failures;
        return f;
    }
};

namespace suites {

inline QuantumChannel random_channel(Rng& rng, std::size_t din, std::size_t dout, std::size_t env) {
    ComplexMatrix u = rng.random_unitary(dout * env);
    std::vector<ComplexMatrix> ks;
    for (std::size_t e = 0; e < env; ++e) {
        ComplexMatrix k(dout, din);
        for (std::size_t b = 0; b < dout; ++b)
            for (std::size_t a = 0; a < din; ++a) k(b, a) = u(b * env + e, a);
        ks.push_back(std::move(k));
    }
    return QuantumChannel(din, dout, std::move(ks));
}

inline CqChannel random_cq(Rng& rng, std::size_t alphabet, std::size_t dim) {
    std::vector<DensityMatrix> outs;
    for (std::size_t x = 0; x < alphabet; ++x) outs.push_back(rng.random_state(dim));
    return CqChannel(std::move(outs));
}

inline DensityMatrix apply_cptp(Rng& rng, const DensityMatrix& rho, std::size_t dout,
                                std::size_t env, ComplexMatrix* reuse = nullptr) {
    const std::size_t din = rho.dim();
    ComplexMatrix v(dout * env, din);
    if (reuse && reuse->rows() == dout * env) {
        v = *reuse;
    } else {
        ComplexMatrix u = rng.random_unitary(dout * env);
        for (std::size_t i = 0; i < dout * env; ++i)
            for (std::size_t j = 0; j < din; ++j) v(i, j) = u(i, j);
        if (reuse) *reuse = v;
    }
    ComplexMatrix big = v * rho.matrix() * v.dagger();
    return DensityMatrix(HermitianOperator(partial_trace(big, Keep::First, dout, env)));
}

inline std::vector<DivergenceKind> dp_kinds() {
    return {DivergenceKind::relative(),      DivergenceKind::petz(0.3),
            DivergenceKind::petz(0.7),       DivergenceKind::petz(1.5),
            DivergenceKind::petz(2.0),       DivergenceKind::sandwiched(0.5),
            DivergenceKind::sandwiched(0.7), DivergenceKind::sandwiched(1.5),
            DivergenceKind::sandwiched(3.0), DivergenceKind::max(),
            DivergenceKind::chernoff(),      DivergenceKind::hilbert(1.0),
            DivergenceKind::hilbert(2.0),    DivergenceKind::trace_dist(),
            DivergenceKind::c_dist(),        DivergenceKind::bures()};
}

inline SuiteReport divergences(std::uint64_t seed, int pair_count = 300) {
    SuiteReport rep;
    rep.suite = "divergences";
    Rng master(seed);

    PropertyReport dp{"data processing under random CPTP maps"};
    PropertyReport faith{"faithfulness at rho = sigma"};
    PropertyReport chain{"Petz/sandwiched/log-Euclidean ordering chain"};
    PropertyReport sym{"Chernoff symmetry"};
    const auto kinds = dp_kinds();
    for (int it = 0; it < pair_count; ++it) {
        Rng rng = master.derive(it);
        const std::size_t d = 2 + rng.uniform_index(5);  // dims 2..6
        DensityMatrix rho = rng.random_state(d);
        DensityMatrix sigma = rng.random_state(d);
        Rng chan = rng.derive(1);
        ComplexMatrix iso(0, 0);
        DensityMatrix nrho = apply_cptp(chan, rho, d, d, &iso);
        DensityMatrix nsigma = apply_cptp(chan, sigma, d, d, &iso);
        for (const auto& k : kinds) {
            const double before = evaluate(k, rho, sigma).bits;
            const double after = evaluate(k, nrho, nsigma).bits;
            dp.expect(after <= before + 1e-8, k.name() + " increased under a channel");
            if (it < 25) {
                // The square-root metrics amplify 1e-12 fidelity noise to
                // 1e-6; every other kind holds the tight tolerance.
                const bool sqrt_metric = k.family == DivergenceFamily::CDist ||
                                         k.family == DivergenceFamily::Bures;
                faith.expect(std::abs(evaluate(k, rho, rho).bits) <= (sqrt_metric ? 1e-4 : 1e-8),
                             k.name() + " nonzero at rho = rho");
            }
        }
        sym.expect(std::abs(chernoff(rho, sigma).bits - chernoff(sigma, rho).bits) <= 1e-8,
                   "Chernoff asymmetric");

        DensityMatrix pd_rho = rng.random_pd_state(d);
        DensityMatrix pd_sigma = rng.random_pd_state(d);
        for (double a : {0.3, 0.7}) {
            const double petz = petz_renyi(pd_rho, pd_sigma, a).bits;
            const double sand = sandwiched_renyi(pd_rho, pd_sigma, a).bits;
            const double flat = log_euclidean_renyi(pd_rho, pd_sigma, a).bits;
            chain.expect(a * petz <= sand + 1e-8 && sand <= petz + 1e-8 && petz <= flat + 1e-8,
                         "ordering chain violated below 1");
        }
        for (double a : {1.5, 3.0}) {
            const double petz = petz_renyi(pd_rho, pd_sigma, a).bits;
            const double sand = sandwiched_renyi(pd_rho, pd_sigma, a).bits;
            const double flat = log_euclidean_renyi(pd_rho, pd_sigma, a).bits;
            chain.expect(flat <= sand + 1e-8 && sand <= petz + 1e-8,
                         "ordering chain violated above 1");
        }
    }
    rep.properties.push_back(dp);
    rep.properties.push_back(faith);
    rep.properties.push_back(chain);
    rep.properties.push_back(sym);

    PropertyReport stability{"tensor stability with a common spectator"};
    PropertyReport dsum{"direct-sum property on cq states"};
    {
        Rng rng = master.derive(9001);
        for (int it = 0; it < 50; ++it) {
            DensityMatrix rho = rng.random_state(2);
            DensityMatrix sigma = rng.random_state(2);
            DensityMatrix omega = rng.random_state(2 + it % 2);
            for (const auto& k : dp_kinds()) {
                const double plain = evaluate(k, rho, sigma).bits;
                const double padded = evaluate(k, tensor(rho, omega), tensor(sigma, omega)).bits;
                stability.expect(std::abs(plain - padded) <= 1e-9, k.name() + " not tensor stable");
            }
            // Block-diagonal classical-quantum states.
            std::vector<double> px = rng.random_probability_vector(2);
            std::vector<DensityMatrix> rs{rng.random_state(2), rng.random_state(2)};
            std::vector<DensityMatrix> ss{rng.random_state(2), rng.random_state(2)};
            ComplexMatrix br(4, 4), bs(4, 4);
            double expect_val = 0.0;
            for (int x = 0; x < 2; ++x) {
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j) {
                        br(2 * x + i, 2 * x + j) = px[x] * rs[x].matrix()(i, j);
                        bs(2 * x + i, 2 * x + j) = px[x] * ss[x].matrix()(i, j);
                    }
                expect_val += px[x] * relative_entropy(rs[x], ss[x]).bits;
            }
            const double got =
                relative_entropy(DensityMatrix::trusted(br), DensityMatrix::trusted(bs)).bits;
            dsum.expect(std::abs(got - expect_val) <= 1e-9, "direct-sum property violated");
        }
    }
    rep.properties.push_back(stability);
    rep.properties.push_back(dsum);

    PropertyReport tri{"data-processed triangle inequalities"};
    {
        Rng rng = master.derive(9002);
        for (int it = 0; it < 200; ++it) {
            Rng local = rng.derive(it);
            const std::size_t d = 2 + local.uniform_index(2);
            DensityMatrix rho = local.random_state(d);
            DensityMatrix sigma = local.random_state(d);
            DensityMatrix omega = local.random_state(d);
            Rng chan = local.derive(1);
            ComplexMatrix iso(0, 0);
            DensityMatrix prho = apply_cptp(chan, rho, d, d, &iso);
            DensityMatrix psigma = apply_cptp(chan, sigma, d, d, &iso);
            const double a = 1.0 + 3.0 * local.uniform();
            tri.expect(hilbert_alpha(prho, omega, a).bits <=
                           hilbert_alpha(rho, sigma, a).bits + hilbert_alpha(psigma, omega, a).bits +
                               1e-7,
                       "Hilbert triangle violated");
            tri.expect(metrics(prho, omega).c_distance <=
                           metrics(rho, sigma).c_distance + metrics(psigma, omega).c_distance + 1e-7,
                       "c-distance triangle violated");
            tri.expect(metrics(prho, omega).bures <=
                           metrics(rho, sigma).bures + metrics(psigma, omega).bures + 1e-7,
                       "Bures triangle violated");
            const double sa = 1.0 + 2.0 * local.uniform();
            tri.expect(sandwiched_renyi(prho, omega, sa).bits <=
                           sandwiched_renyi(rho, sigma, sa).bits +
                               max_relative_entropy(psigma, omega).bits + 1e-7,
                       "sandwiched/Dmax triangle violated");
        }
    }
    rep.properties.push_back(tri);

    PropertyReport limits{"alpha -> 1 limits"};
    {
        Rng rng = master.derive(9003);
        for (int it = 0; it < 50; ++it) {
            const std::size_t d = 2 + rng.uniform_index(3);
            DensityMatrix rho = rng.random_pd_state(d);
            DensityMatrix sigma = rng.random_pd_state(d);
            const double dref = relative_entropy(rho, sigma).bits;
            limits.expect(std::abs(sandwiched_renyi(rho, sigma, 1.0 + 1e-4).bits - dref) <= 1e-3,
                          "sandwiched upper limit off");
            limits.expect(std::abs(sandwiched_renyi(rho, sigma, 1.0 - 1e-4).bits - dref) <= 1e-3,
                          "sandwiched lower limit off");
            limits.expect(std::abs(log_euclidean_renyi(rho, sigma, 1.0 - 1e-4).bits - dref) <= 1e-2,
                          "log-Euclidean limit off");
        }
    }
    rep.properties.push_back(limits);

    PropertyReport fvdg{"generalized Fuchs-van-de-Graaf"};
    PropertyReport fid{"sandwiched 1/2 equals -log fidelity"};
    {
        Rng rng = master.derive(9004);
        for (int it = 0; it < 1000; ++it) {
            const std::size_t d = 2 + rng.uniform_index(5);
            ComplexMatrix ga = rng.ginibre(d, d), gb = rng.ginibre(d, d);
            FvdgResult res = fvdg_check(ga * ga.dagger() * Complex(0.5 / d, 0.0),
                                        gb * gb.dagger() * Complex(0.3 / d, 0.0));
            fvdg.expect(res.slack >= -1e-10, "FvdG slack negative");
        }
        for (int it = 0; it < 100; ++it) {
            const std::size_t d = 2 + rng.uniform_index(3);
            DensityMatrix rho = rng.random_state(d);
            DensityMatrix sigma = rng.random_state(d);
            fid.expect(std::abs(sandwiched_renyi(rho, sigma, 0.5).bits +
                                std::log2(fidelity(rho, sigma))) <= 1e-9,
                       "fidelity identity violated");
        }
    }
    rep.properties.push_back(fvdg);
    rep.properties.push_back(fid);
    return rep;
}

inline SuiteReport channels(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "channels";
    Rng master(seed);

    PropertyReport tp{"constructors are trace preserving"};
    PropertyReport choi_red{"Choi state reduces to I/|A|"};
    {
        Rng rng = master.derive(1);
        for (int it = 0; it < 100; ++it) {
            std::vector<QuantumChannel> family;
            family.push_back(make_gad(rng.uniform(), rng.uniform()));
            family.push_back(make_erasure(rng.uniform(), 2 + rng.uniform_index(2)));
            family.push_back(make_dephasing(rng.random_probability_vector(3), 3));
            family.push_back(make_replacer(rng.random_state(2), 3));
            family.push_back(random_cq(rng, 2, 2).as_channel());
            family.push_back(random_channel(rng, 2, 3, 2));
            for (const auto& ch : family) {
                ComplexMatrix sum(ch.dim_in(), ch.dim_in());
                for (const auto& k : ch.kraus()) sum += k.dagger() * k;
                tp.expect((sum - ComplexMatrix::identity(ch.dim_in())).max_abs() <= 1e-9,
                          "Kraus completeness violated");
            }
            const QuantumChannel& probe = family.back();
            ComplexMatrix red = partial_trace(choi(probe).state.matrix(), Keep::First,
                                              probe.dim_in(), probe.dim_out());
            choi_red.expect(
                (red - ComplexMatrix::identity(probe.dim_in()) *
                           Complex(1.0 / static_cast<double>(probe.dim_in()), 0.0))
                        .max_abs() <= 1e-9,
                "Choi reduction incorrect");
        }
    }
    rep.properties.push_back(tp);
    rep.properties.push_back(choi_red);

    PropertyReport env{"environment-parametrized forms reconstruct their channels"};
    PropertyReport seize{"environment seizing recovers theta"};
    {
        Rng rng = master.derive(2);
        for (int it = 0; it < 50; ++it) {
            EnvParamChannel er = env_form_erasure(rng.uniform(), 2);
            env.expect((choi(er.realize()).state.matrix() -
                        choi(make_erasure(er.env_state.matrix()(1, 1).real(), 2)).state.matrix())
                               .max_abs() <= 1e-9,
                       "erasure env form mismatch");
            seize.expect((seize_environment(EnvParamKind::Erasure, er).matrix() -
                          er.env_state.matrix())
                                 .max_abs() <= 1e-9,
                         "erasure seizing failed");

            std::vector<double> p = rng.random_probability_vector(3);
            EnvParamChannel dp = env_form_dephasing(p, 3);
            env.expect((choi(dp.realize()).state.matrix() - choi(make_dephasing(p, 3)).state.matrix())
                               .max_abs() <= 1e-9,
                       "dephasing env form mismatch");
            seize.expect((seize_environment(EnvParamKind::Dephasing, dp).matrix() -
                          dp.env_state.matrix())
                                 .max_abs() <= 1e-9,
                         "dephasing seizing failed");

            const double eta = rng.uniform(), gp = rng.uniform();
            EnvParamChannel gad = env_form_gad(eta, gp);
            env.expect((choi(gad.realize()).state.matrix() - choi(make_gad(eta, gp)).state.matrix())
                               .max_abs() <= 1e-9,
                       "gad env form mismatch");
        }
        // cq environment form on a few draws (heavier dimensions).
        Rng rng2 = master.derive(3);
        for (int it = 0; it < 5; ++it) {
            CqChannel cq = random_cq(rng2, 2, 2);
            EnvParamChannel e = env_form_cq(cq);
            env.expect((choi(e.realize()).state.matrix() - choi(cq.as_channel()).state.matrix())
                               .max_abs() <= 1e-9,
                       "cq env form mismatch");
        }
    }
    rep.properties.push_back(env);
    rep.properties.push_back(seize);

    PropertyReport super{"superchannels preserve CPTP"};
    {
        Rng rng = master.derive(5);
        for (int it = 0; it < 100; ++it) {
            QuantumChannel ch = random_channel(rng, 2, 2, 2);
            QuantumChannel pre = random_channel(rng, 2, 4, 2);
            QuantumChannel post = random_channel(rng, 4, 2, 2);
            QuantumChannel out = superchannel_apply(pre, post, ch);
            ComplexMatrix sum(out.dim_in(), out.dim_in());
            for (const auto& k : out.kraus()) sum += k.dagger() * k;
            super.expect((sum - ComplexMatrix::identity(out.dim_in())).max_abs() <= 1e-9,
                         "superchannel output not CPTP");
        }
    }
    rep.properties.push_back(super);
    return rep;
}

inline SuiteReport chandiv(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "chandiv";
    Rng master(seed);
    ChannelDivOptions fast;
    fast.multistarts = 4;
    fast.max_iters = 80;
    fast.seed = seed;

    PropertyReport amort{"amortization never below the plain divergence"};
    {
        Rng rng = master.derive(1);
        AmortizedSearchOptions aopt;
        aopt.restarts = 2;
        aopt.nm_iters = 120;
        aopt.seed = seed;
        aopt.seed_search = fast;
        for (int it = 0; it < 3; ++it) {
            QuantumChannel n = random_channel(rng, 2, 2, 2);
            QuantumChannel m = random_channel(rng, 2, 2, 3);
            for (auto kind : {DivergenceKind::relative(), DivergenceKind::max()}) {
                ChannelDivergenceResult plain = channel_divergence(kind, n, m, {}, fast);
                ChannelDivergenceResult am = amortized_lower_search(kind, n, m, aopt);
                amort.expect(am.value.bits >= plain.value.bits - 1e-6,
                             "amortized search fell below the plain value");
            }
        }
    }
    rep.properties.push_back(amort);

    PropertyReport dmax{"max-divergence Choi form dominates sampled inputs"};
    {
        Rng rng = master.derive(2);
        for (int pair = 0; pair < 100; ++pair) {
            QuantumChannel n = random_channel(rng, 3, 3, 9);
            QuantumChannel m = random_channel(rng, 3, 3, 9);
            const double val = dmax_channel(n, m).bits;
            Rng sampler = rng.derive(pair);
            for (int s = 0; s < 10; ++s) {
                PureState psi = sampler.random_pure(9);
                const double at = max_relative_entropy(apply_with_reference(n, psi.density(), 3),
                                                       apply_with_reference(m, psi.density(), 3))
                                      .bits;
                dmax.expect(at <= val + 1e-8, "sampled input beats the Choi value");
            }
            PureState phi = PureState::maximally_entangled(3);
            const double at_phi = max_relative_entropy(apply_with_reference(n, phi.density(), 3),
                                                       apply_with_reference(m, phi.density(), 3))
                                      .bits;
            dmax.expect(std::abs(at_phi - val) <= 1e-9, "Phi input does not attain the value");
        }
    }
    rep.properties.push_back(dmax);

    PropertyReport stab{"stability under an identity spectator"};
    {
        Rng rng = master.derive(3);
        for (int it = 0; it < 2; ++it) {
            QuantumChannel n = make_gad(0.2 + 0.3 * rng.uniform(), rng.uniform());
            QuantumChannel m = make_gad(0.2 + 0.3 * rng.uniform(), rng.uniform());
            ChannelDivergenceResult base =
                channel_divergence(DivergenceKind::relative(), n, m, {}, fast);
            QuantumChannel big_n = channel_tensor(identity_channel(2), n);
            QuantumChannel big_m = channel_tensor(identity_channel(2), m);
            ChannelDivOptions wopt = fast;
            wopt.multistarts = 6;
            if (base.optimizer) {
                //

                // Embed the base optimizer as |0>_R' (x) psi.
                std::vector<Complex> v(16, Complex(0.0, 0.0));
                const auto& amps = base.optimizer->amplitudes();
                // psi lives on R(2) (x) A(2); the doubled channel input is
                // R(4) (x) [R'(2) A(2)] with R = R' (x) R_old reshuffled; use
                // the plain embedding on the first block.
                for (std::size_t r = 0; r < 2; ++r)
                    for (std::size_t a = 0; a < 2; ++a) v[(r * 2 + 0) * 4 + 0 * 2 + a] = amps[r * 2 + a];
                wopt.warm_starts.push_back(PureState::normalized(std::move(v)));
            }
            ChannelDivergenceResult doubled =
                channel_divergence(DivergenceKind::relative(), big_n, big_m, {}, wopt);
            stab.expect(doubled.value.bits >= base.value.bits - 1e-7,
                        "spectator lowered the divergence");
            stab.expect(doubled.value.bits <= base.value.bits + 1e-5,
                        "spectator raised the divergence");
            // The closed-form max divergence is exactly stable.
            stab.expect(std::abs(dmax_channel(big_n, big_m).bits - dmax_channel(n, m).bits) <= 1e-7,
                        "dmax not stable under a spectator");
        }
    }
    rep.properties.push_back(stab);

    PropertyReport convex{"joint convexity spot check"};
    {
        Rng rng = master.derive(4);
        AmortizedSearchOptions aopt;
        aopt.restarts = 2;
        aopt.nm_iters = 100;
        aopt.seed = seed;
        aopt.seed_search = fast;
        for (int it = 0; it < 5; ++it) {
            QuantumChannel n0 = random_channel(rng, 2, 2, 2), n1 = random_channel(rng, 2, 2, 2);
            QuantumChannel m0 = random_channel(rng, 2, 2, 2), m1 = random_channel(rng, 2, 2, 2);
            const double w = rng.uniform();
            std::vector<ComplexMatrix> mixed_n, mixed_m;
            for (const auto& k : n0.kraus()) mixed_n.push_back(k * Complex(std::sqrt(w), 0.0));
            for (const auto& k : n1.kraus()) mixed_n.push_back(k * Complex(std::sqrt(1.0 - w), 0.0));
            for (const auto& k : m0.kraus()) mixed_m.push_back(k * Complex(std::sqrt(w), 0.0));
            for (const auto& k : m1.kraus()) mixed_m.push_back(k * Complex(std::sqrt(1.0 - w), 0.0));
            QuantumChannel nbar(2, 2, mixed_n), mbar(2, 2, mixed_m);
            ChannelDivergenceResult mix_lower =
                amortized_lower_search(DivergenceKind::max(), nbar, mbar, aopt);
            const double rhs = w * dmax_channel(n0, m0).bits + (1.0 - w) * dmax_channel(n1, m1).bits;
            convex.expect(mix_lower.value.bits <= rhs + 1e-6, "joint convexity violated");
        }
    }
    rep.properties.push_back(convex);

    PropertyReport gad{"covariant z-scan matches the unrestricted search"};
    {
        Rng rng = master.derive(5);
        for (int it = 0; it < 3; ++it) {
            QuantumChannel n = make_gad(rng.uniform(), rng.uniform());
            QuantumChannel m = make_gad(rng.uniform(), rng.uniform());
            if (choi_support_violated(n, m)) continue;
            ChannelDivOptions opt = fast;
            opt.multistarts = 10;
            opt.max_iters = 150;
            ChannelDivergenceResult free =
                channel_divergence(DivergenceKind::relative(), n, m, {}, opt);
            const double scan = covariant_z_scan(n, m, 1001);
            gad.expect(std::abs(free.value.bits - scan) <= 1e-5, "z-scan mismatch");
        }
    }
    rep.properties.push_back(gad);
    return rep;
}

inline SuiteReport exponents(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "exponents";
    Rng master(seed);
    ChannelDivOptions fast;
    fast.multistarts = 4;
    fast.max_iters = 60;
    fast.seed = seed;

    PropertyReport bracket{"Stein bracket D(N||M) <= D_max(N||M)"};
    {
        Rng rng = master.derive(1);
        for (int it = 0; it < 100; ++it) {
            QuantumChannel n = random_channel(rng, 2, 2, 4);
            QuantumChannel m = random_channel(rng, 2, 2, 4);
            ChannelDivergenceResult lower =
                channel_divergence(DivergenceKind::relative(), n, m, {}, fast);
            bracket.expect(lower.value.bits <= dmax_channel(n, m).bits + 1e-7,
                           "achievability exceeded the strong converse");
        }
    }
    rep.properties.push_back(bracket);

    PropertyReport strong{"cq strong-Stein threshold behaviour"};
    PropertyReport mono{"monotonicity in the rate r"};
    {
        Rng rng = master.derive(2);
        for (int it = 0; it < 10; ++it) {
            CqChannel n = random_cq(rng, 2, 2), m = random_cq(rng, 2, 2);
            double max_d = 0.0;
            for (std::size_t x = 0; x < 2; ++x)
                max_d = std::max(max_d, relative_entropy(n.outputs()[x], m.outputs()[x]).bits);
            if (std::isinf(max_d)) continue;
            TypedChannel tn = TypedChannel::from_cq(n), tm = TypedChannel::from_cq(m);
            strong.expect(sc_exponent_lower(tn, tm, max_d + 0.05, fast) > 0.0,
                          "no decay above the Stein rate");
            strong.expect(sc_exponent_lower(tn, tm, std::max(1e-6, max_d - 0.05), fast) <= 1e-9,
                          "spurious decay below the Stein rate");

            double prev_hk = -1.0, prev_hoeff = kInf;
            for (double r : {0.2, 0.5, 1.0, 2.0, 4.0}) {
                BoundsReport hk = cq_exponents(n, m, Setting::han_kobayashi(r));
                mono.expect(hk.lower >= prev_hk - 1e-9, "HK value decreased in r");
                prev_hk = hk.lower;
                BoundsReport ho = cq_exponents(n, m, Setting::hoeffding(r));
                mono.expect(ho.lower <= prev_hoeff + 1e-9, "Hoeffding lower increased in r");
                prev_hoeff = ho.lower;
            }
        }
    }
    rep.properties.push_back(strong);
    rep.properties.push_back(mono);

    PropertyReport prior{"Chernoff prior only enters the finite-n term"};
    {
        Rng rng = master.derive(3);
        for (int it = 0; it < 3; ++it) {
            QuantumChannel n = random_channel(rng, 2, 2, 4);
            QuantumChannel m = random_channel(rng, 2, 2, 4);
            BoundsReport a =
                chernoff_report(TypedChannel::plain(n), TypedChannel::plain(m), 0.3, {}, fast);
            BoundsReport b =
                chernoff_report(TypedChannel::plain(n), TypedChannel::plain(m), 0.7, {}, fast);
            prior.expect(std::abs(a.lower - b.lower) <= 1e-9 && std::abs(a.upper - b.upper) <= 1e-9,
                         "asymptotic Chernoff report depends on the prior");
        }
    }
    rep.properties.push_back(prior);

    PropertyReport brackets_hold{"every report satisfies lower <= upper"};
    {
        Rng rng = master.derive(4);
        for (int it = 0; it < 10; ++it) {
            QuantumChannel n = random_channel(rng, 2, 2, 4);
            QuantumChannel m = random_channel(rng, 2, 2, 4);
            BoundsReport st =
                stein_report(TypedChannel::plain(n), TypedChannel::plain(m), 0.2, {}, fast);
            brackets_hold.expect(st.lower <= st.upper + 1e-6, "Stein bracket inverted");
            BoundsReport ch =
                chernoff_report(TypedChannel::plain(n), TypedChannel::plain(m), 0.5, {}, fast);
            brackets_hold.expect(ch.lower <= ch.upper + 1e-6, "Chernoff bracket inverted");
            CqChannel a = random_cq(rng, 2, 2), b = random_cq(rng, 2, 2);
            BoundsReport ho = cq_exponents(a, b, Setting::hoeffding(0.4));
            brackets_hold.expect(ho.lower <= ho.upper + 1e-6, "Hoeffding bracket inverted");
        }
    }
    rep.properties.push_back(brackets_hold);
    return rep;
}

inline SuiteReport protosim(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "protosim";
    Rng master(seed);

    PropertyReport valid{"trajectories stay valid states"};
    PropertyReport helstrom{"Helstrom error equals the trace-distance formula"};
    PropertyReport rescale{"Neyman-Pearson rescaling monotonicity"};
    {
        Rng rng = master.derive(1);
        for (int it = 0; it < 20; ++it) {
            QuantumChannel n = random_channel(rng, 2, 2, 2);
            QuantumChannel m = random_channel(rng, 2, 2, 2);
            std::vector<double> gen(64);
            for (auto& x : gen) x = 0.4 * rng.gaussian();
            AdaptiveStrategy s;
            s.rounds = 2;
            s.memory_dims = {2, 2};
            s.initial_state = rng.random_pure(4).density();
            s.adaptors.push_back(detail::adaptor_from_generator(gen.data(), 4, 4));
            const double p = 0.2 + 0.6 * rng.uniform();
            RunResult run = run_protocol(n, m, s, p);
            for (const auto& st : {run.outcome.final_n, run.outcome.final_m}) {
                valid.expect(std::abs(st.matrix().trace().real() - 1.0) <= 1e-9 &&
                                 min_eigenvalue(st.matrix()) >= -1e-9,
                             "invalid trajectory state");
            }
            const double err = p * run.outcome.alpha + (1.0 - p) * run.outcome.beta;
            const double formula =
                0.5 * (1.0 - trace_norm(run.outcome.final_n.matrix() * Complex(p, 0.0) -
                                        run.outcome.final_m.matrix() * Complex(1.0 - p, 0.0)));
            helstrom.expect(std::abs(err - formula) <= 1e-9, "Helstrom formula violated");

            HermitianOperator q =
                helstrom_measurement(run.outcome.final_n, run.outcome.final_m, 0.5);
            double prev_a = -1.0, prev_b = 2.0;
            for (double lam : {1.0, 0.7, 0.4, 0.1}) {
                const double a =
                    1.0 - lam * inner_product(q.matrix(), run.outcome.final_n.matrix()).real();
                const double b =
                    lam * inner_product(q.matrix(), run.outcome.final_m.matrix()).real();
                rescale.expect(a >= prev_a - 1e-12 && b <= prev_b + 1e-12,
                               "rescaling not monotone");
                prev_a = a;
                prev_b = b;
            }
        }
    }
    rep.properties.push_back(valid);
    rep.properties.push_back(helstrom);
    rep.properties.push_back(rescale);

    PropertyReport meta{"meta-converse on optimized protocols"};
    PropertyReport baseline{"adaptive dominates the non-adaptive baseline"};
    {
        Rng rng = master.derive(2);
        SeeSawOptions opt;
        opt.multistarts = 3;
        opt.outer_rounds = 4;
        opt.seed = seed;
        for (int it = 0; it < 3; ++it) {
            QuantumChannel n = random_channel(rng, 2, 2, 2);
            QuantumChannel m = random_channel(rng, 2, 2, 2);
            for (std::size_t rounds : {std::size_t(1), std::size_t(2)}) {
                OptimizedProtocol best = optimize_strategy(n, m, rounds, Setting::chernoff(0.5), opt);
                AmortizedUpper up = amortized_upper(DivergenceKind::max(), TypedChannel::plain(n),
                                                    TypedChannel::plain(m));
                MetaConverseResult res =
                    meta_converse_check(best.outcome, rounds, DivergenceKind::max(), up);
                meta.expect(res.holds, "meta-converse violated");
            }
            SphereSearchOptions bopt;
            bopt.multistarts = 4;
            bopt.max_iters = 100;
            bopt.seed = seed;
            OptimizedProtocol base = nonadaptive_baseline(n, m, 2, Setting::chernoff(0.5), bopt);
            SeeSawOptions aopt = opt;
            if (base.product_input) aopt.embed_inputs.push_back(*base.product_input);
            OptimizedProtocol adaptive = optimize_strategy(n, m, 2, Setting::chernoff(0.5), aopt);
            baseline.expect(adaptive.objective >= base.objective - 1e-8,
                            "adaptive optimizer fell below the baseline");
        }
    }
    rep.properties.push_back(meta);
    rep.properties.push_back(baseline);
    return rep;
}

}  // namespace suites

inline std::vector<SuiteReport> run_suites(const std::string& which, std::uint64_t seed) {
    std::vector<SuiteReport> reports;
    const bool all = which == "all";
    if (all || which == "divergences") reports.push_back(suites::divergences(seed));
    if (all || which == "channels") reports.push_back(suites::channels(seed));
    if (all || which == "chandiv") reports.push_back(suites::chandiv(seed));
    if (all || which == "exponents") reports.push_back(suites::exponents(seed));
    if (all || which == "protosim") reports.push_back(suites::protosim(seed));
    if (reports.empty()) throw DomainError("unknown suite: " + which);
    return reports;
}

}  // namespace qcd
