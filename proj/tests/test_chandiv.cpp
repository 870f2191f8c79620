#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qcd/chandiv.hpp"
#include "qcd/rng.hpp"

using namespace qcd;

namespace {

QuantumChannel random_channel(Rng& rng, std::size_t din, std::size_t dout, std::size_t env) {
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

CqChannel random_cq(Rng& rng, std::size_t alphabet, std::size_t dim) {
    std::vector<DensityMatrix> outs;
    for (std::size_t x = 0; x < alphabet; ++x) outs.push_back(rng.random_state(dim));
    return CqChannel(std::move(outs));
}

}  // namespace

TEST_CASE("channel divergence of identical channels is exactly zero") {
    Rng rng(42);
    QuantumChannel ch = random_channel(rng, 2, 2, 2);
    for (auto kind : {DivergenceKind::relative(), DivergenceKind::max(), DivergenceKind::chernoff()}) {
        ChannelDivergenceResult r = channel_divergence(kind, ch, ch);
        CHECK(r.value.bits == 0.0);
        CHECK(r.certification == Certification::Exact);
        CHECK(r.rule == "identical-channels");
    }
}

TEST_CASE("cq channel divergence collapses to the best letter") {
    Rng rng(1);
    CqChannel n = random_cq(rng, 3, 2);
    CqChannel m = random_cq(rng, 3, 2);

    ChannelDivergenceResult exact = channel_divergence_cq(DivergenceKind::relative(), n, m);
    double max_x = -1e300;
    for (std::size_t x = 0; x < 3; ++x)
        max_x = std::max(max_x, relative_entropy(n.outputs()[x], m.outputs()[x]).bits);
    CHECK(exact.value.bits == Catch::Approx(max_x).margin(1e-12));
    CHECK(exact.certification == Certification::Exact);

    // The generic multistart search approaches the same value from below.
    ChannelDivOptions opt;
    opt.multistarts = 12;
    ChannelDivergenceResult generic =
        channel_divergence(DivergenceKind::relative(), n.as_channel(), m.as_channel(), {}, opt);
    CHECK(generic.value.bits <= max_x + 1e-7);
    CHECK(generic.value.bits >= max_x - 1e-5);

    CHECK_THROWS_AS(channel_divergence_cq(DivergenceKind::petz(3.0), n, m), Unsupported);
}

TEST_CASE("GAD channel divergence matches the covariant z-scan") {
    QuantumChannel n = make_gad(0.2, 0.3);
    QuantumChannel m = make_gad(0.3, 0.6);
    const double scan = covariant_z_scan(n, m, 1001);
    ChannelDivOptions opt;
    opt.multistarts = 16;
    ChannelDivergenceResult free = channel_divergence(DivergenceKind::relative(), n, m, {}, opt);
    CHECK(std::abs(free.value.bits - scan) < 1e-5);
}

TEST_CASE("energy-constrained channel divergence") {
    QuantumChannel n = make_gad(0.2, 0.3);
    QuantumChannel m = make_gad(0.3, 0.6);
    ComplexMatrix hmat(2, 2);
    hmat(1, 1) = 1.0;  // energy of |1>
    Hamiltonian h{HermitianOperator(hmat)};

    // E = 1 never binds for a qubit with H = |1><1|.
    ChannelDivOptions opt;
    opt.multistarts = 10;
    ChannelDivergenceResult free = channel_divergence(DivergenceKind::relative(), n, m, {}, opt);
    ChannelDivergenceResult loose =
        channel_divergence(DivergenceKind::relative(), n, m, EnergyConstraint(h, 1.0), opt);
    CHECK(loose.value.bits == Catch::Approx(free.value.bits).margin(1e-5));

    // E = 0 pins the input to the ground state |0>.
    ChannelDivergenceResult tight =
        channel_divergence(DivergenceKind::relative(), n, m, EnergyConstraint(h, 0.0), opt);
    DensityMatrix g = PureState::basis_state(2, 0).density();
    const double expect = relative_entropy(n.apply(g), m.apply(g)).bits;
    CHECK(tight.value.bits == Catch::Approx(expect).margin(1e-6));

    // Constrained scan oracle at an intermediate energy cap.
    const double cap = 0.2;
    double oracle = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double z = i / 2000.0;  // population of |1>
        if (z > cap + 1e-12) continue;
        std::vector<Complex> v(4, Complex(0.0, 0.0));
        v[0] = std::sqrt(1.0 - z);
        v[3] = std::sqrt(z);
        PureState psi = PureState::normalized(std::move(v));
        oracle = std::max(oracle, relative_entropy(apply_with_reference(n, psi.density(), 2),
                                                   apply_with_reference(m, psi.density(), 2))
                                      .bits);
    }
    ChannelDivergenceResult mid =
        channel_divergence(DivergenceKind::relative(), n, m, EnergyConstraint(h, cap), opt);
    CHECK(mid.value.bits == Catch::Approx(oracle).margin(1e-4));

    CHECK_THROWS_AS(EnergyConstraint(h, -0.5), DomainError);
}

TEST_CASE("dmax channel closed form") {
    Rng rng(2);
    QuantumChannel ch = random_channel(rng, 2, 2, 2);
    CHECK(dmax_channel(ch, ch).bits == Catch::Approx(0.0).margin(1e-9));

    // Erasure pair: Choi states are classical mixtures, scalar ratio oracle.
    for (auto [p, q] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {0.1, 0.8}, {0.6, 0.2}}) {
        const double got = dmax_channel(make_erasure(p, 2), make_erasure(q, 2)).bits;
        const double expect = std::log2(std::max((1.0 - p) / (1.0 - q), p / q));
        CHECK(got == Catch::Approx(expect).margin(1e-9));
    }

    for (int it = 0; it < 20; ++it) {
        // Full Kraus rank keeps the Choi states full rank (finite D_max).
        QuantumChannel n = random_channel(rng, 3, 3, 9);
        QuantumChannel m = random_channel(rng, 3, 3, 9);
        const double val = dmax_channel(n, m).bits;

        // Bisection oracle on the Choi pair.
        ComplexMatrix cn = choi(n).state.matrix();
        ComplexMatrix cm = choi(m).state.matrix();
        double lo = -5.0, hi = 60.0;
        for (int k = 0; k < 220; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (min_eigenvalue(cm * Complex(std::pow(2.0, mid), 0.0) - cn) >= -1e-13)
                hi = mid;
            else
                lo = mid;
        }
        CHECK(std::abs(val - hi) < 1e-8);

        // Dominates every sampled pure-input value, equality at Phi.
        Rng sampler = rng.derive(it);
        for (int s = 0; s < 10; ++s) {
            PureState psi = sampler.random_pure(9);
            const double at_psi = max_relative_entropy(apply_with_reference(n, psi.density(), 3),
                                                       apply_with_reference(m, psi.density(), 3))
                                      .bits;
            CHECK(at_psi <= val + 1e-8);
        }
        PureState phi = PureState::maximally_entangled(3);
        const double at_phi = max_relative_entropy(apply_with_reference(n, phi.density(), 3),
                                                   apply_with_reference(m, phi.density(), 3))
                                  .bits;
        CHECK(at_phi == Catch::Approx(val).margin(1e-9));
    }

    // Rank-deficient alternative Choi: support violation forces +infinity,
    // matching an infeasible operator inequality at any finite lambda.
    QuantumChannel low_rank = random_channel(rng, 3, 3, 2);
    QuantumChannel full_rank = random_channel(rng, 3, 3, 9);
    CHECK(dmax_channel(full_rank, low_rank).is_infinite());
    ComplexMatrix gap = choi(low_rank).state.matrix() * Complex(std::pow(2.0, 80.0), 0.0) -
                        choi(full_rank).state.matrix();
    CHECK(min_eigenvalue(gap) < -1e-10);
}

TEST_CASE("amortized lower search") {
    Rng rng(3);
    QuantumChannel ch = random_channel(rng, 2, 2, 2);

    AmortizedSearchOptions opt;
    opt.restarts = 2;
    opt.nm_iters = 120;
    opt.seed_search.multistarts = 6;

    // Identical channels: amortized gain can never exceed zero.
    ChannelDivergenceResult same =
        amortized_lower_search(DivergenceKind::relative(), ch, ch, opt);
    CHECK(same.value.bits <= 1e-8);
    CHECK(same.value.bits >= -1e-12);

    // Max kind: bounded by the Choi closed form.
    QuantumChannel n = random_channel(rng, 2, 2, 2);
    QuantumChannel m = random_channel(rng, 2, 2, 3);
    ChannelDivergenceResult dm = amortized_lower_search(DivergenceKind::max(), n, m, opt);
    CHECK(dm.value.bits <= dmax_channel(n, m).bits + 1e-6);

    // Never below the plain channel divergence (seeded there).
    ChannelDivergenceResult plain = channel_divergence(DivergenceKind::relative(), n, m, {},
                                                       opt.seed_search);
    ChannelDivergenceResult amort = amortized_lower_search(DivergenceKind::relative(), n, m, opt);
    CHECK(amort.value.bits >= plain.value.bits - 1e-6);

    // cq pair: random amortized samples never beat the best letter.
    CqChannel cqn = random_cq(rng, 2, 2);
    CqChannel cqm = random_cq(rng, 2, 2);
    double max_x = 0.0;
    for (std::size_t x = 0; x < 2; ++x)
        max_x = std::max(max_x, relative_entropy(cqn.outputs()[x], cqm.outputs()[x]).bits);
    QuantumChannel qn = cqn.as_channel(), qm = cqm.as_channel();
    const std::size_t r = 4, d = r * 2;
    for (int s = 0; s < 200; ++s) {
        Rng local = rng.derive(1000 + s);
        DensityMatrix rho = local.random_state(d);
        DensityMatrix sigma = local.random_state(d);
        const double cost = relative_entropy(rho, sigma).bits;
        if (std::isinf(cost)) continue;
        const double gain = relative_entropy(apply_with_reference(qn, rho, r),
                                             apply_with_reference(qm, sigma, r))
                                .bits;
        CHECK(gain - cost <= max_x + 1e-7);
    }
}

TEST_CASE("amortized upper dispatch") {
    Rng rng(4);
    CqChannel cqn = random_cq(rng, 3, 2);
    CqChannel cqm = random_cq(rng, 3, 2);
    TypedChannel tn = TypedChannel::from_cq(cqn);
    TypedChannel tm = TypedChannel::from_cq(cqm);

    // cq + sandwiched(2): best-letter collapse.
    AmortizedUpper up = amortized_upper(DivergenceKind::sandwiched(2.0), tn, tm);
    double expect = 0.0;
    for (std::size_t x = 0; x < 3; ++x)
        expect = std::max(expect, sandwiched_renyi(cqn.outputs()[x], cqm.outputs()[x], 2.0).bits);
    CHECK(up.rule == UpperRule::CqCollapse);
    CHECK(up.value.bits == Catch::Approx(expect).margin(1e-10));

    // GAD pair with equal transmissivity: environment bound = binary KL.
    TypedChannel gn = TypedChannel::from_env(env_form_gad(0.5, 0.15));
    TypedChannel gm = TypedChannel::from_env(env_form_gad(0.5, 0.6));
    AmortizedUpper env_up = amortized_upper(DivergenceKind::relative(), gn, gm);
    CHECK(env_up.rule == UpperRule::EnvParam);
    const double dkl = 0.15 * std::log2(0.15 / 0.6) + 0.85 * std::log2(0.85 / 0.4);
    CHECK(env_up.value.bits == Catch::Approx(dkl).margin(1e-10));

    // The GAD env realization reproduces make_gad.
    CHECK((choi(gn.channel).state.matrix() - choi(make_gad(0.5, 0.15)).state.matrix()).max_abs() <
          1e-9);

    // Max kind always collapses through the Choi form.
    QuantumChannel n = random_channel(rng, 2, 2, 2);
    QuantumChannel m = random_channel(rng, 2, 2, 2);
    AmortizedUpper dm = amortized_upper(DivergenceKind::max(), TypedChannel::plain(n),
                                        TypedChannel::plain(m));
    CHECK(dm.rule == UpperRule::DmaxCollapse);
    CHECK(dm.value.bits == Catch::Approx(dmax_channel(n, m).bits).margin(1e-12));

    // No rule claimed: Petz(0.5) on arbitrary channels.
    AmortizedUpper unk = amortized_upper(DivergenceKind::petz(0.5), TypedChannel::plain(n),
                                         TypedChannel::plain(m));
    CHECK(unk.rule == UpperRule::Unknown);

    // Replacer target: relative entropy collapses to the channel divergence.
    DensityMatrix tau = rng.random_state(2);
    TypedChannel rep = TypedChannel::from_replacer(tau, 2);
    ChannelDivOptions copt;
    copt.multistarts = 8;
    AmortizedUpper rup = amortized_upper(DivergenceKind::relative(), TypedChannel::plain(n), rep,
                                         {}, copt);
    CHECK(rup.rule == UpperRule::Replacer);
    ChannelDivergenceResult plain = channel_divergence(DivergenceKind::relative(), n, rep.channel,
                                                       {}, copt);
    CHECK(rup.value.bits == Catch::Approx(plain.value.bits).margin(1e-6));
}

TEST_CASE("gad bounds grid") {
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};

    // Distinct transmissivities: difference is never negative.
    std::vector<GadCell> cells = gad_bounds_grid(0.2, 0.3, grid);
    REQUIRE(cells.size() == 25);
    for (const auto& c : cells) {
        CHECK(c.diff >= -1e-8);
        CHECK_FALSE(c.env_upper.has_value());
    }

    // Equal transmissivities: diagonal zero, environment bound everywhere.
    std::vector<GadCell> same = gad_bounds_grid(0.5, 0.5, grid);
    for (const auto& c : same) {
        if (c.p1 == c.p2) {
            CHECK(c.lower == 0.0);
            CHECK(c.upper == 0.0);
            CHECK(c.diff == 0.0);
        } else {
            REQUIRE(c.env_upper.has_value());
            CHECK(*c.env_upper >= c.lower - 1e-8);
            CHECK(c.diff >= -1e-8);
        }
    }

    // Degenerate 2-step grid: corners only.
    std::vector<GadCell> corners = gad_bounds_grid(0.2, 0.3, {0.0, 1.0});
    CHECK(corners.size() == 4);
}
