#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qcd/divergence.hpp"
#include "qcd/rng.hpp"

using namespace qcd;

namespace {

DensityMatrix diag_state(const std::vector<double>& p) {
    ComplexMatrix m(p.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
    return DensityMatrix::trusted(std::move(m));
}

DensityMatrix ket0() { return PureState::basis_state(2, 0).density(); }
DensityMatrix ket1() { return PureState::basis_state(2, 1).density(); }
DensityMatrix ket_plus() {
    return PureState::normalized({Complex(1.0, 0.0), Complex(1.0, 0.0)}).density();
}

// Random CPTP map via a Stinespring isometry, applied directly.
DensityMatrix apply_random_cptp(Rng& rng, const DensityMatrix& rho, std::size_t d_out,
                                std::size_t env) {
    const std::size_t d_in = rho.dim();
    ComplexMatrix u = rng.random_unitary(d_out * env);
    ComplexMatrix v(d_out * env, d_in);
    for (std::size_t i = 0; i < d_out * env; ++i)
        for (std::size_t j = 0; j < d_in; ++j) v(i, j) = u(i, j);
    ComplexMatrix big = v * rho.matrix() * v.dagger();
    return DensityMatrix(HermitianOperator(partial_trace(big, Keep::First, d_out, env)));
}

double classical_renyi(const std::vector<double>& p, const std::vector<double>& q, double a) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0 && q[i] > 0.0) s += std::pow(p[i], a) * std::pow(q[i], 1.0 - a);
    return std::log2(s) / (a - 1.0);
}

double classical_kl(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) s += p[i] * (std::log2(p[i]) - std::log2(q[i]));
    return s;
}

}  // namespace

TEST_CASE("relative entropy basics") {
    Rng rng(42);
    DensityMatrix rho = rng.random_state(3);
    CHECK(relative_entropy(rho, rho).bits == Catch::Approx(0.0).margin(1e-10));
    CHECK(relative_entropy(ket0(), DensityMatrix::maximally_mixed(2)).bits ==
          Catch::Approx(1.0).margin(1e-10));
    CHECK(relative_entropy(ket0(), ket1()).is_infinite());
    CHECK_THROWS_AS(relative_entropy(rho, DensityMatrix::maximally_mixed(2)), DimError);
}

TEST_CASE("petz Renyi divergence") {
    Rng rng(1);
    DensityMatrix rho = rng.random_state(3);
    DensityMatrix sigma = rng.random_state(3);

    // alpha = 0 with full-rank rho: projector is the identity.
    CHECK(petz_renyi(rho, sigma, 0.0).bits == Catch::Approx(0.0).margin(1e-9));

    // Pure states |0>, |+>: Tr[rho^1/2 sigma^1/2] = Tr[rho sigma] = 1/2, so
    // D_1/2 = -2 log2(1/2) = 2.
    CHECK(petz_renyi(ket0(), ket_plus(), 0.5).bits == Catch::Approx(2.0).margin(1e-9));

    // Limit alpha -> 1 approaches the relative entropy.
    const double d = relative_entropy(rho, sigma).bits;
    CHECK(std::abs(petz_renyi(rho, sigma, 1.0 + 1e-4).bits - d) < 1e-3);
    CHECK(std::abs(petz_renyi(rho, sigma, 1.0 - 1e-4).bits - d) < 1e-3);

    // Case splits.
    CHECK(petz_renyi(ket0(), ket1(), 0.5).is_infinite());
    CHECK(petz_renyi(ket_plus(), ket0(), 2.0).is_infinite());
    CHECK_THROWS_AS(petz_renyi(rho, sigma, -0.5), DomainError);
}

TEST_CASE("sandwiched Renyi divergence") {
    Rng rng(2);
    for (int it = 0; it < 100; ++it) {
        DensityMatrix rho = rng.random_state(2 + it % 3);
        DensityMatrix sigma = rng.random_state(2 + it % 3);
        const double lhs = sandwiched_renyi(rho, sigma, 0.5).bits;
        const double rhs = -std::log2(fidelity(rho, sigma));
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }

    // Commuting diagonal states reduce to the classical Renyi divergence.
    std::vector<double> p{0.6, 0.3, 0.1}, q{0.2, 0.5, 0.3};
    for (double a : {0.4, 0.75, 1.5, 3.0}) {
        // Sandwiching is trivial in a common eigenbasis.
        CHECK(sandwiched_renyi(diag_state(p), diag_state(q), a).bits ==
              Catch::Approx(classical_renyi(p, q, a)).margin(1e-9));
    }

    DensityMatrix rho = rng.random_state(4);
    for (double a : {0.5, 2.0, 10.0}) CHECK(std::abs(sandwiched_renyi(rho, rho, a).bits) < 1e-9);

    const double d = relative_entropy(rho, rng.random_state(4).matrix().trace().real() > 0
                                               ? rng.random_state(4)
                                               : rho)
                         .bits;
    (void)d;
    CHECK(sandwiched_renyi(ket_plus(), ket0(), 2.0).is_infinite());
}

TEST_CASE("max relative entropy with bisection oracle") {
    Rng rng(3);
    DensityMatrix rho = rng.random_state(3);
    CHECK(max_relative_entropy(rho, rho).bits == Catch::Approx(0.0).margin(1e-9));
    CHECK(max_relative_entropy(ket0(), DensityMatrix::maximally_mixed(2)).bits ==
          Catch::Approx(1.0).margin(1e-9));

    for (int it = 0; it < 20; ++it) {
        DensityMatrix a = rng.random_state(3);
        DensityMatrix b = rng.random_state(3);
        const double val = max_relative_entropy(a, b).bits;
        // Bisection on the operator inequality 2^lambda sigma - rho >= 0.
        double lo = -10.0, hi = 40.0;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            ComplexMatrix gap = b.matrix() * Complex(std::pow(2.0, mid), 0.0) - a.matrix();
            if (min_eigenvalue(gap) >= -1e-13)
                hi = mid;
            else
                lo = mid;
        }
        CHECK(std::abs(val - hi) < 1e-8);
    }
}

TEST_CASE("log-Euclidean Renyi divergence") {
    Rng rng(4);
    // Commuting states: the exponents commute and D-flat equals Petz.
    std::vector<double> p{0.5, 0.3, 0.2}, q{0.25, 0.25, 0.5};
    for (double a : {0.3, 0.7}) {
        CHECK(log_euclidean_renyi(diag_state(p), diag_state(q), a).bits ==
              Catch::Approx(petz_renyi(diag_state(p), diag_state(q), a).bits).margin(1e-9));
    }

    for (int it = 0; it < 10; ++it) {
        DensityMatrix rho = rng.random_pd_state(3);
        DensityMatrix sigma = rng.random_pd_state(3);
        const double d = relative_entropy(rho, sigma).bits;
        CHECK(std::abs(log_euclidean_renyi(rho, sigma, 1.0 - 1e-4).bits - d) < 1e-2);
        // Upper member of the ordering chain at alpha = 1/2.
        CHECK(log_euclidean_renyi(rho, sigma, 0.5).bits >=
              petz_renyi(rho, sigma, 0.5).bits - 1e-9);
    }

    // Regularized path on singular inputs stays close to the commuting limit.
    std::vector<double> ps{0.7, 0.3, 0.0}, qs{0.5, 0.25, 0.25};
    const double direct = classical_renyi(ps, qs, 0.6);
    DivergenceValue reg = log_euclidean_renyi(diag_state(ps), diag_state(qs), 0.6);
    CHECK(std::abs(reg.bits - direct) < 1e-3);
}

TEST_CASE("Chernoff divergence") {
    Rng rng(5);
    DensityMatrix rho = rng.random_state(3);
    CHECK(chernoff(rho, rho).bits == Catch::Approx(0.0).margin(1e-8));
    CHECK(chernoff(ket0(), ket1()).is_infinite());

    // Commuting pair against a classical scalar grid oracle.
    std::vector<double> p{0.7, 0.2, 0.1}, q{0.1, 0.45, 0.45};
    double oracle = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double a = i / 100000.0;
        double s = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) s += std::pow(p[k], a) * std::pow(q[k], 1.0 - a);
        oracle = std::max(oracle, -std::log2(s));
    }
    CHECK(chernoff(diag_state(p), diag_state(q)).bits == Catch::Approx(oracle).margin(1e-7));

    // Symmetry.
    for (int it = 0; it < 10; ++it) {
        DensityMatrix a = rng.random_state(3);
        DensityMatrix b = rng.random_state(3);
        CHECK(std::abs(chernoff(a, b).bits - chernoff(b, a).bits) < 1e-8);
    }
}

TEST_CASE("Hilbert alpha divergence") {
    Rng rng(6);
    DensityMatrix rho = rng.random_state(3);
    DensityMatrix sigma = rng.random_state(3);
    for (double a : {1.0, 1.5, 3.0, 10.0}) CHECK(std::abs(hilbert_alpha(rho, rho, a).bits) < 1e-8);

    // alpha -> 1 limit matches the trace-distance expression.
    const double td = trace_norm(rho.matrix() - sigma.matrix()) / (2.0 * std::log(2.0));
    CHECK(std::abs(hilbert_alpha(rho, sigma, 1.0).bits - td) < 1e-12);
    CHECK(std::abs(hilbert_alpha(rho, sigma, 1.0 + 1e-4).bits - td) < 1e-4);

    // The bisection fixpoint satisfies g(t*) ~ 0 (eigen-split evaluation).
    const double alpha = 2.5;
    const double t_star = std::pow(2.0, hilbert_alpha(rho, sigma, alpha).bits * (alpha - 1.0) / alpha);
    ComplexMatrix diff = rho.matrix() - sigma.matrix() * Complex(t_star, 0.0);
    const double g = diff.trace().real() / alpha + (1.0 - 1.0 / alpha) * trace_of_positive_part(diff);
    CHECK(std::abs(g) < 1e-8);

    // Large alpha approaches the max-relative entropy.
    CHECK(std::abs(hilbert_alpha(rho, sigma, 1e7).bits - max_relative_entropy(rho, sigma).bits) <
          1e-4);
    CHECK_THROWS_AS(hilbert_alpha(rho, sigma, 0.9), DomainError);
}

TEST_CASE("state metrics") {
    Rng rng(7);
    DensityMatrix rho = rng.random_state(3);
    StateMetrics same = metrics(rho, rho);
    CHECK(same.trace_distance == Catch::Approx(0.0).margin(1e-9));
    CHECK(same.fidelity == Catch::Approx(1.0).margin(1e-9));
    CHECK(same.c_distance == Catch::Approx(0.0).margin(1e-4));
    CHECK(same.bures == Catch::Approx(0.0).margin(1e-4));

    StateMetrics orth = metrics(ket0(), ket1());
    CHECK(orth.trace_distance == Catch::Approx(1.0).margin(1e-9));
    CHECK(orth.fidelity == Catch::Approx(0.0).margin(1e-9));
    CHECK(orth.c_distance == Catch::Approx(1.0).margin(1e-9));
    CHECK(orth.bures == Catch::Approx(std::sqrt(2.0)).margin(1e-9));

    // Fuchs-van-de-Graaf.
    for (int it = 0; it < 50; ++it) {
        DensityMatrix a = rng.random_state(2 + it % 4);
        DensityMatrix b = rng.random_state(2 + it % 4);
        StateMetrics m = metrics(a, b);
        CHECK(m.trace_distance <= std::sqrt(1.0 - m.fidelity) + 1e-9);
    }
}

TEST_CASE("binary divergence") {
    CHECK(binary_divergence(0.3, 0.3, DivergenceKind::relative()).bits ==
          Catch::Approx(0.0).margin(1e-10));
    CHECK(binary_divergence(1.0, 0.25, DivergenceKind::relative()).bits ==
          Catch::Approx(2.0).margin(1e-9));
    // Matrix-path equivalence.
    const double via_states =
        relative_entropy(binary_state(0.8), binary_state(0.4)).bits;
    CHECK(binary_divergence(0.8, 0.4, DivergenceKind::relative()).bits ==
          Catch::Approx(via_states).margin(1e-12));
    CHECK_THROWS_AS(binary_divergence(1.2, 0.5, DivergenceKind::relative()), DomainError);
}

TEST_CASE("divergence sphere") {
    Rng rng(8);
    DensityMatrix rho = rng.random_pd_state(2);

    // Identical states: value stays non-positive for any r > 0.
    CHECK(divergence_sphere(rho, rho, 0.7).bits <= 1e-12);

    // Commuting pair against brute-force constrained minimization on the
    // probability simplex.
    std::vector<double> p{0.75, 0.25}, q{0.3, 0.7};
    DensityMatrix P = diag_state(p), Q = diag_state(q);
    const double r = 0.5 * classical_kl(p, q);
    double oracle = kInf;
    const int grid = 200000;
    for (int i = 1; i < grid; ++i) {
        const double t = static_cast<double>(i) / grid;
        std::vector<double> tau{t, 1.0 - t};
        if (classical_kl(tau, q) <= r) oracle = std::min(oracle, classical_kl(tau, p));
    }
    DivergenceValue got = divergence_sphere(P, Q, r);
    CHECK(std::abs(got.bits - oracle) < 1e-4);
    CHECK_FALSE(got.regime_unverified);

    // r beyond D(rho||sigma) trivializes the constrained problem.
    CHECK(divergence_sphere(P, Q, 10.0).regime_unverified);

    // r -> 0+ approaches -inf_alpha ((alpha-1)/alpha) D-flat_alpha, the
    // constrained minimization collapsing onto the sigma-centered sphere.
    DensityMatrix a = rng.random_pd_state(2);
    DensityMatrix b = rng.random_pd_state(2);
    double limit = -kInf;
    for (int i = 1; i < 1000; ++i) {
        const double al = 1e-3 + (1.0 - 2e-3) * i / 1000.0;
        limit = std::max(limit, ((1.0 - al) / al) * log_euclidean_renyi(a, b, al).bits);
    }
    CHECK(divergence_sphere(a, b, 1e-9).bits == Catch::Approx(limit).margin(1e-3));
    // At vanishing radius the sphere value dominates D(sigma||rho).
    CHECK(divergence_sphere(a, b, 1e-9).bits >= relative_entropy(b, a).bits - 0.05);
}

TEST_CASE("generalized Fuchs-van-de-Graaf inequality") {
    Rng rng(9);
    DensityMatrix rho = rng.random_state(3);
    FvdgResult eq = fvdg_check(rho.matrix(), rho.matrix());
    CHECK(eq.holds);
    CHECK(eq.slack == Catch::Approx(0.0).margin(1e-9));  // 0 + 4 = 4

    FvdgResult half = fvdg_check(rho.matrix(), ComplexMatrix::zero(3, 3));
    CHECK(half.holds);
    CHECK(half.slack == Catch::Approx(0.0).margin(1e-9));

    for (int it = 0; it < 200; ++it) {
        const std::size_t d = 2 + it % 5;
        ComplexMatrix ga = rng.ginibre(d, d), gb = rng.ginibre(d, d);
        FvdgResult res = fvdg_check(ga * ga.dagger() * Complex(0.2, 0.0),
                                    gb * gb.dagger() * Complex(0.11, 0.0));
        CHECK(res.slack >= -1e-10);
    }

    ComplexMatrix not_psd{{1.0, 0.0}, {0.0, -1.0}};
    CHECK_THROWS_AS(fvdg_check(not_psd, not_psd), DomainError);
}

TEST_CASE("data processing for every claimed kind") {
    Rng rng(42);
    std::vector<DivergenceKind> kinds = {
        DivergenceKind::relative(),        DivergenceKind::petz(0.3),
        DivergenceKind::petz(0.7),         DivergenceKind::petz(1.5),
        DivergenceKind::petz(2.0),         DivergenceKind::sandwiched(0.5),
        DivergenceKind::sandwiched(1.5),   DivergenceKind::sandwiched(3.0),
        DivergenceKind::max(),             DivergenceKind::chernoff(),
        DivergenceKind::hilbert(1.0),      DivergenceKind::hilbert(2.0),
        DivergenceKind::trace_dist(),      DivergenceKind::c_dist(),
        DivergenceKind::bures()};
    for (const auto& k : kinds) REQUIRE(has_data_processing(k));

    for (int it = 0; it < 30; ++it) {
        Rng local = rng.derive(it);
        const std::size_t d = 3;
        DensityMatrix rho = local.random_state(d);
        DensityMatrix sigma = local.random_state(d);
        Rng chan = local.derive(999);
        Rng chan2 = chan;
        DensityMatrix nrho = apply_random_cptp(chan, rho, d, d);
        DensityMatrix nsigma = apply_random_cptp(chan2, sigma, d, d);
        for (const auto& k : kinds) {
            const double before = evaluate(k, rho, sigma).bits;
            const double after = evaluate(k, nrho, nsigma).bits;
            INFO(k.name());
            CHECK(after <= before + 1e-8);
        }
        // Fidelity is non-decreasing under channels.
        CHECK(fidelity(nrho, nsigma) >= fidelity(rho, sigma) - 1e-8);
    }
}

TEST_CASE("Renyi ordering chain") {
    Rng rng(77);
    for (int it = 0; it < 30; ++it) {
        DensityMatrix rho = rng.random_pd_state(3);
        DensityMatrix sigma = rng.random_pd_state(3);
        for (double a : {0.3, 0.7}) {
            const double petz = petz_renyi(rho, sigma, a).bits;
            const double sand = sandwiched_renyi(rho, sigma, a).bits;
            const double flat = log_euclidean_renyi(rho, sigma, a).bits;
            CHECK(a * petz <= sand + 1e-8);
            CHECK(sand <= petz + 1e-8);
            CHECK(petz <= flat + 1e-8);
        }
        for (double a : {1.5, 3.0}) {
            const double petz = petz_renyi(rho, sigma, a).bits;
            const double sand = sandwiched_renyi(rho, sigma, a).bits;
            const double flat = log_euclidean_renyi(rho, sigma, a).bits;
            CHECK(flat <= sand + 1e-8);
            CHECK(sand <= petz + 1e-8);
        }
    }
}

TEST_CASE("tensor stability and direct-sum property") {
    Rng rng(88);
    DensityMatrix rho = rng.random_state(2);
    DensityMatrix sigma = rng.random_state(2);
    DensityMatrix omega = rng.random_state(3);
    std::vector<DivergenceKind> kinds = {DivergenceKind::relative(), DivergenceKind::petz(0.6),
                                         DivergenceKind::sandwiched(2.0), DivergenceKind::max(),
                                         DivergenceKind::chernoff(), DivergenceKind::hilbert(2.0),
                                         DivergenceKind::trace_dist(), DivergenceKind::c_dist(),
                                         DivergenceKind::bures(),
                                         DivergenceKind::log_euclidean(0.5)};
    for (const auto& k : kinds) {
        const double plain = evaluate(k, rho, sigma).bits;
        const double padded = evaluate(k, tensor(rho, omega), tensor(sigma, omega)).bits;
        INFO(k.name());
        CHECK(std::abs(plain - padded) < 1e-9);
    }

    // Direct-sum property of the relative entropy on cq states.
    std::vector<double> px{0.25, 0.75};
    std::vector<DensityMatrix> rhos{rng.random_state(3), rng.random_state(3)};
    std::vector<DensityMatrix> sigmas{rng.random_state(3), rng.random_state(3)};
    ComplexMatrix block_r(6, 6), block_s(6, 6);
    double expect = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                block_r(3 * x + i, 3 * x + j) = px[x] * rhos[x].matrix()(i, j);
                block_s(3 * x + i, 3 * x + j) = px[x] * sigmas[x].matrix()(i, j);
            }
        expect += px[x] * relative_entropy(rhos[x], sigmas[x]).bits;
    }
    const double got =
        relative_entropy(DensityMatrix::trusted(block_r), DensityMatrix::trusted(block_s)).bits;
    CHECK(std::abs(got - expect) < 1e-9);
}

TEST_CASE("data-processed triangle inequalities") {
    Rng rng(99);
    for (int it = 0; it < 30; ++it) {
        Rng local = rng.derive(it);
        const std::size_t d = 3;
        DensityMatrix rho = local.random_state(d);
        DensityMatrix sigma = local.random_state(d);
        DensityMatrix omega = local.random_state(d);
        Rng chan = local.derive(1);
        Rng chan_copy = chan;
        DensityMatrix prho = apply_random_cptp(chan, rho, d, d);
        DensityMatrix psigma = apply_random_cptp(chan_copy, sigma, d, d);

        for (double a : {1.0, 1.7, 4.0}) {
            const double lhs = hilbert_alpha(prho, omega, a).bits;
            const double rhs = hilbert_alpha(rho, sigma, a).bits + hilbert_alpha(psigma, omega, a).bits;
            CHECK(lhs <= rhs + 1e-7);
        }
        CHECK(metrics(prho, omega).c_distance <=
              metrics(rho, sigma).c_distance + metrics(psigma, omega).c_distance + 1e-7);
        CHECK(metrics(prho, omega).bures <=
              metrics(rho, sigma).bures + metrics(psigma, omega).bures + 1e-7);

        // Sandwiched alpha >= 1 against D_max of the processed sigma.
        for (double a : {1.0, 2.0, 5.0}) {
            const double lhs = a == 1.0 ? relative_entropy(prho, omega).bits
                                        : sandwiched_renyi(prho, omega, a).bits;
            const double rhs = (a == 1.0 ? relative_entropy(rho, sigma).bits
                                         : sandwiched_renyi(rho, sigma, a).bits) +
                               max_relative_entropy(psigma, omega).bits;
            CHECK(lhs <= rhs + 1e-7);
        }
    }
}
