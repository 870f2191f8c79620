#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcd/chandiv.hpp"
#include "qcd/channel.hpp"
#include "qcd/divergence.hpp"
#include "qcd/errors.hpp"
#include "qcd/exponents.hpp"
#include "qcd/optimize.hpp"

namespace qcd {

/// n-round adaptive discrimination strategy: initial state on R_1 A_1,
/// adaptors R_i B_i -> R_{i+1} A_{i+1}, final two-outcome measurement
/// {Q, I-Q} on R_n B_n (Helstrom-derived when absent).
struct AdaptiveStrategy {
    std::size_t rounds = 1;
    std::vector<std::size_t> memory_dims;  // |R_1| .. |R_n|
    DensityMatrix initial_state;           // on R_1 (x) A_1
    std::vector<QuantumChannel> adaptors;  // size rounds-1
    std::optional<HermitianOperator> measurement;

    void validate(std::size_t dim_a, std::size_t dim_b) const {
        if (rounds == 0) throw DomainError("AdaptiveStrategy: rounds must be positive");
        if (memory_dims.size() != rounds)
            throw DimError("AdaptiveStrategy: memory_dims size must equal rounds");
        if (initial_state.dim() != memory_dims.front() * dim_a)
            throw DimError("AdaptiveStrategy: initial state is not on R_1 (x) A_1");
        if (adaptors.size() + 1 != rounds)
            throw DimError("AdaptiveStrategy: need rounds-1 adaptors");
        for (std::size_t i = 0; i + 1 < rounds; ++i) {
            if (adaptors[i].dim_in() != memory_dims[i] * dim_b ||
                adaptors[i].dim_out() != memory_dims[i + 1] * dim_a)
                throw DimError("AdaptiveStrategy: adaptor dimensions do not chain");
        }
        if (measurement) {
            if (measurement->dim() != memory_dims.back() * dim_b)
                throw DimError("AdaptiveStrategy: measurement is not on R_n (x) B_n");
            EigResult e = herm_eig(measurement->matrix());
            if (e.eigenvalues.back() < -1e-9 || e.eigenvalues.front() > 1.0 + 1e-9)
                throw InvalidOperator("AdaptiveStrategy: measurement outside [0, I]");
        }
    }
};

struct ProtocolOutcome {
    double alpha = 0.0;  // type I error, Tr[(I-Q) rho_n]
    double beta = 0.0;   // type II error, Tr[Q tau_n]
    DensityMatrix final_n;
    DensityMatrix final_m;
};

struct EnergyLedger {
    std::vector<double> per_round;
    double average = 0.0;
};

struct RunResult {
    ProtocolOutcome outcome;
    std::vector<DensityMatrix> round_inputs_n;  // rho_{R_i A_i}, N branch
    std::vector<DensityMatrix> round_inputs_m;  // tau_{R_i A_i}, M branch
    std::optional<EnergyLedger> energy;
};

/// Helstrom projector onto the positive part of (p rho - (1-p) tau).
inline HermitianOperator helstrom_measurement(const DensityMatrix& rho, const DensityMatrix& tau,
                                              double p) {
    ComplexMatrix diff = rho.matrix() * Complex(p, 0.0) - tau.matrix() * Complex(1.0 - p, 0.0);
    return HermitianOperator(mat_fn(diff, [](double x) { return x > 0.0 ? 1.0 : 0.0; }));
}

/// Run the protocol on both hypotheses. With no measurement in the strategy,
/// the Helstrom projector for the given prior is used. A Hamiltonian adds
/// the per-round energy ledger of the N-branch inputs.
inline RunResult run_protocol(const QuantumChannel& ch_n, const QuantumChannel& ch_m,
                              const AdaptiveStrategy& strat, double prior = 0.5,
                              const std::optional<Hamiltonian>& hamiltonian = {}) {
    if (ch_n.dim_in() != ch_m.dim_in() || ch_n.dim_out() != ch_m.dim_out())
        throw DimError("run_protocol: channel dimensions differ");
    const std::size_t da = ch_n.dim_in(), db = ch_n.dim_out();
    strat.validate(da, db);
    if (hamiltonian && hamiltonian->dim() != da)
        throw DimError("run_protocol: Hamiltonian dimension mismatch");

    RunResult result;
    DensityMatrix rho = strat.initial_state;
    DensityMatrix tau = strat.initial_state;
    for (std::size_t i = 0; i < strat.rounds; ++i) {
        result.round_inputs_n.push_back(rho);
        result.round_inputs_m.push_back(tau);
        rho = apply_with_reference(ch_n, rho, strat.memory_dims[i]);
        tau = apply_with_reference(ch_m, tau, strat.memory_dims[i]);
        if (i + 1 < strat.rounds) {
            rho = strat.adaptors[i].apply(rho);
            tau = strat.adaptors[i].apply(tau);
        }
    }

    HermitianOperator q = strat.measurement ? *strat.measurement
                                            : helstrom_measurement(rho, tau, prior);
    const double succ = inner_product(q.matrix(), rho.matrix()).real();
    result.outcome.alpha = std::min(1.0, std::max(0.0, 1.0 - succ));
    result.outcome.beta =
        std::min(1.0, std::max(0.0, inner_product(q.matrix(), tau.matrix()).real()));
    result.outcome.final_n = rho;
    result.outcome.final_m = tau;

    if (hamiltonian) {
        EnergyLedger ledger;
        for (std::size_t i = 0; i < strat.rounds; ++i) {
            ComplexMatrix red =
                partial_trace(result.round_inputs_n[i].matrix(), Keep::Second, strat.memory_dims[i], da);
            ledger.per_round.push_back(inner_product(hamiltonian->matrix(), red).real());
        }
        double sum = 0.0;
        for (double e : ledger.per_round) sum += e;
        ledger.average = sum / static_cast<double>(strat.rounds);
        result.energy = ledger;
    }
    return result;
}

/// Per-round energies of a recorded input trajectory plus the feasibility
/// verdict against the cap E.
inline std::pair<EnergyLedger, bool> energy_audit(const std::vector<DensityMatrix>& round_inputs,
                                                  const std::vector<std::size_t>& memory_dims,
                                                  const Hamiltonian& h, double energy_cap) {
    if (round_inputs.size() != memory_dims.size())
        throw DimError("energy_audit: trajectory and memory_dims lengths differ");
    EnergyLedger ledger;
    for (std::size_t i = 0; i < round_inputs.size(); ++i) {
        const std::size_t da = round_inputs[i].dim() / memory_dims[i];
        ComplexMatrix red = partial_trace(round_inputs[i].matrix(), Keep::Second, memory_dims[i], da);
        ledger.per_round.push_back(inner_product(h.matrix(), red).real());
    }
    double sum = 0.0;
    for (double e : ledger.per_round) sum += e;
    ledger.average = round_inputs.empty() ? 0.0 : sum / static_cast<double>(round_inputs.size());
    return {ledger, ledger.average <= energy_cap + 1e-9};
}

/// Meta-converse check: the binary divergence of the final decision
/// probabilities never exceeds n times a certified amortized upper bound.
struct MetaConverseResult {
    bool holds = false;
    double slack = 0.0;  // n * upper - d(1-alpha || beta)
    double lhs = 0.0;
};

inline MetaConverseResult meta_converse_check(const ProtocolOutcome& outcome, std::size_t rounds,
                                              const DivergenceKind& kind,
                                              const AmortizedUpper& upper) {
    if (upper.rule == UpperRule::Unknown)
        throw Unsupported("meta_converse_check: amortized upper bound carries no certified rule");
    MetaConverseResult res;
    res.lhs = binary_divergence(1.0 - outcome.alpha, outcome.beta, kind).bits;
    const double rhs = static_cast<double>(rounds) * upper.value.bits;
    res.slack = rhs - res.lhs;
    res.holds = res.lhs <= rhs + 1e-6;
    return res;
}

// ---------------------------------------------------------------------------
// Strategy optimization (see-saw)
// ---------------------------------------------------------------------------

struct SeeSawOptions {
    int multistarts = 16;
    int outer_rounds = 20;
    int grad_steps_per_round = 5;
    double value_tol = 1e-8;
    std::uint64_t seed = 42;
    std::size_t memory_cap = 4;
    std::vector<PureState> embed_inputs;  // product inputs embedded as candidates
};

struct OptimizedProtocol {
    AdaptiveStrategy strategy;
    ProtocolOutcome outcome;
    double objective = 0.0;  // exponent-sense value of the mode
    bool feasible = true;    // Stein: alpha <= eps met
    std::optional<PureState> product_input;  // set by the non-adaptive search
};

/// Permutation unitary reordering tensor factors: position k of the output
/// carries the factor new_order[k] of the input.
inline ComplexMatrix factor_permutation(const std::vector<std::size_t>& dims,
                                        const std::vector<std::size_t>& new_order) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    ComplexMatrix u(total, total);
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t x = 0; x < total; ++x) {
        // Decode x into the input multi-index (big-endian factor order).
        std::size_t rem = x;
        for (std::size_t f = dims.size(); f-- > 0;) {
            idx[f] = rem % dims[f];
            rem /= dims[f];
        }
        std::size_t y = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) y = y * dims[new_order[k]] + idx[new_order[k]];
        u(y, x) = 1.0;
    }
    return u;
}

/// The parallel (block-coding) embedding of a product strategy: gamma =
/// psi^(x n) fed through the adaptive interface, each adaptor a pure factor
/// permutation that swaps in the next input share.
inline AdaptiveStrategy embed_parallel(const PureState& psi, std::size_t rounds, std::size_t da,
                                       std::size_t db) {
    AdaptiveStrategy s;
    s.rounds = rounds;
    std::size_t refs = 1;
    for (std::size_t i = 0; i < rounds; ++i) refs *= da;  // one reference per share
    std::vector<std::size_t> mem(rounds);
    for (std::size_t i = 0; i < rounds; ++i) {
        std::size_t dim = refs;
        for (std::size_t k = i + 1; k < rounds; ++k) dim *= da;  // pending shares
        for (std::size_t k = 0; k < i; ++k) dim *= db;           // collected outputs
        mem[i] = dim;
    }
    s.memory_dims = mem;

    // gamma = psi^(x n) with natural ordering (R1 A1)(R2 A2)..., permuted to
    // [R1..Rn, A2..An, A1].
    std::vector<Complex> amps = psi.amplitudes();
    std::vector<Complex> gamma = amps;
    for (std::size_t i = 1; i < rounds; ++i) {
        std::vector<Complex> next(gamma.size() * amps.size());
        for (std::size_t x = 0; x < gamma.size(); ++x)
            for (std::size_t y = 0; y < amps.size(); ++y)
                next[x * amps.size() + y] = gamma[x] * amps[y];
        gamma = std::move(next);
    }
    std::vector<std::size_t> dims(2 * rounds, da);  // R_i and A_i factors, |R| = |A|
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < rounds; ++i) order.push_back(2 * i);      // R_i
    for (std::size_t i = 1; i < rounds; ++i) order.push_back(2 * i + 1);  // A_2..A_n
    order.push_back(1);                                                   // A_1
    ComplexMatrix perm = factor_permutation(dims, order);
    std::vector<Complex> arranged(gamma.size(), Complex(0.0, 0.0));
    for (std::size_t y = 0; y < gamma.size(); ++y)
        for (std::size_t x = 0; x < gamma.size(); ++x)
            if (perm(y, x) != Complex(0.0, 0.0)) arranged[y] = gamma[x];
    s.initial_state = PureState::normalized(std::move(arranged)).density();

    // Adaptor i: [refs, A_{i+1..n}, B_{1..i-1}, B_i] -> same with A_{i+1}
    // moved to the back and B_i joining the output block.
    for (std::size_t i = 1; i < rounds; ++i) {
        std::vector<std::size_t> fdims{refs};
        for (std::size_t k = i + 1; k <= rounds; ++k) fdims.push_back(da);
        for (std::size_t k = 1; k <= i; ++k) fdims.push_back(db);
        // Factor layout: [refs, A_{i+1}, .., A_n, B_1, .., B_i].
        std::vector<std::size_t> new_order{0};
        for (std::size_t k = 2; k < 1 + (rounds - i); ++k) new_order.push_back(k);  // A_{i+2..n}
        for (std::size_t k = 1 + (rounds - i); k < fdims.size(); ++k) new_order.push_back(k);  // B's
        new_order.push_back(1);  // A_{i+1} to the back
        s.adaptors.push_back(unitary_channel(factor_permutation(fdims, new_order)));
    }
    return s;
}

namespace detail {

// Stinespring ancilla dimension making (anc * din) divisible by dout.
inline std::size_t stinespring_anc(std::size_t din, std::size_t dout) {
    for (std::size_t a = 2; a < 2 * dout + 2; ++a)
        if ((a * din) % dout == 0) return a;
    return dout;
}

// Adaptor channel from a Hermitian generator: adjoin |0> on the ancilla,
// apply exp(iG), trace the leftover factor.
inline QuantumChannel adaptor_from_generator(const double* params, std::size_t din,
                                             std::size_t dout) {
    const std::size_t anc = stinespring_anc(din, dout);
    const std::size_t big = din * anc;
    const std::size_t env = big / dout;
    ComplexMatrix u = unitary_exp(hermitian_from_params(params, big));
    std::vector<ComplexMatrix> ks;
    for (std::size_t j = 0; j < env; ++j) {
        ComplexMatrix k(dout, din);
        for (std::size_t o = 0; o < dout; ++o)
            for (std::size_t i = 0; i < din; ++i) k(o, i) = u(o * env + j, i * anc);
        ks.push_back(std::move(k));
    }
    return QuantumChannel(din, dout, std::move(ks));
}

inline std::size_t adaptor_param_count(std::size_t din, std::size_t dout) {
    const std::size_t big = din * stinespring_anc(din, dout);
    return big * big;
}

struct NeymanPearsonTest {
    HermitianOperator q;
    double alpha = 0.0;
    double beta = 0.0;
};

// Best threshold test with alpha <= eps: bisection over the positive-part
// projector family Q(t) of (rho - t tau), then exact rescaling Q -> lambda Q
// to sit on alpha = eps (which can only shrink beta).
inline NeymanPearsonTest neyman_pearson(const DensityMatrix& rho, const DensityMatrix& tau,
                                        double eps) {
    auto test_at = [&](double t) {
        ComplexMatrix diff = rho.matrix() - tau.matrix() * Complex(t, 0.0);
        ComplexMatrix q = mat_fn(diff, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
        const double succ = inner_product(q, rho.matrix()).real();
        const double beta = inner_product(q, tau.matrix()).real();
        return std::make_tuple(q, 1.0 - succ, beta);
    };
    double lo = 0.0, hi = 1.0;
    // Grow hi until infeasible (alpha > eps) or clearly saturated.
    for (int grow = 0; grow < 60; ++grow) {
        auto [q, a, b] = test_at(hi);
        (void)q;
        (void)b;
        if (a > eps) break;
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        auto [q, a, b] = test_at(mid);
        (void)q;
        (void)b;
        if (a <= eps)
            lo = mid;
        else
            hi = mid;
    }
    auto [q, a, b] = test_at(lo);
    NeymanPearsonTest best;
    // Rescale to alpha = eps exactly.
    const double succ = 1.0 - a;
    const double lambda = succ > 0.0 ? std::min(1.0, (1.0 - eps) / succ) : 1.0;
    best.q = HermitianOperator(q * Complex(lambda, 0.0));
    best.alpha = 1.0 - lambda * succ;
    best.beta = lambda * b;
    return best;
}

}  // namespace detail

inline OptimizedProtocol nonadaptive_baseline(const QuantumChannel& ch_n,
                                              const QuantumChannel& ch_m, std::size_t rounds,
                                              const Setting& mode,
                                              const SphereSearchOptions& opt = {});

/// See-saw strategy optimization for n <= 3 rounds: alternate strategy
/// parameter ascent (finite-difference gradient on the Stinespring
/// generators and the initial state) with the mode's optimal measurement
/// (Helstrom for Chernoff, Neyman-Pearson rescaling for Stein). The parallel
/// embedding of the best product strategy is always evaluated as one of the
/// candidates, so the result never falls below the non-adaptive baseline.
inline OptimizedProtocol optimize_strategy(const QuantumChannel& ch_n, const QuantumChannel& ch_m,
                                           std::size_t rounds, const Setting& mode,
                                           const SeeSawOptions& opt = {}) {
    if (rounds == 0 || rounds > 3) throw DomainError("optimize_strategy: rounds must be 1..3");
    if (opt.memory_cap > 8) throw DomainError("optimize_strategy: memory cap is 8");
    if (mode.kind != SettingKind::Chernoff && mode.kind != SettingKind::Stein)
        throw Unsupported("optimize_strategy: only Stein and Chernoff modes are optimized");
    const std::size_t da = ch_n.dim_in(), db = ch_n.dim_out();
    const std::size_t r = std::min<std::size_t>(opt.memory_cap, std::max<std::size_t>(da, 2));
    if (r * da > 64 || r * db > 64)
        throw DomainError("optimize_strategy: total dimension exceeds the desk-scale cap");

    const std::size_t psi_dim = r * da;
    const std::size_t psi_params = 2 * psi_dim;
    std::vector<std::size_t> adaptor_offsets;
    std::size_t total = psi_params;
    for (std::size_t i = 0; i + 1 < rounds; ++i) {
        adaptor_offsets.push_back(total);
        total += detail::adaptor_param_count(r * db, r * da);
    }

    auto build_strategy = [&](const std::vector<double>& p) {
        AdaptiveStrategy s;
        s.rounds = rounds;
        s.memory_dims.assign(rounds, r);
        std::vector<Complex> amps(psi_dim);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < psi_dim; ++i) {
            amps[i] = Complex(p[2 * i], p[2 * i + 1]);
            norm2 += std::norm(amps[i]);
        }
        if (norm2 < 1e-12) amps[0] = 1.0;
        s.initial_state = PureState::normalized(std::move(amps)).density();
        for (std::size_t i = 0; i + 1 < rounds; ++i)
            s.adaptors.push_back(
                detail::adaptor_from_generator(p.data() + adaptor_offsets[i], r * db, r * da));
        return s;
    };

    const double eps = mode.parameter;
    const double prior = mode.kind == SettingKind::Chernoff ? mode.parameter : 0.5;

    struct Candidate {
        double value = -kInf;
        std::vector<double> params;
    };
    auto evaluate_params = [&](const std::vector<double>& p, double stein_penalty) {
        AdaptiveStrategy s = build_strategy(p);
        RunResult run = run_protocol(ch_n, ch_m, s, prior);
        if (mode.kind == SettingKind::Chernoff) {
            const double err = prior * run.outcome.alpha + (1.0 - prior) * run.outcome.beta;
            return -std::log2(std::max(err, 1e-300)) / static_cast<double>(rounds);
        }
        detail::NeymanPearsonTest np =
            detail::neyman_pearson(run.outcome.final_n, run.outcome.final_m, eps);
        const double value = -std::log2(std::max(np.beta, 1e-300)) / static_cast<double>(rounds);
        const double excess = std::max(0.0, np.alpha - eps);
        return value - stein_penalty * excess * excess;
    };

    auto one_start = [&](int start) -> Candidate {
        Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(start)));
        std::vector<double> p(total);
        for (auto& x : p) x = 0.35 * rng.gaussian();
        double penalty = 10.0;
        double cur = evaluate_params(p, penalty);
        double step = 0.2;
        for (int outer = 0; outer < opt.outer_rounds; ++outer) {
            const double before = cur;
            for (int gs = 0; gs < opt.grad_steps_per_round; ++gs) {
                std::vector<double> grad(total);
                const double h = 1e-5;
                for (std::size_t i = 0; i < total; ++i) {
                    std::vector<double> pp = p;
                    pp[i] += h;
                    grad[i] = (evaluate_params(pp, penalty) - cur) / h;
                }
                bool improved = false;
                for (int ls = 0; ls < 10; ++ls) {
                    std::vector<double> pn = p;
                    for (std::size_t i = 0; i < total; ++i) pn[i] += step * grad[i];
                    const double fn = evaluate_params(pn, penalty);
                    if (fn > cur) {
                        p = std::move(pn);
                        cur = fn;
                        step = std::min(step * 1.4, 2.0);
                        improved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if (!improved) break;
            }
            penalty *= 10.0;  // Stein constraint ramp
            cur = evaluate_params(p, penalty);
            if (std::abs(cur - before) < opt.value_tol && outer > 2) break;
        }
        Candidate c;
        c.value = evaluate_params(p, 1e8);
        c.params = std::move(p);
        return c;
    };

    Candidate best = parallel_best<Candidate>(opt.multistarts, one_start);

    auto finalize = [&](AdaptiveStrategy strat) {
        OptimizedProtocol out;
        RunResult run = run_protocol(ch_n, ch_m, strat, prior);
        out.strategy = std::move(strat);
        if (mode.kind == SettingKind::Chernoff) {
            out.strategy.measurement =
                helstrom_measurement(run.outcome.final_n, run.outcome.final_m, prior);
            const double err = prior * run.outcome.alpha + (1.0 - prior) * run.outcome.beta;
            out.objective = -std::log2(std::max(err, 1e-300)) / static_cast<double>(rounds);
            out.outcome = run.outcome;
        } else {
            detail::NeymanPearsonTest np =
                detail::neyman_pearson(run.outcome.final_n, run.outcome.final_m, eps);
            out.strategy.measurement = np.q;
            out.outcome = run.outcome;
            out.outcome.alpha = np.alpha;
            out.outcome.beta = np.beta;
            out.objective = -std::log2(std::max(np.beta, 1e-300)) / static_cast<double>(rounds);
            out.feasible = np.alpha <= eps + 1e-9;
        }
        return out;
    };

    OptimizedProtocol seesaw = finalize(build_strategy(best.params));

    // Parallel embeddings: the best product strategy found internally plus
    // any caller-provided product inputs.
    SphereSearchOptions bopt;
    bopt.multistarts = std::max(4, opt.multistarts / 2);
    bopt.max_iters = 120;
    bopt.seed = mix_seed(opt.seed, 7777);
    OptimizedProtocol baseline = nonadaptive_baseline(ch_n, ch_m, rounds, mode, bopt);
    std::vector<PureState> embeds = opt.embed_inputs;
    if (baseline.product_input) embeds.push_back(*baseline.product_input);
    for (const auto& psi : embeds) {
        OptimizedProtocol embedded = finalize(embed_parallel(psi, rounds, da, db));
        if (embedded.objective > seesaw.objective && (embedded.feasible || !seesaw.feasible))
            seesaw = std::move(embedded);
    }
    return seesaw;
}

/// Non-adaptive baseline: one product input psi_RA repeated n times, a joint
/// Helstrom or Neyman-Pearson measurement on the tensor-power outputs.
inline OptimizedProtocol nonadaptive_baseline(const QuantumChannel& ch_n, const QuantumChannel& ch_m,
                                              std::size_t rounds, const Setting& mode,
                                              const SphereSearchOptions& opt) {
    if (rounds == 0 || rounds > 3) throw DomainError("nonadaptive_baseline: rounds must be 1..3");
    if (mode.kind != SettingKind::Chernoff && mode.kind != SettingKind::Stein)
        throw Unsupported("nonadaptive_baseline: only Stein and Chernoff modes are optimized");
    const std::size_t da = ch_n.dim_in();
    const double prior = mode.kind == SettingKind::Chernoff ? mode.parameter : 0.5;

    auto outputs_for = [&](const PureState& psi) {
        DensityMatrix on = apply_with_reference(ch_n, psi.density(), da);
        DensityMatrix om = apply_with_reference(ch_m, psi.density(), da);
        DensityMatrix big_n = on, big_m = om;
        for (std::size_t i = 1; i < rounds; ++i) {
            big_n = tensor(big_n, on);
            big_m = tensor(big_m, om);
        }
        return std::make_pair(big_n, big_m);
    };
    auto objective = [&](const PureState& psi) {
        auto [big_n, big_m] = outputs_for(psi);
        if (mode.kind == SettingKind::Chernoff) {
            const double tn =
                trace_norm(big_n.matrix() * Complex(prior, 0.0) - big_m.matrix() * Complex(1.0 - prior, 0.0));
            const double err = 0.5 * (1.0 - tn);
            return -std::log2(std::max(err, 1e-300)) / static_cast<double>(rounds);
        }
        detail::NeymanPearsonTest np = detail::neyman_pearson(big_n, big_m, mode.parameter);
        return -std::log2(std::max(np.beta, 1e-300)) / static_cast<double>(rounds);
    };
    SphereSearchResult found = maximize_on_sphere(objective, da * da, opt);

    OptimizedProtocol out;
    out.objective = found.value;
    out.product_input = found.arg;
    auto [big_n, big_m] = outputs_for(found.arg);
    AdaptiveStrategy s;
    s.rounds = 1;  // represented as its single-shot reduced description
    s.memory_dims = {da};
    s.initial_state = found.arg.density();
    out.strategy = std::move(s);
    if (mode.kind == SettingKind::Chernoff) {
        HermitianOperator q = helstrom_measurement(big_n, big_m, prior);
        out.outcome.alpha = 1.0 - inner_product(q.matrix(), big_n.matrix()).real();
        out.outcome.beta = inner_product(q.matrix(), big_m.matrix()).real();
    } else {
        detail::NeymanPearsonTest np = detail::neyman_pearson(big_n, big_m, mode.parameter);
        out.outcome.alpha = np.alpha;
        out.outcome.beta = np.beta;
        out.feasible = np.alpha <= mode.parameter + 1e-9;
    }
    out.outcome.final_n = big_n;
    out.outcome.final_m = big_m;
    return out;
}

}  // namespace qcd
