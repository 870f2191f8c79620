#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcd/complex_matrix.hpp"
#include "qcd/eig.hpp"
#include "qcd/errors.hpp"
#include "qcd/rng.hpp"
#include "qcd/states.hpp"

namespace qcd {

/// CPTP map in Kraus form. Complete positivity is automatic; trace
/// preservation (sum K^dag K = I) is validated on construction.
class QuantumChannel {
  public:
    QuantumChannel() = default;

    QuantumChannel(std::size_t dim_in, std::size_t dim_out, std::vector<ComplexMatrix> kraus)
        : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
        if (kraus_.empty()) throw InvalidOperator("QuantumChannel: empty Kraus list");
        for (const auto& k : kraus_)
            if (k.rows() != dim_out_ || k.cols() != dim_in_)
                throw InvalidOperator("QuantumChannel: Kraus operator shape mismatch");
        ComplexMatrix sum(dim_in_, dim_in_);
        for (const auto& k : kraus_) sum += k.dagger() * k;
        if ((sum - ComplexMatrix::identity(dim_in_)).max_abs() > 1e-9)
            throw InvalidOperator("QuantumChannel: Kraus operators are not trace preserving");
    }

    std::size_t dim_in() const { return dim_in_; }
    std::size_t dim_out() const { return dim_out_; }
    const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

    /// Action on a state of the input system alone.
    ComplexMatrix apply_matrix(const ComplexMatrix& rho) const {
        if (rho.rows() != dim_in_ || rho.cols() != dim_in_)
            throw DimError("QuantumChannel: input dimension mismatch");
        ComplexMatrix out(dim_out_, dim_out_);
        for (const auto& k : kraus_) out += k * rho * k.dagger();
        return out;
    }

    DensityMatrix apply(const DensityMatrix& rho) const {
        return DensityMatrix::trusted(apply_matrix(rho.matrix()));
    }

  private:
    std::size_t dim_in_ = 0;
    std::size_t dim_out_ = 0;
    std::vector<ComplexMatrix> kraus_;
};

/// (id_R (x) ch) applied to a state on R (x) A.
inline DensityMatrix apply_with_reference(const QuantumChannel& ch, const DensityMatrix& state,
                                          std::size_t r_dim) {
    if (state.dim() != r_dim * ch.dim_in())
        throw DimError("apply_with_reference: state dimension is not r_dim * dim_in");
    ComplexMatrix out(r_dim * ch.dim_out(), r_dim * ch.dim_out());
    ComplexMatrix eye_r = ComplexMatrix::identity(r_dim);
    for (const auto& k : ch.kraus()) {
        ComplexMatrix big = kron(eye_r, k);
        out += big * state.matrix() * big.dagger();
    }
    return DensityMatrix::trusted(std::move(out));
}

inline QuantumChannel identity_channel(std::size_t d) {
    return QuantumChannel(d, d, {ComplexMatrix::identity(d)});
}

inline QuantumChannel unitary_channel(const ComplexMatrix& u) {
    if (!u.square()) throw InvalidOperator("unitary_channel: not square");
    return QuantumChannel(u.rows(), u.rows(), {u});
}

/// Channel with a single isometric Kraus operator (V^dag V = I).
inline QuantumChannel isometry_channel(const ComplexMatrix& v) {
    return QuantumChannel(v.cols(), v.rows(), {v});
}

inline QuantumChannel channel_tensor(const QuantumChannel& a, const QuantumChannel& b) {
    std::vector<ComplexMatrix> ks;
    for (const auto& ka : a.kraus())
        for (const auto& kb : b.kraus()) ks.push_back(kron(ka, kb));
    return QuantumChannel(a.dim_in() * b.dim_in(), a.dim_out() * b.dim_out(), std::move(ks));
}

/// after o before.
inline QuantumChannel channel_compose(const QuantumChannel& after, const QuantumChannel& before) {
    if (before.dim_out() != after.dim_in())
        throw DimError("channel_compose: inner dimensions differ");
    std::vector<ComplexMatrix> ks;
    for (const auto& ka : after.kraus())
        for (const auto& kb : before.kraus()) ks.push_back(ka * kb);
    return QuantumChannel(before.dim_in(), after.dim_out(), std::move(ks));
}

/// rho -> rho (x) theta.
inline QuantumChannel append_state_channel(std::size_t d, const DensityMatrix& theta) {
    EigResult e = herm_eig(theta.matrix());
    std::vector<ComplexMatrix> ks;
    for (std::size_t k = 0; k < theta.dim(); ++k) {
        if (e.eigenvalues[k] <= 0.0) continue;
        ComplexMatrix col(theta.dim(), 1);
        for (std::size_t i = 0; i < theta.dim(); ++i)
            col(i, 0) = std::sqrt(e.eigenvalues[k]) * e.eigenvectors(i, k);
        ks.push_back(kron(ComplexMatrix::identity(d), col));
    }
    return QuantumChannel(d, d * theta.dim(), std::move(ks));
}

/// Discard the second factor of A (x) B.
inline QuantumChannel discard_second_channel(std::size_t da, std::size_t db) {
    std::vector<ComplexMatrix> ks;
    for (std::size_t j = 0; j < db; ++j) {
        ComplexMatrix k(da, da * db);
        for (std::size_t i = 0; i < da; ++i) k(i, i * db + j) = 1.0;
        ks.push_back(std::move(k));
    }
    return QuantumChannel(da * db, da, std::move(ks));
}

/// Minimal Kraus representation recovered from the channel's Choi operator.
inline QuantumChannel kraus_compress(const QuantumChannel& ch) {
    const std::size_t din = ch.dim_in(), dout = ch.dim_out();
    // Unnormalized Choi: sum_ij |i><j| (x) N(|i><j|).
    ComplexMatrix choi(din * dout, din * dout);
    for (const auto& k : ch.kraus()) {
        // vec(K) treated as a column: Choi += vec(K) vec(K)^dag with index (a,b).
        std::vector<Complex> v(din * dout);
        for (std::size_t a = 0; a < din; ++a)
            for (std::size_t b = 0; b < dout; ++b) v[a * dout + b] = k(b, a);
        for (std::size_t x = 0; x < v.size(); ++x)
            for (std::size_t y = 0; y < v.size(); ++y) choi(x, y) += v[x] * std::conj(v[y]);
    }
    EigResult e = herm_eig(choi);
    const double thresh = 1e-12 * std::max(1.0, e.eigenvalues.front());
    std::vector<ComplexMatrix> ks;
    for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
        if (e.eigenvalues[k] <= thresh) continue;
        ComplexMatrix km(dout, din);
        const double s = std::sqrt(e.eigenvalues[k]);
        for (std::size_t a = 0; a < din; ++a)
            for (std::size_t b = 0; b < dout; ++b) km(b, a) = s * e.eigenvectors(a * dout + b, k);
        ks.push_back(std::move(km));
    }
    return QuantumChannel(din, dout, std::move(ks));
}

/// Choi state: channel output on one share of the maximally entangled input.
struct ChoiState {
    std::size_t ref_dim = 0;
    DensityMatrix state;
};

inline ChoiState choi(const QuantumChannel& ch) {
    const std::size_t d = ch.dim_in();
    PureState phi = PureState::maximally_entangled(d);
    ChoiState c;
    c.ref_dim = d;
    c.state = apply_with_reference(ch, phi.density(), d);
    return c;
}

/// Classical-quantum channel: measures in the computational basis and emits
/// nu^x on outcome x.
class CqChannel {
  public:
    explicit CqChannel(std::vector<DensityMatrix> outputs) : outputs_(std::move(outputs)) {
        if (outputs_.empty()) throw InvalidOperator("CqChannel: empty output list");
        for (const auto& s : outputs_)
            if (s.dim() != outputs_.front().dim())
                throw InvalidOperator("CqChannel: output dimensions differ");
    }

    std::size_t alphabet() const { return outputs_.size(); }
    std::size_t out_dim() const { return outputs_.front().dim(); }
    const std::vector<DensityMatrix>& outputs() const { return outputs_; }

    QuantumChannel as_channel() const {
        std::vector<ComplexMatrix> ks;
        const std::size_t m = alphabet(), d = out_dim();
        for (std::size_t x = 0; x < m; ++x) {
            EigResult e = herm_eig(outputs_[x].matrix());
            for (std::size_t k = 0; k < d; ++k) {
                if (e.eigenvalues[k] <= 0.0) continue;
                ComplexMatrix km(d, m);
                for (std::size_t i = 0; i < d; ++i)
                    km(i, x) = std::sqrt(e.eigenvalues[k]) * e.eigenvectors(i, k);
                ks.push_back(std::move(km));
            }
        }
        return QuantumChannel(m, d, std::move(ks));
    }

  private:
    std::vector<DensityMatrix> outputs_;
};

/// Positive semi-definite Hamiltonian for energy-constrained discrimination.
class Hamiltonian {
  public:
    explicit Hamiltonian(HermitianOperator h) : op_(std::move(h)) {
        if (min_eigenvalue(op_.matrix()) < -1e-10)
            throw InvalidOperator("Hamiltonian: must be positive semi-definite");
    }

    std::size_t dim() const { return op_.dim(); }
    const ComplexMatrix& matrix() const { return op_.matrix(); }

    double min_energy() const { return std::max(0.0, min_eigenvalue(op_.matrix())); }

  private:
    HermitianOperator op_;
};

/// Channel realized as a fixed interaction with an environment state:
/// ch(rho) = P(rho (x) theta).
struct EnvParamChannel {
    QuantumChannel interaction;  // P_{AE -> B}
    DensityMatrix env_state;     // theta_E
    std::size_t dim_a = 0;

    QuantumChannel realize() const {
        QuantumChannel prep = append_state_channel(dim_a, env_state);
        return kraus_compress(channel_compose(interaction, prep));
    }
};

// ---------------------------------------------------------------------------
// Channel family constructors
// ---------------------------------------------------------------------------

/// Generalized amplitude damping channel; Kraus operators A1..A4 with
/// damping direction |1> -> |0> and environment temperature parameter p.
inline QuantumChannel make_gad(double eta, double p) {
    if (eta < 0.0 || eta > 1.0 || p < 0.0 || p > 1.0)
        throw DomainError("make_gad: parameters must lie in [0,1]");
    const double sp = std::sqrt(p), sq = std::sqrt(1.0 - p);
    const double se = std::sqrt(eta), sf = std::sqrt(1.0 - eta);
    ComplexMatrix a1{{sp, 0.0}, {0.0, sp * se}};
    ComplexMatrix a2{{0.0, sp * sf}, {0.0, 0.0}};
    ComplexMatrix a3{{sq * se, 0.0}, {0.0, sq}};
    ComplexMatrix a4{{0.0, 0.0}, {sq * sf, 0.0}};
    std::vector<ComplexMatrix> ks;
    for (auto& k : {a1, a2, a3, a4})
        if (k.max_abs() > 0.0) ks.push_back(k);
    return QuantumChannel(2, 2, std::move(ks));
}

/// Erasure channel on a d-dimensional input; output dimension d+1 with the
/// erasure flag |e> = |d>.
inline QuantumChannel make_erasure(double p, std::size_t d) {
    if (p < 0.0 || p > 1.0) throw DomainError("make_erasure: probability out of range");
    if (d == 0) throw DomainError("make_erasure: dimension must be positive");
    std::vector<ComplexMatrix> ks;
    ComplexMatrix keep(d + 1, d);
    for (std::size_t i = 0; i < d; ++i) keep(i, i) = std::sqrt(1.0 - p);
    if (keep.max_abs() > 0.0) ks.push_back(std::move(keep));
    for (std::size_t i = 0; i < d && p > 0.0; ++i) {
        ComplexMatrix erase(d + 1, d);
        erase(d, i) = std::sqrt(p);
        ks.push_back(std::move(erase));
    }
    return QuantumChannel(d, d + 1, std::move(ks));
}

/// Clock unitary Z|x> = exp(2 pi i x / d)|x>.
inline ComplexMatrix clock_unitary(std::size_t d) {
    ComplexMatrix z(d, d);
    for (std::size_t x = 0; x < d; ++x) {
        const double ang = 2.0 * M_PI * static_cast<double>(x) / static_cast<double>(d);
        z(x, x) = Complex(std::cos(ang), std::sin(ang));
    }
    return z;
}

inline ComplexMatrix fourier_unitary(std::size_t d) {
    ComplexMatrix f(d, d);
    const double inv = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t i = 0; i < d; ++i) {
            const double ang = 2.0 * M_PI * static_cast<double>(x) * static_cast<double>(i) /
                               static_cast<double>(d);
            f(x, i) = Complex(std::cos(ang), std::sin(ang)) * inv;
        }
    return f;
}

/// d-dimensional dephasing channel sum_i p_i Z^i rho Z^-i.
inline QuantumChannel make_dephasing(const std::vector<double>& p, std::size_t d) {
    if (p.size() != d) throw DomainError("make_dephasing: probability vector length must be d");
    double sum = 0.0;
    for (double x : p) {
        if (x < 0.0) throw DomainError("make_dephasing: negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw DomainError("make_dephasing: probabilities must sum to 1");
    ComplexMatrix z = clock_unitary(d);
    std::vector<ComplexMatrix> ks;
    ComplexMatrix zi = ComplexMatrix::identity(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (p[i] > 0.0) ks.push_back(zi * Complex(std::sqrt(p[i]), 0.0));
        zi = zi * z;
    }
    return QuantumChannel(d, d, std::move(ks));
}

/// Replacer channel R(X) = Tr[X] tau.
inline QuantumChannel make_replacer(const DensityMatrix& tau, std::size_t dim_in) {
    EigResult e = herm_eig(tau.matrix());
    std::vector<ComplexMatrix> ks;
    for (std::size_t j = 0; j < tau.dim(); ++j) {
        if (e.eigenvalues[j] <= 0.0) continue;
        for (std::size_t i = 0; i < dim_in; ++i) {
            ComplexMatrix k(tau.dim(), dim_in);
            for (std::size_t r = 0; r < tau.dim(); ++r)
                k(r, i) = std::sqrt(e.eigenvalues[j]) * e.eigenvectors(r, j);
            ks.push_back(std::move(k));
        }
    }
    return QuantumChannel(dim_in, tau.dim(), std::move(ks));
}

inline QuantumChannel make_cq(const std::vector<DensityMatrix>& outputs) {
    return CqChannel(outputs).as_channel();
}

// ---------------------------------------------------------------------------
// Environment-parametrized forms and seizing
// ---------------------------------------------------------------------------

enum class EnvParamKind { Erasure, Dephasing, Cq, ChoiTeleportation };

/// Erasure as an environment-parametrized channel: theta = (1-p)|0><0| + p|1><1|,
/// interaction = adjoin the erasure symbol and controlled-SWAP on the flag.
inline EnvParamChannel env_form_erasure(double p, std::size_t d) {
    if (p < 0.0 || p > 1.0) throw DomainError("env_form_erasure: probability out of range");
    const std::size_t dp = d + 1;
    // Space ordering: A' (x) E (x) E' with dims (d+1, 2, d+1).
    // V : A (x) E -> A' (x) E (x) E', embedding A and adjoining |e> = |d>.
    ComplexMatrix v(dp * 2 * dp, d * 2);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t e = 0; e < 2; ++e) v((a * 2 + e) * dp + d, a * 2 + e) = 1.0;
    // Controlled SWAP of A' and E' on flag E = |1>.
    ComplexMatrix cswap(dp * 2 * dp, dp * 2 * dp);
    for (std::size_t a = 0; a < dp; ++a)
        for (std::size_t e = 0; e < 2; ++e)
            for (std::size_t k = 0; k < dp; ++k) {
                const std::size_t src = (a * 2 + e) * dp + k;
                const std::size_t dst = e == 0 ? src : (k * 2 + e) * dp + a;
                cswap(dst, src) = 1.0;
            }
    QuantumChannel step = channel_compose(unitary_channel(cswap), isometry_channel(v));
    // Discard E and E', keeping A' as the output B.
    std::vector<ComplexMatrix> ks;
    for (const auto& k : step.kraus()) {
        for (std::size_t e = 0; e < 2; ++e)
            for (std::size_t j = 0; j < dp; ++j) {
                ComplexMatrix proj(dp, dp * 2 * dp);
                for (std::size_t a = 0; a < dp; ++a) proj(a, (a * 2 + e) * dp + j) = 1.0;
                ComplexMatrix prod = proj * k;
                if (prod.max_abs() > 0.0) ks.push_back(std::move(prod));
            }
    }
    EnvParamChannel out;
    out.interaction = QuantumChannel(d * 2, dp, std::move(ks));
    ComplexMatrix theta(2, 2);
    theta(0, 0) = 1.0 - p;
    theta(1, 1) = p;
    out.env_state = DensityMatrix::trusted(std::move(theta));
    out.dim_a = d;
    return out;
}

/// Dephasing as an environment-parametrized channel: theta = sum_i p_i |i><i|,
/// interaction = controlled-Z^i followed by discarding the environment.
inline EnvParamChannel env_form_dephasing(const std::vector<double>& p, std::size_t d) {
    if (p.size() != d) throw DomainError("env_form_dephasing: probability vector length must be d");
    ComplexMatrix z = clock_unitary(d);
    // U = sum_i Z^i (x) |i><i| on A (x) E.
    ComplexMatrix u(d * d, d * d);
    ComplexMatrix zi = ComplexMatrix::identity(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) u(a * d + i, b * d + i) = zi(a, b);
        zi = zi * z;
    }
    QuantumChannel traced = channel_compose(discard_second_channel(d, d), unitary_channel(u));
    EnvParamChannel out;
    out.interaction = traced;
    ComplexMatrix theta(d, d);
    for (std::size_t i = 0; i < d; ++i) theta(i, i) = p[i];
    out.env_state = DensityMatrix(theta);
    out.dim_a = d;
    return out;
}

/// Generalized amplitude damping as an environment-parametrized channel:
/// a qubit beamsplitter of transmissivity eta against the environment qubit
/// theta = p|0><0| + (1-p)|1><1|.
inline EnvParamChannel env_form_gad(double eta, double p) {
    if (eta < 0.0 || eta > 1.0 || p < 0.0 || p > 1.0)
        throw DomainError("env_form_gad: parameters must lie in [0,1]");
    const double c = std::sqrt(eta), s = std::sqrt(1.0 - eta);
    ComplexMatrix u(4, 4);  // basis |a e>: 00, 01, 10, 11
    u(0, 0) = 1.0;
    u(3, 3) = 1.0;
    u(2, 2) = c;
    u(1, 2) = s;
    u(2, 1) = -s;
    u(1, 1) = c;
    EnvParamChannel out;
    out.interaction = channel_compose(discard_second_channel(2, 2), unitary_channel(u));
    ComplexMatrix theta(2, 2);
    theta(0, 0) = p;
    theta(1, 1) = 1.0 - p;
    out.env_state = DensityMatrix::trusted(std::move(theta));
    out.dim_a = 2;
    return out;
}

/// Classical-quantum channel as environment-parametrized with environment
/// nu_all = (x)_x nu^x and a common measure-and-select interaction.
inline EnvParamChannel env_form_cq(const CqChannel& cq) {
    const std::size_t m = cq.alphabet(), d = cq.out_dim();
    std::size_t env_dim = 1;
    for (std::size_t x = 0; x < m; ++x) env_dim *= d;
    std::vector<ComplexMatrix> ks;
    // For outcome x, keep the x-th environment factor and discard the rest.
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t x = 0; x < m; ++x) {
        std::fill(idx.begin(), idx.end(), 0);
        const std::size_t n_discard = env_dim / d;
        for (std::size_t j = 0; j < n_discard; ++j) {
            // Decode j into the basis labels of the discarded factors.
            std::size_t rem = j;
            for (std::size_t f = m; f-- > 0;) {
                if (f == x) continue;
                idx[f] = rem % d;
                rem /= d;
            }
            ComplexMatrix k(d, m * env_dim);
            for (std::size_t bx = 0; bx < d; ++bx) {
                idx[x] = bx;
                std::size_t env_index = 0;
                for (std::size_t f = 0; f < m; ++f) env_index = env_index * d + idx[f];
                k(bx, x * env_dim + env_index) = 1.0;
            }
            ks.push_back(std::move(k));
        }
    }
    EnvParamChannel out;
    out.interaction = QuantumChannel(m * env_dim, d, std::move(ks));
    ComplexMatrix theta = cq.outputs()[0].matrix();
    for (std::size_t x = 1; x < m; ++x) theta = kron(theta, cq.outputs()[x].matrix());
    out.env_state = DensityMatrix::trusted(std::move(theta));
    out.dim_a = m;
    return out;
}

/// Black-box seizing procedures: run the realized channel on the paper's
/// seizing input, post-process, and return the recovered environment state.
inline DensityMatrix seize_environment(EnvParamKind kind, const EnvParamChannel& ch) {
    QuantumChannel realized = ch.realize();
    switch (kind) {
        case EnvParamKind::Erasure: {
            const std::size_t d = realized.dim_in();
            DensityMatrix out = realized.apply(PureState::basis_state(d, 0).density());
            // Relabel |0> -> |0|, |e> -> |1>; other levels never occur.
            ComplexMatrix k0(2, d + 1), k1(2, d + 1);
            k0(0, 0) = 1.0;
            k1(1, d) = 1.0;
            std::vector<ComplexMatrix> ks{k0, k1};
            for (std::size_t j = 1; j < d; ++j) {
                ComplexMatrix kj(2, d + 1);
                kj(1, j) = 1.0;
                ks.push_back(std::move(kj));
            }
            return QuantumChannel(d + 1, 2, std::move(ks)).apply(out);
        }
        case EnvParamKind::Dephasing: {
            const std::size_t d = realized.dim_in();
            std::vector<Complex> v(d, Complex(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
            DensityMatrix out = realized.apply(PureState(std::move(v)).density());
            return unitary_channel(fourier_unitary(d).dagger()).apply(out);
        }
        case EnvParamKind::ChoiTeleportation:
            return choi(realized).state;
        default:
            throw Unsupported("seize_environment: no seizing procedure for this kind");
    }
}

// ---------------------------------------------------------------------------
// Structural predicates
// ---------------------------------------------------------------------------

struct DistinguishabilityReport {
    bool distinguishable = false;
    bool disjoint_support_witness_found = false;  // condition (a), search-based
    bool identity_outside_span = false;           // condition (b), exact rank test
    std::optional<PureState> witness;
    double witness_overlap = 1.0;  // ||Pi_N Pi_M||_inf at the best input found
};

namespace detail {

inline double projector_product_norm(const QuantumChannel& n, const QuantumChannel& m,
                                     const PureState& psi) {
    DensityMatrix rho = apply_with_reference(n, psi.density(), n.dim_in());
    DensityMatrix sig = apply_with_reference(m, psi.density(), m.dim_in());
    ComplexMatrix pn = support_projector(rho.matrix());
    ComplexMatrix pm = support_projector(sig.matrix());
    return operator_norm(pn * pm);
}

// Tr[N(psi) M(psi)] = sum_ij |<psi| I (x) K_i^dag L_j |psi>|^2; the smooth
// surrogate minimized in the disjoint-support search.
inline double cross_overlap(const std::vector<ComplexMatrix>& eops, const std::vector<Complex>& v) {
    double q = 0.0;
    const std::size_t d = v.size();
    for (const auto& e : eops) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            Complex row = 0.0;
            for (std::size_t j = 0; j < d; ++j) row += e(i, j) * v[j];
            s += std::conj(v[i]) * row;
        }
        q += std::norm(s);
    }
    return q;
}

// Solve the real symmetric PSD system (s + lambda I) x = b by spectral
// pseudo-inversion (matrix embedded as complex Hermitian).
inline std::vector<double> solve_spd(const ComplexMatrix& s, const std::vector<double>& b,
                                     double lambda) {
    EigResult e = herm_eig(s);
    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double denom = e.eigenvalues[k] + lambda;
        if (denom <= 1e-300) continue;
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += e.eigenvectors(i, k).real() * b[i];
        proj /= denom;
        for (std::size_t i = 0; i < n; ++i) x[i] += proj * e.eigenvectors(i, k).real();
    }
    return x;
}

// Gauss-Newton polish toward a simultaneous zero of the bilinear forms
// <psi|E|psi>; quadratic convergence turns a 1e-8 residual into machine zero.
inline void gauss_newton_polish(const std::vector<ComplexMatrix>& eops, std::vector<Complex>& v,
                                double& cur) {
    const std::size_t n = v.size();
    const std::size_t m = eops.size();
    double lambda = 1e-8;
    for (int iter = 0; iter < 30 && cur > 1e-30; ++iter) {
        // Residuals and Jacobian in the 2n real coordinates.
        std::vector<double> r(2 * m);
        std::vector<std::vector<double>> jac(2 * m, std::vector<double>(2 * n));
        for (std::size_t t = 0; t < m; ++t) {
            const ComplexMatrix& e = eops[t];
            std::vector<Complex> w(n, 0.0), a(n, 0.0);
            Complex c = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    w[i] += e(i, j) * v[j];
                    a[j] += std::conj(v[i]) * e(i, j);
                }
            }
            for (std::size_t i = 0; i < n; ++i) c += std::conj(v[i]) * w[i];
            r[2 * t] = c.real();
            r[2 * t + 1] = c.imag();
            for (std::size_t k = 0; k < n; ++k) {
                const Complex dx = w[k] + a[k];            // d c / d Re(v_k)
                const Complex dy = Complex(0, 1) * (a[k] - w[k]);  // d c / d Im(v_k)
                jac[2 * t][k] = dx.real();
                jac[2 * t][n + k] = dy.real();
                jac[2 * t + 1][k] = dx.imag();
                jac[2 * t + 1][n + k] = dy.imag();
            }
        }
        ComplexMatrix jtj(2 * n, 2 * n);
        std::vector<double> jtr(2 * n, 0.0);
        for (std::size_t row = 0; row < 2 * m; ++row)
            for (std::size_t i = 0; i < 2 * n; ++i) {
                jtr[i] += jac[row][i] * r[row];
                for (std::size_t j = 0; j < 2 * n; ++j) jtj(i, j) += jac[row][i] * jac[row][j];
            }
        bool accepted = false;
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::vector<double> delta = solve_spd(jtj, jtr, lambda);
            std::vector<Complex> cand(n);
            for (std::size_t k = 0; k < n; ++k)
                cand[k] = v[k] - Complex(delta[k], delta[n + k]);
            double norm2 = 0.0;
            for (const auto& x : cand) norm2 += std::norm(x);
            if (norm2 < 1e-12) {
                lambda *= 10.0;
                continue;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& x : cand) x *= inv;
            const double f = cross_overlap(eops, cand);
            if (f < cur) {
                v = std::move(cand);
                cur = f;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
}

}  // namespace detail

/// Single-letter criterion for perfect distinguishability at some finite n:
/// (a) an input with disjoint output supports exists, and (b) the identity
/// lies outside span{N_i^dag M_j}. Condition (a) is searched by multistart
/// minimization; absence of a witness is reported as "not found", not proof.
inline DistinguishabilityReport perfectly_distinguishable(const QuantumChannel& n,
                                                          const QuantumChannel& m,
                                                          int multistarts = 64,
                                                          std::uint64_t seed = 42) {
    if (n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out())
        throw DimError("perfectly_distinguishable: channel dimensions differ");
    DistinguishabilityReport rep;

    // Condition (b): Gram-Schmidt the vectorized products, then project vec(I).
    const std::size_t d = n.dim_in();
    std::vector<std::vector<Complex>> basis;
    auto project_out = [&](std::vector<Complex>& v) {
        for (const auto& b : basis) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(b[i]) * v[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * b[i];
        }
    };
    for (const auto& ki : n.kraus())
        for (const auto& kj : m.kraus()) {
            std::vector<Complex> v = vec(ki.dagger() * kj);
            project_out(v);
            double norm2 = 0.0;
            for (const auto& x : v) norm2 += std::norm(x);
            if (std::sqrt(norm2) > 1e-12) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (auto& x : v) x *= inv;
                basis.push_back(std::move(v));
            }
        }
    std::vector<Complex> vid = vec(ComplexMatrix::identity(d));
    project_out(vid);
    double resid2 = 0.0;
    for (const auto& x : vid) resid2 += std::norm(x);
    rep.identity_outside_span = std::sqrt(resid2) >= 1e-9 * std::sqrt(static_cast<double>(d));

    // Condition (a): multistart descent on the sphere minimizing
    // q(psi) = sum_ij |<psi|E_ij|psi>|^2 with E_ij = I (x) K_i^dag L_j,
    // which equals Tr[N(psi) M(psi)]. Gradient steps get near a zero, a
    // Gauss-Newton polish finishes it off to machine precision.
    const std::size_t dim_psi = d * d;
    std::vector<ComplexMatrix> eops;
    ComplexMatrix eye_r = ComplexMatrix::identity(d);
    for (const auto& ki : n.kraus())
        for (const auto& kj : m.kraus()) eops.push_back(kron(eye_r, ki.dagger() * kj));

    double best_overlap = std::numeric_limits<double>::infinity();
    PureState best_psi = PureState::basis_state(dim_psi, 0);
    for (int start = 0; start < multistarts; ++start) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(start)));
        std::vector<Complex> v = rng.random_pure(dim_psi).amplitudes();
        double cur = detail::cross_overlap(eops, v);
        double step = 0.1;
        for (int iter = 0; iter < 60 && cur > 1e-30; ++iter) {
            std::vector<Complex> grad(dim_psi);
            const double h = 1e-6;
            for (std::size_t i = 0; i < dim_psi; ++i) {
                for (int part = 0; part < 2; ++part) {
                    std::vector<Complex> vp = v;
                    vp[i] += part == 0 ? Complex(h, 0.0) : Complex(0.0, h);
                    const double f =
                        detail::cross_overlap(eops, PureState::normalized(std::move(vp)).amplitudes());
                    const double g = (f - cur) / h;
                    grad[i] += part == 0 ? Complex(g, 0.0) : Complex(0.0, g);
                }
            }
            bool improved = false;
            for (int ls = 0; ls < 12; ++ls) {
                std::vector<Complex> vn = v;
                for (std::size_t i = 0; i < dim_psi; ++i) vn[i] -= step * grad[i];
                std::vector<Complex> cand = PureState::normalized(std::move(vn)).amplitudes();
                const double f = detail::cross_overlap(eops, cand);
                if (f < cur * (1.0 - 1e-12)) {
                    v = std::move(cand);
                    cur = f;
                    improved = true;
                    step *= 1.3;
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        detail::gauss_newton_polish(eops, v, cur);
        if (cur < best_overlap) {
            best_overlap = cur;
            best_psi = PureState::normalized(std::vector<Complex>(v));
        }
        if (best_overlap < 1e-30) break;
    }
    rep.witness_overlap = detail::projector_product_norm(n, m, best_psi);
    rep.disjoint_support_witness_found = rep.witness_overlap < 1e-9;
    if (rep.disjoint_support_witness_found) rep.witness = best_psi;
    rep.distinguishable = rep.disjoint_support_witness_found && rep.identity_outside_span;
    return rep;
}

/// Joint covariance of two channels with respect to paired unitary lists:
/// N o U^g = V^g o N and the same for M, verified on Choi operators.
inline bool joint_covariance_check(const QuantumChannel& n, const QuantumChannel& m,
                                   const std::vector<ComplexMatrix>& group_in,
                                   const std::vector<ComplexMatrix>& group_out) {
    if (group_in.size() != group_out.size())
        throw DimError("joint_covariance_check: group lists differ in length");
    for (std::size_t g = 0; g < group_in.size(); ++g) {
        for (const auto* ch : {&n, &m}) {
            QuantumChannel lhs = channel_compose(*ch, unitary_channel(group_in[g]));
            QuantumChannel rhs = channel_compose(unitary_channel(group_out[g]), *ch);
            if ((choi(lhs).state.matrix() - choi(rhs).state.matrix()).max_abs() > 1e-9) return false;
        }
    }
    return true;
}

/// Superchannel in its physical realization: post o (ch (x) id_E) o pre.
inline QuantumChannel superchannel_apply(const QuantumChannel& pre, const QuantumChannel& post,
                                         const QuantumChannel& ch) {
    if (pre.dim_out() % ch.dim_in() != 0)
        throw DimError("superchannel_apply: pre-processor output does not factor through A");
    const std::size_t env = pre.dim_out() / ch.dim_in();
    if (post.dim_in() != ch.dim_out() * env)
        throw DimError("superchannel_apply: post-processor input does not match B (x) E");
    QuantumChannel middle = channel_tensor(ch, identity_channel(env));
    return channel_compose(post, channel_compose(middle, pre));
}

}  // namespace qcd
