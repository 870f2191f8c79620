#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qcd/complex_matrix.hpp"
#include "qcd/eig.hpp"
#include "qcd/errors.hpp"
#include "qcd/states.hpp"

namespace qcd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Hilbert-Schmidt orthogonality cutoff for the alpha in (0,1) case split.
inline constexpr double kOrthogonalityTol = 1e-12;
// Tolerated support leakage Tr[(I - Pi_sigma) rho] before declaring +infinity.
inline constexpr double kSupportLeakTol = 1e-9;

/// Extended-real divergence value in bits. +infinity encodes the
/// support/orthogonality cases of the definitions.
struct DivergenceValue {
    double bits = 0.0;
    bool regime_unverified = false;   // divergence-sphere regime not certifiable
    bool extrapolation_warning = false;  // regularized limit did not settle

    bool is_infinite() const { return std::isinf(bits); }

    static DivergenceValue finite(double b) { return DivergenceValue{b, false, false}; }
    static DivergenceValue infinity() { return DivergenceValue{kInf, false, false}; }
};

enum class DivergenceFamily {
    Relative,
    Petz,
    Sandwiched,
    LogEuclidean,
    Max,
    Chernoff,
    ChernoffFlat,
    Hilbert,
    TraceDist,
    Fidelity,
    CDist,
    Bures,
};

struct DivergenceKind {
    DivergenceFamily family = DivergenceFamily::Relative;
    double alpha = 0.0;

    static DivergenceKind relative() { return {DivergenceFamily::Relative, 1.0}; }
    static DivergenceKind petz(double a) { return {DivergenceFamily::Petz, a}; }
    static DivergenceKind sandwiched(double a) { return {DivergenceFamily::Sandwiched, a}; }
    static DivergenceKind log_euclidean(double a) { return {DivergenceFamily::LogEuclidean, a}; }
    static DivergenceKind max() { return {DivergenceFamily::Max, kInf}; }
    static DivergenceKind chernoff() { return {DivergenceFamily::Chernoff, 0.0}; }
    static DivergenceKind chernoff_flat() { return {DivergenceFamily::ChernoffFlat, 0.0}; }
    static DivergenceKind hilbert(double a) { return {DivergenceFamily::Hilbert, a}; }
    static DivergenceKind trace_dist() { return {DivergenceFamily::TraceDist, 0.0}; }
    static DivergenceKind fidelity() { return {DivergenceFamily::Fidelity, 0.0}; }
    static DivergenceKind c_dist() { return {DivergenceFamily::CDist, 0.0}; }
    static DivergenceKind bures() { return {DivergenceFamily::Bures, 0.0}; }

    std::string name() const {
        switch (family) {
            case DivergenceFamily::Relative: return "relative";
            case DivergenceFamily::Petz: return "petz(" + std::to_string(alpha) + ")";
            case DivergenceFamily::Sandwiched: return "sandwiched(" + std::to_string(alpha) + ")";
            case DivergenceFamily::LogEuclidean: return "log-euclidean(" + std::to_string(alpha) + ")";
            case DivergenceFamily::Max: return "max";
            case DivergenceFamily::Chernoff: return "chernoff";
            case DivergenceFamily::ChernoffFlat: return "chernoff-flat";
            case DivergenceFamily::Hilbert: return "hilbert(" + std::to_string(alpha) + ")";
            case DivergenceFamily::TraceDist: return "trace-distance";
            case DivergenceFamily::Fidelity: return "fidelity";
            case DivergenceFamily::CDist: return "c-distance";
            case DivergenceFamily::Bures: return "bures";
        }
        return "?";
    }
};

/// Kinds with a data-processing guarantee (the generalized-divergence axiom),
/// restricted to the parameter ranges where it is known to hold.
inline bool has_data_processing(const DivergenceKind& k) {
    switch (k.family) {
        case DivergenceFamily::Relative:
        case DivergenceFamily::Max:
        case DivergenceFamily::Chernoff:
        case DivergenceFamily::TraceDist:
        case DivergenceFamily::CDist:
        case DivergenceFamily::Bures:
            return true;
        case DivergenceFamily::Petz:
            return k.alpha >= 0.0 && k.alpha <= 2.0;
        case DivergenceFamily::Sandwiched:
            return k.alpha >= 0.5;
        case DivergenceFamily::Hilbert:
            return k.alpha >= 1.0;
        default:
            return false;
    }
}

/// Sub-additivity with respect to tensor products, needed for the
/// environment-state bound on amortized channel divergences.
inline bool is_sub_additive(const DivergenceKind& k) {
    switch (k.family) {
        case DivergenceFamily::Relative:
        case DivergenceFamily::Max:
        case DivergenceFamily::Chernoff:
        case DivergenceFamily::TraceDist:
        case DivergenceFamily::CDist:
        case DivergenceFamily::Bures:
            return true;
        case DivergenceFamily::Petz:
            return k.alpha >= 0.0 && k.alpha <= 2.0;
        case DivergenceFamily::Sandwiched:
            return k.alpha >= 0.5;
        default:
            return false;
    }
}

namespace detail {

inline void check_same_dim(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimError("divergence: state dimensions differ");
}

// Tr[(I - Pi_sigma) rho], from the eigensystem of sigma.
inline double support_leak(const EigResult& sig, const ComplexMatrix& rho) {
    const double thresh = support_threshold(sig.eigenvalues);
    const std::size_t d = sig.eigenvalues.size();
    double leak = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (sig.eigenvalues[j] > thresh) continue;
        Complex q = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                q += std::conj(sig.eigenvectors(i, j)) * rho(i, k) * sig.eigenvectors(k, j);
        leak += q.real();
    }
    return leak;
}

inline bool support_contained(const EigResult& sig, const ComplexMatrix& rho) {
    return support_leak(sig, rho) <= kSupportLeakTol;
}

inline double hs_overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return inner_product(rho.matrix(), sigma.matrix()).real();
}

// |<v_i|w_j>|^2 overlap table between two eigenbases.
inline std::vector<std::vector<double>> overlap_table(const EigResult& a, const EigResult& b) {
    const std::size_t d = a.eigenvalues.size();
    std::vector<std::vector<double>> o(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += std::conj(a.eigenvectors(k, i)) * b.eigenvectors(k, j);
            o[i][j] = std::norm(s);
        }
    return o;
}

// Tr[rho^a sigma^b] with generalized powers (support convention for
// non-positive exponents, x^0 = support projector).
inline double trace_power_product(const EigResult& er, const EigResult& es,
                                  const std::vector<std::vector<double>>& ov, double a, double b) {
    const double tr = support_threshold(er.eigenvalues);
    const double ts = support_threshold(es.eigenvalues);
    const std::size_t d = er.eigenvalues.size();
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double lr = er.eigenvalues[i];
        if (lr <= tr) continue;  // generalized power vanishes off the support
        const double pa = std::pow(lr, a);
        for (std::size_t j = 0; j < d; ++j) {
            const double ls = es.eigenvalues[j];
            if (ls <= ts) continue;
            total += pa * std::pow(ls, b) * ov[i][j];
        }
    }
    return total;
}

// Maximize a smooth scalar function on [lo, hi]: uniform grid then
// golden-section refinement around the best grid cell, to 1e-6 in x.
inline std::pair<double, double> grid_golden_max(const std::function<double(double)>& f, double lo,
                                                 double hi, int grid_points = 101) {
    double best_x = lo, best_v = -kInf;
    const double h = (hi - lo) / (grid_points - 1);
    int best_i = 0;
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + i * h;
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
            best_i = i;
        }
    }
    double a = lo + std::max(0, best_i - 1) * h;
    double b = lo + std::min(grid_points - 1, best_i + 1) * h;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-6) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    if (fm > best_v) {
        best_v = fm;
        best_x = xm;
    }
    return {best_x, best_v};
}

}  // namespace detail

inline DivergenceValue max_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Umegaki relative entropy D(rho||sigma) in bits, with the support case split.
inline DivergenceValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::check_same_dim(rho, sigma);
    EigResult es = herm_eig(sigma.matrix());
    if (!detail::support_contained(es, rho.matrix())) return DivergenceValue::infinity();
    EigResult er = herm_eig(rho.matrix());

    const double tr = support_threshold(er.eigenvalues);
    double h = 0.0;  // Tr[rho log2 rho]
    for (double lam : er.eigenvalues)
        if (lam > tr) h += lam * std::log2(lam);

    const double ts = support_threshold(es.eigenvalues);
    const std::size_t d = rho.dim();
    double cross = 0.0;  // Tr[rho log2 sigma]
    for (std::size_t j = 0; j < d; ++j) {
        if (es.eigenvalues[j] <= ts) continue;
        Complex q = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                q += std::conj(es.eigenvectors(i, j)) * rho.matrix()(i, k) * es.eigenvectors(k, j);
        cross += q.real() * std::log2(es.eigenvalues[j]);
    }
    return DivergenceValue::finite(h - cross);
}

/// Petz-Renyi divergence D_alpha, alpha >= 0; alpha in {0,1} handled as the
/// documented limits.
inline DivergenceValue petz_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
    detail::check_same_dim(rho, sigma);
    if (alpha < 0.0) throw DomainError("petz_renyi: alpha must be >= 0");
    if (alpha == 1.0) return relative_entropy(rho, sigma);
    if (alpha == 0.0) {
        ComplexMatrix proj = support_projector(rho.matrix());
        const double q = inner_product(proj, sigma.matrix()).real();
        if (q <= kOrthogonalityTol) return DivergenceValue::infinity();
        return DivergenceValue::finite(-std::log2(q));
    }
    EigResult er = herm_eig(rho.matrix());
    EigResult es = herm_eig(sigma.matrix());
    if (alpha < 1.0) {
        if (detail::hs_overlap(rho, sigma) <= kOrthogonalityTol) return DivergenceValue::infinity();
    } else {
        if (!detail::support_contained(es, rho.matrix())) return DivergenceValue::infinity();
    }
    auto ov = detail::overlap_table(er, es);
    const double q = detail::trace_power_product(er, es, ov, alpha, 1.0 - alpha);
    if (q <= 0.0) return DivergenceValue::infinity();
    return DivergenceValue::finite(std::log2(q) / (alpha - 1.0));
}

/// Sandwiched Renyi divergence, alpha in (0, inf]; alpha=1 is the relative
/// entropy limit and alpha=inf the max-relative entropy.
inline DivergenceValue sandwiched_renyi(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        double alpha) {
    detail::check_same_dim(rho, sigma);
    if (!(alpha > 0.0)) throw DomainError("sandwiched_renyi: alpha must be > 0");
    if (alpha == 1.0) return relative_entropy(rho, sigma);
    if (std::isinf(alpha)) return max_relative_entropy(rho, sigma);
    EigResult es = herm_eig(sigma.matrix());
    if (alpha < 1.0) {
        if (detail::hs_overlap(rho, sigma) <= kOrthogonalityTol) return DivergenceValue::infinity();
    } else {
        if (!detail::support_contained(es, rho.matrix())) return DivergenceValue::infinity();
    }
    const double expo = (1.0 - alpha) / (2.0 * alpha);
    const double ts = support_threshold(es.eigenvalues);
    std::vector<double> powered(es.eigenvalues.size());
    for (std::size_t i = 0; i < powered.size(); ++i)
        powered[i] = es.eigenvalues[i] > ts ? std::pow(es.eigenvalues[i], expo) : 0.0;
    ComplexMatrix sig_pow = assemble_from_eig(es, powered);
    ComplexMatrix sandwich = sig_pow * rho.matrix() * sig_pow;
    EigResult em = herm_eig(sandwich);
    double q = 0.0;
    for (double mu : em.eigenvalues)
        if (mu > 0.0) q += std::pow(mu, alpha);
    if (q <= 0.0) return DivergenceValue::infinity();
    return DivergenceValue::finite(std::log2(q) / (alpha - 1.0));
}

/// Max-relative entropy via the pseudo-inverse square root form; equals
/// inf { lambda : rho <= 2^lambda sigma }.
inline DivergenceValue max_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::check_same_dim(rho, sigma);
    EigResult es = herm_eig(sigma.matrix());
    if (!detail::support_contained(es, rho.matrix())) return DivergenceValue::infinity();
    const double ts = support_threshold(es.eigenvalues);
    std::vector<double> inv_sqrt(es.eigenvalues.size());
    for (std::size_t i = 0; i < inv_sqrt.size(); ++i)
        inv_sqrt[i] = es.eigenvalues[i] > ts ? 1.0 / std::sqrt(es.eigenvalues[i]) : 0.0;
    ComplexMatrix s = assemble_from_eig(es, inv_sqrt);
    ComplexMatrix t = s * rho.matrix() * s;
    const double lam = max_eigenvalue(t);
    if (lam <= 0.0) return DivergenceValue::infinity();
    return DivergenceValue::finite(std::log2(lam));
}

namespace detail {

// Direct log-Euclidean formula for strictly positive inputs (natural logs
// inside, base-2 outside).
inline double log_euclidean_pd(const ComplexMatrix& rho, const ComplexMatrix& sigma, double alpha) {
    ComplexMatrix lr = mat_fn(rho, [](double x) { return std::log(x); }, true);
    ComplexMatrix ls = mat_fn(sigma, [](double x) { return std::log(x); }, true);
    ComplexMatrix mix = lr * Complex(alpha, 0.0) + ls * Complex(1.0 - alpha, 0.0);
    ComplexMatrix e = mat_fn(mix, [](double x) { return std::exp(x); });
    const double q = e.trace().real();
    return std::log2(q) / (alpha - 1.0);
}

inline bool strictly_positive(const ComplexMatrix& m) {
    EigResult e = herm_eig(m);
    return e.eigenvalues.back() > support_threshold(e.eigenvalues);
}

}  // namespace detail

/// Log-Euclidean Renyi divergence for alpha in (0,1) or (1,inf). Singular
/// inputs are handled through the epsilon-regularized limit with Aitken
/// extrapolation over eps in {1e-4, 1e-5, 1e-6}.
inline DivergenceValue log_euclidean_renyi(const DensityMatrix& rho, const DensityMatrix& sigma,
                                           double alpha) {
    detail::check_same_dim(rho, sigma);
    if (!(alpha > 0.0) || alpha == 1.0)
        throw DomainError("log_euclidean_renyi: alpha must be in (0,1) or (1,inf)");
    if (detail::strictly_positive(rho.matrix()) && detail::strictly_positive(sigma.matrix()))
        return DivergenceValue::finite(detail::log_euclidean_pd(rho.matrix(), sigma.matrix(), alpha));

    const std::size_t d = rho.dim();
    auto regularized = [&](double eps) {
        ComplexMatrix eye = ComplexMatrix::identity(d);
        ComplexMatrix r = (rho.matrix() + eye * Complex(eps, 0.0)) * Complex(1.0 / (1.0 + eps * d), 0.0);
        ComplexMatrix s = (sigma.matrix() + eye * Complex(eps, 0.0)) * Complex(1.0 / (1.0 + eps * d), 0.0);
        return detail::log_euclidean_pd(r, s, alpha);
    };
    const double v1 = regularized(1e-4);
    const double v2 = regularized(1e-5);
    const double v3 = regularized(1e-6);
    const double d1 = v2 - v1, d2 = v3 - v2;
    DivergenceValue out;
    if (std::abs(d2 - d1) > 1e-300 && std::abs(d2) < std::abs(d1)) {
        out.bits = v3 - d2 * d2 / (d2 - d1);  // Aitken delta-squared
    } else {
        out.bits = v3;
    }
    // Flag sequences that are still moving at the finest regularization.
    out.extrapolation_warning = std::abs(d2) > 1e-3 * (1.0 + std::abs(v3));
    return out;
}

/// Chernoff divergence C = sup_{alpha in [0,1]} -log2 Tr[rho^alpha sigma^(1-alpha)].
inline DivergenceValue chernoff(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::check_same_dim(rho, sigma);
    if (detail::hs_overlap(rho, sigma) <= kOrthogonalityTol) return DivergenceValue::infinity();
    EigResult er = herm_eig(rho.matrix());
    EigResult es = herm_eig(sigma.matrix());
    auto ov = detail::overlap_table(er, es);
    auto objective = [&](double a) {
        const double q = detail::trace_power_product(er, es, ov, a, 1.0 - a);
        return q > 0.0 ? -std::log2(q) : kInf;
    };
    auto [a_star, value] = detail::grid_golden_max(objective, 0.0, 1.0);
    (void)a_star;
    return DivergenceValue::finite(value);
}

/// Log-Euclidean Chernoff distance C-flat = sup_alpha (1-alpha) D-flat_alpha.
inline DivergenceValue chernoff_flat(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::check_same_dim(rho, sigma);
    if (detail::hs_overlap(rho, sigma) <= kOrthogonalityTol) return DivergenceValue::infinity();
    bool warned = false;
    auto objective = [&](double a) {
        if (a <= 1e-9 || a >= 1.0 - 1e-9) return 0.0;  // endpoints vanish for states
        DivergenceValue v = log_euclidean_renyi(rho, sigma, a);
        warned = warned || v.extrapolation_warning;
        return (1.0 - a) * v.bits;
    };
    auto [a_star, value] = detail::grid_golden_max(objective, 0.0, 1.0);
    (void)a_star;
    DivergenceValue out = DivergenceValue::finite(std::max(0.0, value));
    out.extrapolation_warning = warned;
    return out;
}

namespace detail {

// Inner maximum of the Hilbert-divergence ratio test at threshold t:
// g(t) = (1/alpha) Tr[rho - t sigma] + (1 - 1/alpha) Tr[(rho - t sigma)_+],
// decreasing in t with root sup_alpha(rho/sigma).
inline double hilbert_g(const ComplexMatrix& rho, const ComplexMatrix& sigma, double alpha, double t) {
    ComplexMatrix diff = rho - sigma * Complex(t, 0.0);
    const double full = diff.trace().real();
    const double pos = trace_of_positive_part(diff);
    return full / alpha + (1.0 - 1.0 / alpha) * pos;
}

}  // namespace detail

/// Hilbert alpha-divergence, alpha >= 1. alpha=1 is the trace-distance limit
/// and alpha=inf the max-relative entropy.
inline DivergenceValue hilbert_alpha(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     double alpha) {
    detail::check_same_dim(rho, sigma);
    if (!(alpha >= 1.0)) throw DomainError("hilbert_alpha: alpha must be >= 1");
    if (alpha == 1.0) {
        const double td = trace_norm(rho.matrix() - sigma.matrix());
        return DivergenceValue::finite(td / (2.0 * std::log(2.0)));
    }
    if (std::isinf(alpha)) return max_relative_entropy(rho, sigma);
    double lo = 0.0, hi = alpha + 1.0;  // the ratio never exceeds alpha
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (detail::hilbert_g(rho.matrix(), sigma.matrix(), alpha, mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double t_star = 0.5 * (lo + hi);
    return DivergenceValue::finite(alpha / (alpha - 1.0) * std::log2(t_star));
}

struct StateMetrics {
    double trace_distance = 0.0;
    double fidelity = 1.0;
    double c_distance = 0.0;
    double bures = 0.0;
};

inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::check_same_dim(rho, sigma);
    ComplexMatrix sqrt_rho = mat_fn(rho.matrix(), [](double x) { return std::sqrt(std::max(0.0, x)); });
    ComplexMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
    EigResult e = herm_eig(inner);
    double s = 0.0;
    for (double lam : e.eigenvalues)
        if (lam > 0.0) s += std::sqrt(lam);
    return std::min(1.0, s * s);
}

inline StateMetrics metrics(const DensityMatrix& rho, const DensityMatrix& sigma) {
    detail::check_same_dim(rho, sigma);
    StateMetrics m;
    m.trace_distance = 0.5 * trace_norm(rho.matrix() - sigma.matrix());
    m.fidelity = fidelity(rho, sigma);
    m.c_distance = std::sqrt(std::max(0.0, 1.0 - m.fidelity));
    m.bures = std::sqrt(std::max(0.0, 2.0 * (1.0 - std::sqrt(m.fidelity))));
    return m;
}

/// Evaluate any kind on a state pair. Fidelity is reported as-is (a
/// similarity, not a divergence); all other kinds are divergences in bits
/// except the metric kinds, which are their usual distances.
inline DivergenceValue evaluate(const DivergenceKind& kind, const DensityMatrix& rho,
                                const DensityMatrix& sigma) {
    switch (kind.family) {
        case DivergenceFamily::Relative: return relative_entropy(rho, sigma);
        case DivergenceFamily::Petz: return petz_renyi(rho, sigma, kind.alpha);
        case DivergenceFamily::Sandwiched: return sandwiched_renyi(rho, sigma, kind.alpha);
        case DivergenceFamily::LogEuclidean: return log_euclidean_renyi(rho, sigma, kind.alpha);
        case DivergenceFamily::Max: return max_relative_entropy(rho, sigma);
        case DivergenceFamily::Chernoff: return chernoff(rho, sigma);
        case DivergenceFamily::ChernoffFlat: return chernoff_flat(rho, sigma);
        case DivergenceFamily::Hilbert: return hilbert_alpha(rho, sigma, kind.alpha);
        case DivergenceFamily::TraceDist:
            return DivergenceValue::finite(metrics(rho, sigma).trace_distance);
        case DivergenceFamily::Fidelity: return DivergenceValue::finite(fidelity(rho, sigma));
        case DivergenceFamily::CDist: return DivergenceValue::finite(metrics(rho, sigma).c_distance);
        case DivergenceFamily::Bures: return DivergenceValue::finite(metrics(rho, sigma).bures);
    }
    throw DomainError("evaluate: unknown divergence kind");
}

/// Two-outcome diagonal embedding zeta(p) = p|0><0| + (1-p)|1><1|.
inline DensityMatrix binary_state(double p) {
    if (p < 0.0 || p > 1.0) throw DomainError("binary_state: probability out of range");
    ComplexMatrix m(2, 2);
    m(0, 0) = p;
    m(1, 1) = 1.0 - p;
    return DensityMatrix::trusted(std::move(m));
}

inline DivergenceValue binary_divergence(double p, double q, const DivergenceKind& kind) {
    return evaluate(kind, binary_state(p), binary_state(q));
}

/// Divergence-sphere optimization value
/// sup_{alpha in (0,1)} ((alpha-1)/alpha) [r - D-flat_alpha(rho||sigma)].
/// The validity regime of the underlying identity is not quantified; results
/// are flagged unverified once the constraint ball is big enough to contain
/// rho (r >= D(rho||sigma)), where the identity trivializes.
inline DivergenceValue divergence_sphere(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         double r) {
    detail::check_same_dim(rho, sigma);
    if (!(r > 0.0)) throw DomainError("divergence_sphere: r must be > 0");
    auto objective = [&](double a) {
        DivergenceValue v = log_euclidean_renyi(rho, sigma, a);
        if (v.is_infinite()) return -kInf;
        return (a - 1.0) / a * (r - v.bits);
    };
    auto [a_star, value] = detail::grid_golden_max(objective, 1e-3, 1.0 - 1e-3);
    (void)a_star;
    DivergenceValue out = DivergenceValue::finite(value);
    DivergenceValue dref = relative_entropy(rho, sigma);
    out.regime_unverified = !(r < dref.bits);
    return out;
}

struct FvdgResult {
    bool holds = false;
    double slack = 0.0;  // (Tr[A+B])^2 - ||A-B||_1^2 - 4 ||A^(1/2) B^(1/2)||_1^2
};

/// Generalized Fuchs-van-de-Graaf check for PSD operators.
inline FvdgResult fvdg_check(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows())
        throw DimError("fvdg_check: operands must be square with equal dims");
    const double tol_a = 1e-10 * (1.0 + a.max_abs());
    const double tol_b = 1e-10 * (1.0 + b.max_abs());
    if (min_eigenvalue(a) < -tol_a || min_eigenvalue(b) < -tol_b)
        throw DomainError("fvdg_check: inputs must be positive semi-definite");
    ComplexMatrix sa = mat_fn(a, [](double x) { return std::sqrt(std::max(0.0, x)); });
    ComplexMatrix sb = mat_fn(b, [](double x) { return std::sqrt(std::max(0.0, x)); });
    const double lhs_diff = trace_norm(a - b);
    const double lhs_cross = trace_norm(sa * sb);
    const double rhs = (a.trace() + b.trace()).real();
    FvdgResult res;
    res.slack = rhs * rhs - lhs_diff * lhs_diff - 4.0 * lhs_cross * lhs_cross;
    res.holds = res.slack >= -1e-10;
    return res;
}

}  // namespace qcd
