#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "qcd/complex_matrix.hpp"
#include "qcd/errors.hpp"

namespace qcd {

inline constexpr double kHermTol = 1e-10;
// Eigenvalue kept in the support iff lambda > kSupportRelTol * max(1, lambda_max).
inline constexpr double kSupportRelTol = 1e-10;

struct EigResult {
    std::vector<double> eigenvalues;  // sorted descending
    ComplexMatrix eigenvectors;       // columns, matching order
};

/// Cyclic Jacobi eigensolver for complex Hermitian matrices. Each rotation
/// annihilates one off-diagonal pair; quadratic convergence once the
/// off-diagonal mass is small. Dimensions here never exceed a few dozen.
inline EigResult herm_eig(const ComplexMatrix& m_in) {
    if (!m_in.square()) throw InvalidOperator("herm_eig: matrix not square");
    const std::size_t d = m_in.rows();
    const double scale = 1.0 + m_in.max_abs();
    if (!m_in.is_hermitian(kHermTol * scale))
        throw InvalidOperator("herm_eig: input is not Hermitian within tolerance");

    // Work on the exactly Hermitian average to stop asymmetry noise drifting.
    ComplexMatrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            a(i, j) = 0.5 * (m_in(i, j) + std::conj(m_in(j, i)));

    ComplexMatrix v = ComplexMatrix::identity(d);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) s += std::norm(a(i, j));
        return std::sqrt(2.0 * s);
    };

    const double frob = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
    const double target = 1e-15 * frob;
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps && off_norm() > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const Complex apq = a(p, q);
                const double mpq = std::abs(apq);
                if (mpq <= 1e-300) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const Complex phase = apq / mpq;  // a_pq = mpq * phase
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();

                // Real Jacobi angle for the phase-reduced 2x2 block:
                // cot(2*theta) = (a_pp - a_qq) / (2*|a_pq|), smaller-|t| root.
                const double tau = (app - aqq) / (2.0 * mpq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Rotation R: R_pp = c, R_pq = -s, R_qp = conj(phase)*s, R_qq = conj(phase)*c.
                const Complex rqp = std::conj(phase) * s;
                const Complex rqq = std::conj(phase) * c;

                for (std::size_t i = 0; i < d; ++i) {
                    if (i == p || i == q) continue;
                    const Complex aip = a(i, p);
                    const Complex aiq = a(i, q);
                    a(i, p) = aip * c + aiq * rqp;
                    a(i, q) = aip * (-s) + aiq * rqq;
                    a(p, i) = std::conj(a(i, p));
                    a(q, i) = std::conj(a(i, q));
                }
                a(p, p) = app + t * mpq;
                a(q, q) = aqq - t * mpq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t i = 0; i < d; ++i) {
                    const Complex vip = v(i, p);
                    const Complex viq = v(i, q);
                    v(i, p) = vip * c + viq * rqp;
                    v(i, q) = vip * (-s) + viq * rqq;
                }
            }
        }
    }

    EigResult res;
    res.eigenvalues.resize(d);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(d);
    for (std::size_t i = 0; i < d; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

    res.eigenvectors = ComplexMatrix(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        res.eigenvalues[j] = diag[order[j]];
        for (std::size_t i = 0; i < d; ++i) res.eigenvectors(i, j) = v(i, order[j]);
    }
    return res;
}

inline double support_threshold(const std::vector<double>& eigenvalues) {
    const double lmax = eigenvalues.empty() ? 0.0 : eigenvalues.front();
    return kSupportRelTol * std::max(1.0, lmax);
}

/// Apply a scalar function to the eigenvalues. With support_only, eigenvalues
/// at or below the support threshold map to 0 (generalized-inverse convention);
/// otherwise f is applied to every eigenvalue and must be finite there.
inline ComplexMatrix mat_fn(const ComplexMatrix& m, const std::function<double(double)>& f,
                            bool support_only = false) {
    EigResult e = herm_eig(m);
    const double thresh = support_threshold(e.eigenvalues);
    const std::size_t d = m.rows();
    std::vector<double> fe(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (support_only && e.eigenvalues[i] <= thresh) {
            fe[i] = 0.0;
            continue;
        }
        const double y = f(e.eigenvalues[i]);
        if (!std::isfinite(y))
            throw DomainError("mat_fn: function not finite on a kept eigenvalue");
        fe[i] = y;
    }
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                s += e.eigenvectors(i, k) * fe[k] * std::conj(e.eigenvectors(j, k));
            out(i, j) = s;
        }
    return out;
}

/// Same reconstruction from a precomputed eigensystem, with eigenvalues
/// already mapped; avoids re-diagonalizing in divergence kernels.
inline ComplexMatrix assemble_from_eig(const EigResult& e, const std::vector<double>& mapped) {
    const std::size_t d = e.eigenvectors.rows();
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                s += e.eigenvectors(i, k) * mapped[k] * std::conj(e.eigenvectors(j, k));
            out(i, j) = s;
        }
    return out;
}

/// Idempotent projector onto the eigenspaces above the support threshold.
inline ComplexMatrix support_projector(const ComplexMatrix& m) {
    return mat_fn(m, [](double) { return 1.0; }, /*support_only=*/true);
}

inline std::size_t support_rank(const ComplexMatrix& m) {
    EigResult e = herm_eig(m);
    const double thresh = support_threshold(e.eigenvalues);
    std::size_t r = 0;
    for (double lam : e.eigenvalues)
        if (lam > thresh) ++r;
    return r;
}

/// Positive part (Hermitian input): sum of positive-eigenvalue spectral pieces.
inline ComplexMatrix positive_part(const ComplexMatrix& m) {
    return mat_fn(m, [](double x) { return x > 0.0 ? x : 0.0; });
}

inline double trace_of_positive_part(const ComplexMatrix& m) {
    EigResult e = herm_eig(m);
    double s = 0.0;
    for (double lam : e.eigenvalues)
        if (lam > 0.0) s += lam;
    return s;
}

inline double min_eigenvalue(const ComplexMatrix& m) {
    EigResult e = herm_eig(m);
    return e.eigenvalues.back();
}

inline double max_eigenvalue(const ComplexMatrix& m) {
    EigResult e = herm_eig(m);
    return e.eigenvalues.front();
}

inline std::vector<double> singular_values(const ComplexMatrix& m) {
    // Hermitian inputs (the common case here) keep full precision through
    // |eigenvalues|; the Gram-matrix route would square away half the digits
    // of the small singular values.
    if (m.square() && m.is_hermitian(1e-13 * (1.0 + m.max_abs()))) {
        EigResult e = herm_eig(m);
        std::vector<double> sv(e.eigenvalues.size());
        for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::abs(e.eigenvalues[i]);
        std::sort(sv.begin(), sv.end(), std::greater<double>());
        return sv;
    }
    const ComplexMatrix g = m.dagger() * m;
    EigResult e = herm_eig(g);
    std::vector<double> sv(e.eigenvalues.size());
    for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::sqrt(std::max(0.0, e.eigenvalues[i]));
    return sv;
}

/// Schatten p-norm, p >= 1 or infinity. p=1 trace norm, p=2 Frobenius,
/// p=inf operator norm.
inline double schatten_norm(const ComplexMatrix& m, double p) {
    if (!(p >= 1.0)) throw DomainError("schatten_norm: p must be >= 1");
    std::vector<double> sv = singular_values(m);
    if (std::isinf(p)) return sv.empty() ? 0.0 : *std::max_element(sv.begin(), sv.end());
    if (p == 1.0) return std::accumulate(sv.begin(), sv.end(), 0.0);
    if (p == 2.0) return m.frobenius_norm();
    double s = 0.0;
    for (double x : sv) s += std::pow(x, p);
    return std::pow(s, 1.0 / p);
}

inline double trace_norm(const ComplexMatrix& m) { return schatten_norm(m, 1.0); }
inline double operator_norm(const ComplexMatrix& m) {
    return schatten_norm(m, std::numeric_limits<double>::infinity());
}

/// exp(i*G) for Hermitian G; the generator parameterization of unitaries.
inline ComplexMatrix unitary_exp(const ComplexMatrix& g) {
    EigResult e = herm_eig(g);
    const std::size_t d = g.rows();
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const Complex ph(std::cos(e.eigenvalues[k]), std::sin(e.eigenvalues[k]));
                s += e.eigenvectors(i, k) * ph * std::conj(e.eigenvectors(j, k));
            }
            out(i, j) = s;
        }
    return out;
}

}  // namespace qcd
