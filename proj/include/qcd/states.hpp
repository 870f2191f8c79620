#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qcd/complex_matrix.hpp"
#include "qcd/eig.hpp"
#include "qcd/errors.hpp"

namespace qcd {

/// Hermitian operator with validated symmetry.
class HermitianOperator {
  public:
    HermitianOperator() = default;

    explicit HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)) {
        if (!matrix_.square()) throw InvalidOperator("HermitianOperator: not square");
        const double scale = 1.0 + matrix_.max_abs();
        if (!matrix_.is_hermitian(kHermTol * scale))
            throw InvalidOperator("HermitianOperator: not Hermitian within tolerance");
        // Store the exactly Hermitian average.
        const std::size_t d = matrix_.rows();
        for (std::size_t i = 0; i < d; ++i) {
            matrix_(i, i) = Complex(matrix_(i, i).real(), 0.0);
            for (std::size_t j = i + 1; j < d; ++j) {
                const Complex avg = 0.5 * (matrix_(i, j) + std::conj(matrix_(j, i)));
                matrix_(i, j) = avg;
                matrix_(j, i) = std::conj(avg);
            }
        }
    }

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

  private:
    ComplexMatrix matrix_;
};

/// Density matrix: PSD up to -1e-10 eigenvalue noise (clipped, then
/// renormalized) and unit trace within 1e-10.
class DensityMatrix {
  public:
    DensityMatrix() = default;

    explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(HermitianOperator(m)) {}

    explicit DensityMatrix(const HermitianOperator& h) {
        const double tr = h.matrix().trace().real();
        if (std::abs(tr - 1.0) > 1e-10)
            throw InvalidOperator("DensityMatrix: trace differs from 1 beyond tolerance");
        EigResult e = herm_eig(h.matrix());
        bool needs_repair = false;
        for (double lam : e.eigenvalues) {
            if (lam < -1e-10) throw InvalidOperator("DensityMatrix: negative eigenvalue beyond tolerance");
            if (lam < 0.0) needs_repair = true;
        }
        if (!needs_repair) {
            matrix_ = h.matrix();
            return;
        }
        std::vector<double> clipped = e.eigenvalues;
        double sum = 0.0;
        for (double& lam : clipped) {
            if (lam < 0.0) lam = 0.0;
            sum += lam;
        }
        for (double& lam : clipped) lam /= sum;
        matrix_ = assemble_from_eig(e, clipped);
    }

    static DensityMatrix maximally_mixed(std::size_t d) {
        ComplexMatrix m = ComplexMatrix::identity(d);
        m *= Complex(1.0 / static_cast<double>(d), 0.0);
        DensityMatrix rho;
        rho.matrix_ = m;
        return rho;
    }

    /// Bypasses validation for matrices known valid by construction.
    static DensityMatrix trusted(ComplexMatrix m) {
        DensityMatrix rho;
        rho.matrix_ = std::move(m);
        return rho;
    }

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

  private:
    ComplexMatrix matrix_;
};

/// Unit vector in C^d.
class PureState {
  public:
    PureState() = default;

    explicit PureState(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
        double n2 = 0.0;
        for (const auto& a : amps_) n2 += std::norm(a);
        const double n = std::sqrt(n2);
        if (std::abs(n - 1.0) > 1e-12)
            throw InvalidOperator("PureState: vector is not normalized");
    }

    /// Normalizes an arbitrary nonzero vector.
    static PureState normalized(std::vector<Complex> v) {
        double n2 = 0.0;
        for (const auto& a : v) n2 += std::norm(a);
        if (n2 <= 0.0) throw InvalidOperator("PureState: zero vector");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& a : v) a *= inv;
        PureState psi;
        psi.amps_ = std::move(v);
        return psi;
    }

    static PureState basis_state(std::size_t d, std::size_t k) {
        std::vector<Complex> v(d, Complex(0.0, 0.0));
        v[k] = 1.0;
        return PureState(std::move(v));
    }

    /// Maximally entangled state on R (x) A with Schmidt rank d.
    static PureState maximally_entangled(std::size_t d) {
        std::vector<Complex> v(d * d, Complex(0.0, 0.0));
        const double a = 1.0 / std::sqrt(static_cast<double>(d));
        for (std::size_t i = 0; i < d; ++i) v[i * d + i] = a;
        PureState psi;
        psi.amps_ = std::move(v);
        return psi;
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<Complex>& amplitudes() const { return amps_; }

    DensityMatrix density() const {
        const std::size_t d = amps_.size();
        ComplexMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = amps_[i] * std::conj(amps_[j]);
        return DensityMatrix::trusted(std::move(m));
    }

  private:
    std::vector<Complex> amps_;
};

inline PureState tensor(const PureState& a, const PureState& b) {
    std::vector<Complex> v(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j)
            v[i * b.dim() + j] = a.amplitudes()[i] * b.amplitudes()[j];
    return PureState::normalized(std::move(v));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix::trusted(kron(a.matrix(), b.matrix()));
}

inline DensityMatrix reduce(const DensityMatrix& rho, Keep keep, std::size_t da, std::size_t db) {
    return DensityMatrix(HermitianOperator(partial_trace(rho.matrix(), keep, da, db)));
}

}  // namespace qcd
