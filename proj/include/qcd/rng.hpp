#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qcd/complex_matrix.hpp"
#include "qcd/states.hpp"

namespace qcd {

// splitmix64; used to derive independent per-task seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent substream; deterministic regardless of call interleaving.
    Rng derive(std::uint64_t index) const { return Rng(mix_seed(seed_, index)); }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    std::size_t uniform_index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
    }

    Complex gaussian_complex() { return Complex(gaussian(), gaussian()); }

    ComplexMatrix ginibre(std::size_t rows, std::size_t cols) {
        ComplexMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = gaussian_complex();
        return m;
    }

    ComplexMatrix random_hermitian(std::size_t d) {
        ComplexMatrix g = ginibre(d, d);
        ComplexMatrix h = g + g.dagger();
        h *= Complex(0.5, 0.0);
        return h;
    }

    /// Haar-ish unitary via Gram-Schmidt on a Ginibre matrix.
    ComplexMatrix random_unitary(std::size_t d) {
        ComplexMatrix g = ginibre(d, d);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex dot = 0.0;
                for (std::size_t i = 0; i < d; ++i) dot += std::conj(g(i, k)) * g(i, j);
                for (std::size_t i = 0; i < d; ++i) g(i, j) -= dot * g(i, k);
            }
            double n2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) n2 += std::norm(g(i, j));
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t i = 0; i < d; ++i) g(i, j) *= inv;
        }
        return g;
    }

    PureState random_pure(std::size_t d) {
        std::vector<Complex> v(d);
        for (auto& a : v) a = gaussian_complex();
        return PureState::normalized(std::move(v));
    }

    /// Full-rank random state (Ginibre ensemble) unless a smaller rank is given.
    DensityMatrix random_state(std::size_t d, std::size_t rank = 0) {
        if (rank == 0) rank = d;
        ComplexMatrix g = ginibre(d, rank);
        ComplexMatrix rho = g * g.dagger();
        const double tr = rho.trace().real();
        rho *= Complex(1.0 / tr, 0.0);
        return DensityMatrix::trusted(std::move(rho));
    }

    /// Random state mixed with enough identity to bound eigenvalues away from 0.
    DensityMatrix random_pd_state(std::size_t d, double floor = 0.05) {
        DensityMatrix rho = random_state(d);
        ComplexMatrix mixed = rho.matrix() * Complex(1.0 - floor, 0.0) +
                              ComplexMatrix::identity(d) * Complex(floor / static_cast<double>(d), 0.0);
        return DensityMatrix::trusted(std::move(mixed));
    }

    std::vector<double> random_probability_vector(std::size_t n) {
        std::vector<double> p(n);
        double s = 0.0;
        for (auto& x : p) {
            x = -std::log(std::max(uniform(), 1e-300));
            s += x;
        }
        for (auto& x : p) x /= s;
        return p;
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace qcd
