#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "qcd/complex_matrix.hpp"
#include "qcd/eig.hpp"
#include "qcd/rng.hpp"
#include "qcd/states.hpp"

namespace qcd {

/// Worker cap for multistart searches: QCD_THREADS if set, else hardware.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("QCD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Run fn(start) for start in [0, starts) across threads and keep the best
/// result by value (ties: lowest start index). Deterministic for any thread
/// count as long as fn(start) is a pure function of its index.
template <typename Result, typename Fn>
Result parallel_best(int starts, Fn&& fn) {
    const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(starts));
    std::vector<std::pair<bool, Result>> slots(starts);
    if (workers <= 1) {
        for (int s = 0; s < starts; ++s) slots[s] = {true, fn(s)};
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (int s = next.fetch_add(1); s < starts; s = next.fetch_add(1))
                    slots[s] = {true, fn(s)};
            });
        for (auto& t : pool) t.join();
    }
    int best = 0;
    for (int s = 1; s < starts; ++s)
        if (slots[s].second.value > slots[best].second.value) best = s;
    return slots[best].second;
}

struct SphereSearchResult {
    PureState arg;
    double value = 0.0;
};

struct SphereSearchOptions {
    int multistarts = 32;
    std::uint64_t seed = 42;
    int max_iters = 200;
    double value_tol = 1e-7;
    double fd_step = 1e-5;
};

/// Maximize f over the complex unit sphere by projected gradient ascent with
/// finite-difference gradients and backtracking steps, multistarted.
inline SphereSearchResult maximize_on_sphere(const std::function<double(const PureState&)>& f,
                                             std::size_t dim, const SphereSearchOptions& opt = {},
                                             const std::vector<PureState>& warm_starts = {}) {
    auto one_start = [&](int start) -> SphereSearchResult {
        std::vector<Complex> v;
        if (start < static_cast<int>(warm_starts.size())) {
            v = warm_starts[start].amplitudes();
        } else {
            Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(start)));
            v = rng.random_pure(dim).amplitudes();
        }
        double cur = f(PureState::normalized(std::vector<Complex>(v)));
        if (std::isinf(cur)) return {PureState::normalized(std::move(v)), cur};
        double step = 0.1;
        for (int iter = 0; iter < opt.max_iters; ++iter) {
            // Central differences; forward ones bias the gradient near maxima.
            std::vector<Complex> grad(dim);
            const double h = opt.fd_step;
            bool hit_inf = false;
            for (std::size_t i = 0; i < dim && !hit_inf; ++i) {
                for (int part = 0; part < 2; ++part) {
                    const Complex dir = part == 0 ? Complex(h, 0.0) : Complex(0.0, h);
                    std::vector<Complex> vp = v, vm = v;
                    vp[i] += dir;
                    vm[i] -= dir;
                    const double fp = f(PureState::normalized(std::move(vp)));
                    const double fm = f(PureState::normalized(std::move(vm)));
                    if (std::isinf(fp) || std::isinf(fm)) {
                        cur = std::max(fp, fm);
                        hit_inf = true;
                        break;
                    }
                    const double g = (fp - fm) / (2.0 * h);
                    grad[i] += part == 0 ? Complex(g, 0.0) : Complex(0.0, g);
                }
            }
            if (hit_inf) break;
            double gnorm = 0.0;
            for (const auto& g : grad) gnorm += std::norm(g);
            if (std::sqrt(gnorm) < 1e-12) break;
            bool improved = false;
            for (int ls = 0; ls < 14; ++ls) {
                std::vector<Complex> vn = v;
                for (std::size_t i = 0; i < dim; ++i) vn[i] += step * grad[i];
                PureState cand = PureState::normalized(std::move(vn));
                const double fc = f(cand);
                if (fc > cur + opt.value_tol * 1e-3 || std::isinf(fc)) {
                    v = cand.amplitudes();
                    if (std::isinf(fc)) return {cand, fc};
                    improved = fc > cur + opt.value_tol;
                    cur = fc;
                    step = std::min(step * 1.5, 10.0);
                    break;
                }
                step *= 0.4;
            }
            if (!improved && step < 1e-10) break;
        }
        return {PureState::normalized(std::move(v)), cur};
    };
    return parallel_best<SphereSearchResult>(std::max(opt.multistarts,
                                                      static_cast<int>(warm_starts.size())),
                                             one_start);
}

struct NelderMeadOptions {
    int max_iters = 400;
    double tol = 1e-9;
    double init_scale = 0.3;
};

/// Nelder-Mead maximization; returns the best value, x holds the argmax.
inline double nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                              std::vector<double>& x, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> simplex(n + 1, x);
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.init_scale;
    for (std::size_t i = 0; i <= n; ++i) val[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    for (int iter = 0; iter < opt.max_iters; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
        if (val[order.front()] - val[order.back()] < opt.tol) break;

        const std::size_t worst = order.back();
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (centroid[k] - simplex[worst][k]);
            return p;
        };
        std::vector<double> refl = blend(1.0);
        const double f_refl = f(refl);
        const double f_best = val[order.front()];
        const double f_second_worst = val[order[n - 1]];
        if (f_refl > f_best) {
            std::vector<double> exp_p = blend(2.0);
            const double f_exp = f(exp_p);
            simplex[worst] = f_exp > f_refl ? std::move(exp_p) : std::move(refl);
            val[worst] = std::max(f_exp, f_refl);
        } else if (f_refl > f_second_worst) {
            simplex[worst] = std::move(refl);
            val[worst] = f_refl;
        } else {
            std::vector<double> contr = blend(-0.5);
            const double f_contr = f(contr);
            if (f_contr > val[worst]) {
                simplex[worst] = std::move(contr);
                val[worst] = f_contr;
            } else {
                // Shrink toward the best vertex.
                const auto& best_pt = simplex[order.front()];
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == order.front()) continue;
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] = 0.5 * (simplex[i][k] + best_pt[k]);
                    val[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (val[i] > val[best]) best = i;
    x = simplex[best];
    return val[best];
}

/// Hermitian matrix from d*d real parameters (diagonal then upper re/im).
inline ComplexMatrix hermitian_from_params(const double* p, std::size_t d) {
    ComplexMatrix h(d, d);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d; ++i) h(i, i) = p[idx++];
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double re = p[idx++];
            const double im = p[idx++];
            h(i, j) = Complex(re, im);
            h(j, i) = Complex(re, -im);
        }
    return h;
}

/// Mixed state from d + d*d real parameters: eigenvalues softmax(w) in the
/// frame base * exp(i G(theta)). A base unitary lets searches start exactly
/// at a chosen state.
inline DensityMatrix state_from_params(const double* p, std::size_t d, const ComplexMatrix& base) {
    std::vector<double> w(d);
    double wmax = -1e300;
    for (std::size_t i = 0; i < d; ++i) wmax = std::max(wmax, p[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        w[i] = std::exp(std::min(p[i] - wmax, 500.0));
        z += w[i];
    }
    for (double& x : w) x /= z;
    ComplexMatrix u = base * unitary_exp(hermitian_from_params(p + d, d));
    ComplexMatrix rho(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += u(i, k) * w[k] * std::conj(u(j, k));
            rho(i, j) = s;
        }
    return DensityMatrix::trusted(std::move(rho));
}

inline std::size_t state_param_count(std::size_t d) { return d + d * d; }

/// Unitary completing |psi> to an orthonormal basis (first column = psi).
inline ComplexMatrix basis_completion(const PureState& psi) {
    const std::size_t d = psi.dim();
    ComplexMatrix u(d, d);
    for (std::size_t i = 0; i < d; ++i) u(i, 0) = psi.amplitudes()[i];
    std::size_t col = 1;
    for (std::size_t e = 0; e < d && col < d; ++e) {
        std::vector<Complex> v(d, Complex(0.0, 0.0));
        v[e] = 1.0;
        for (std::size_t k = 0; k < col; ++k) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < d; ++i) dot += std::conj(u(i, k)) * v[i];
            for (std::size_t i = 0; i < d; ++i) v[i] -= dot * u(i, k);
        }
        double n2 = 0.0;
        for (const auto& x : v) n2 += std::norm(x);
        if (n2 < 1e-12) continue;
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < d; ++i) u(i, col) = v[i] * inv;
        ++col;
    }
    return u;
}

}  // namespace qcd
