#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebids/bspline.hpp"
#include "ebids/linalg.hpp"
#include "ebids/rng.hpp"

namespace ebids {

// Finite-armed linear bandit: mean reward of arm a is <phi(a), theta_star>,
// observation noise is zero-mean with per-arm scale rho(a). Immutable after
// construction; freely shareable across threads.
struct LinearBanditEnv {
    std::size_t dim = 0;
    Mat features;     // K x d, row k = phi(a_k)
    Vec theta_star;   // d
    Vec noise_scale;  // K, rho(a_k) > 0
    double feature_norm_lower = 0.0; // L
    double feature_norm_upper = 0.0; // U
    double rho_min = 0.0;
    double rho_max = 0.0;
    std::size_t optimal_action = 0;
    double b_star = 0.0; // ||theta_star||_2

    LinearBanditEnv(Mat feats, Vec theta, Vec rho)
        : dim(theta.size()),
          features(std::move(feats)),
          theta_star(std::move(theta)),
          noise_scale(std::move(rho)) {
        const std::size_t k = features.rows();
        if (k == 0) throw std::invalid_argument("LinearBanditEnv: empty action set");
        if (features.cols() != dim)
            throw std::invalid_argument("LinearBanditEnv: feature/theta dimension mismatch");
        if (noise_scale.size() != k)
            throw std::invalid_argument("LinearBanditEnv: noise scale per arm required");

        feature_norm_lower = std::numeric_limits<double>::infinity();
        feature_norm_upper = 0.0;
        rho_min = std::numeric_limits<double>::infinity();
        rho_max = 0.0;
        double best_mean = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < k; ++a) {
            const double n = norm2(features.row(a));
            feature_norm_lower = std::min(feature_norm_lower, n);
            feature_norm_upper = std::max(feature_norm_upper, n);
            const double r = noise_scale[a];
            if (!(r > 0.0)) throw std::invalid_argument("LinearBanditEnv: rho must be > 0");
            rho_min = std::min(rho_min, r);
            rho_max = std::max(rho_max, r);
            const double m = dot(features.row(a), theta_star);
            if (m > best_mean) { // strict: lowest-index tie-breaking
                best_mean = m;
                optimal_action = a;
            }
        }
        if (!(feature_norm_lower > 0.0))
            throw std::invalid_argument("LinearBanditEnv: feature norms must be bounded away from 0");
        b_star = norm2(theta_star);
    }

    std::size_t n_arms() const { return features.rows(); }
    std::span<const double> phi(std::size_t a) const { return features.row(a); }
    double rho(std::size_t a) const { return noise_scale[a]; }

    double mean_reward(std::size_t a) const {
        check_action(a);
        return dot(features.row(a), theta_star);
    }

    double gap(std::size_t a) const {
        check_action(a);
        return mean_reward(optimal_action) - dot(features.row(a), theta_star);
    }

    void check_action(std::size_t a) const {
        if (a >= n_arms()) throw std::out_of_range("LinearBanditEnv: action index " + std::to_string(a));
    }
};

// Gaussian noise satisfies the subgaussian envelope with constant rho(a);
// any zero-mean subgaussian sampler can be substituted.
template <class NoiseSampler>
double sample_reward(const LinearBanditEnv& env, std::size_t action, Rng& rng,
                     NoiseSampler&& noise) {
    env.check_action(action);
    return env.mean_reward(action) + env.rho(action) * noise(rng);
}

inline double sample_reward(const LinearBanditEnv& env, std::size_t action, Rng& rng) {
    return sample_reward(env, action, rng, [](Rng& r) { return r.normal(); });
}

// Per-arm standard deviation specification for the uniform-arm generator:
// either an explicit list (length K) or iid Uniform[lo, hi] draws.
struct SdSpec {
    enum class Kind { FixedList, Uniform };
    Kind kind = Kind::FixedList;
    Vec values;
    double lo = 0.0;
    double hi = 0.0;

    static SdSpec fixed(Vec v) {
        if (v.empty()) throw std::invalid_argument("SdSpec: empty sd list");
        for (double x : v)
            if (!(x > 0.0)) throw std::invalid_argument("SdSpec: sd values must be > 0");
        SdSpec s;
        s.kind = Kind::FixedList;
        s.values = std::move(v);
        return s;
    }

    static SdSpec uniform(double lo, double hi) {
        if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("SdSpec: need 0 < lo <= hi");
        SdSpec s;
        s.kind = Kind::Uniform;
        s.lo = lo;
        s.hi = hi;
        return s;
    }

    Vec realize(std::size_t n_arms, Rng& rng) const {
        if (kind == Kind::FixedList) {
            if (values.size() != n_arms)
                throw std::invalid_argument("SdSpec: sd list length must equal n_arms");
            return values;
        }
        Vec out(n_arms);
        for (double& x : out) x = rng.uniform(lo, hi);
        return out;
    }
};

// Arms with iid Uniform[-w, w] feature coordinates.
inline LinearBanditEnv gen_uniform_arms(std::size_t n_arms, std::size_t dim,
                                        double feature_half_width, const SdSpec& sd_spec,
                                        const Vec& theta_star, Rng& rng) {
    if (n_arms == 0) throw std::invalid_argument("gen_uniform_arms: n_arms must be >= 1");
    if (dim == 0) throw std::invalid_argument("gen_uniform_arms: dim must be >= 1");
    if (!(feature_half_width > 0.0))
        throw std::invalid_argument("gen_uniform_arms: half-width must be > 0");
    if (theta_star.size() != dim)
        throw std::invalid_argument("gen_uniform_arms: theta_star dimension mismatch");
    Mat feats(n_arms, dim);
    for (std::size_t a = 0; a < n_arms; ++a)
        for (std::size_t j = 0; j < dim; ++j)
            feats(a, j) = rng.uniform(-feature_half_width, feature_half_width);
    Vec rho = sd_spec.realize(n_arms, rng);
    return LinearBanditEnv(std::move(feats), theta_star, std::move(rho));
}

// Continuum of actions A = [0, 1] discretized into n_points equally spaced
// actions. Coordinate k of phi is a random cubic B-spline (coefficients iid
// Uniform[-1, 1]); draws are rejected until the minimum feature norm over
// the grid clears 1e-6. rho(a) defaults to exp(0.5 - 3a).
inline LinearBanditEnv gen_spline_continuum(
    std::size_t n_points, std::size_t n_knots, std::size_t dim, Rng& coef_rng,
    const Vec& theta_star,
    const std::function<double(double)>& noise_fn =
        [](double a) { return std::exp(0.5 - 3.0 * a); }) {
    if (n_points < 2) throw std::invalid_argument("gen_spline_continuum: n_points must be >= 2");
    if (n_knots < 2) throw std::invalid_argument("gen_spline_continuum: n_knots must be >= 2");
    if (dim == 0) throw std::invalid_argument("gen_spline_continuum: dim must be >= 1");
    if (theta_star.size() != dim)
        throw std::invalid_argument("gen_spline_continuum: theta_star dimension mismatch");

    const CubicBsplineBasis basis(n_knots);
    const std::size_t nb = basis.size();

    std::vector<Vec> grid_basis(n_points);
    Vec grid(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        grid[i] = static_cast<double>(i) / static_cast<double>(n_points - 1);
        grid_basis[i] = basis.evaluate_all(grid[i]);
    }

    for (int attempt = 0; attempt < 100; ++attempt) {
        Mat coef(dim, nb);
        for (std::size_t k = 0; k < dim; ++k)
            for (std::size_t j = 0; j < nb; ++j)
                coef(k, j) = coef_rng.uniform(-1.0, 1.0);
        Mat feats(n_points, dim);
        double min_norm = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_points; ++i) {
            for (std::size_t k = 0; k < dim; ++k)
                feats(i, k) = dot(coef.row(k), grid_basis[i]);
            min_norm = std::min(min_norm, norm2(feats.row(i)));
        }
        if (min_norm < 1e-6) continue;
        Vec rho(n_points);
        for (std::size_t i = 0; i < n_points; ++i) {
            rho[i] = noise_fn(grid[i]);
            if (!(rho[i] > 0.0))
                throw std::invalid_argument("gen_spline_continuum: noise_fn must be > 0");
        }
        return LinearBanditEnv(std::move(feats), theta_star, std::move(rho));
    }
    throw std::runtime_error("gen_spline_continuum: could not draw features with L > 0");
}

} // namespace ebids
