#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ebids/env.hpp"
#include "ebids/linalg.hpp"
#include "ebids/rng.hpp"

namespace ebids {

// omega(v, phi, rho) = rho^{-2} <v, phi>^2, the weighted squared projection
// of phi on the unit direction v.
inline double omega(std::span<const double> v_min, std::span<const double> phi, double rho) {
    if (std::abs(norm2(v_min) - 1.0) > 1e-9)
        throw std::invalid_argument("omega: v_min must be a unit vector");
    if (!(rho > 0.0)) throw std::invalid_argument("omega: rho must be > 0");
    const double proj = dot(v_min, phi);
    return proj * proj / (rho * rho);
}

struct KappaResult {
    double value = 0.0;
    Vec certificate;        // unit vector achieving (approximately) the min
    bool degenerate = false; // arms do not span R^d, so kappa ~ 0
};

struct KappaSearch {
    int n_starts = 64;    // deterministic pseudo-random starts on the sphere
    int max_iters = 400;  // projected subgradient iterations per start
    int mwu_rounds = 200; // multiplicative-weights minimax rounds
    std::uint64_t seed = 0x5eed5eedULL;
};

namespace detail {

inline double kappa_objective(const LinearBanditEnv& env, std::span<const double> weights,
                              std::span<const double> v, std::size_t* active = nullptr) {
    double best = -1.0;
    for (std::size_t a = 0; a < env.n_arms(); ++a) {
        const double proj = dot(v, env.phi(a));
        const double val = weights[a] * proj * proj;
        if (val > best) {
            best = val;
            if (active) *active = a;
        }
    }
    return best;
}

inline void normalize_inplace(Vec& v) {
    const double n = norm2(v);
    for (double& x : v) x /= n;
}

// Derivative-free polish for the spherical minimax: golden-section searches
// along great circles through v. Handles the kinks of the max-of-quadratics
// objective where subgradient steps stall.
inline void great_circle_polish(const LinearBanditEnv& env, std::span<const double> weights,
                                Vec& v, double& f, Rng& rng, int rounds) {
    const std::size_t d = v.size();
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int round = 0; round < rounds; ++round) {
        Vec u(d);
        if (round < static_cast<int>(d)) {
            u.assign(d, 0.0);
            u[static_cast<std::size_t>(round)] = 1.0;
        } else {
            for (double& x : u) x = rng.normal();
        }
        const double along = dot(u, v);
        for (std::size_t i = 0; i < d; ++i) u[i] -= along * v[i];
        const double un = norm2(u);
        if (un < 1e-12) continue;
        for (double& x : u) x /= un;
        const auto eval = [&](double s) {
            Vec cand(d);
            const double cs = std::cos(s), sn = std::sin(s);
            for (std::size_t i = 0; i < d; ++i) cand[i] = cs * v[i] + sn * u[i];
            return kappa_objective(env, weights, cand);
        };
        double lo = -1.5707963267948966, hi = 1.5707963267948966;
        double m1 = hi - golden * (hi - lo), m2 = lo + golden * (hi - lo);
        double f1 = eval(m1), f2 = eval(m2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - golden * (hi - lo);
                f1 = eval(m1);
            } else {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + golden * (hi - lo);
                f2 = eval(m2);
            }
        }
        const double s = 0.5 * (lo + hi);
        const double fs = eval(s);
        if (fs < f) {
            const double cs = std::cos(s), sn = std::sin(s);
            for (std::size_t i = 0; i < d; ++i) v[i] = cs * v[i] + sn * u[i];
            normalize_inplace(v);
            f = fs;
        }
    }
}

} // namespace detail

// kappa = min_{||v||=1} max_a rho(a)^{-2} <v, phi(a)>^2, approximated by
// multi-start projected subgradient descent plus a multiplicative-weights
// minimax pass, both seeded deterministically. Weights are normalized by
// their maximum internally, which makes the rho -> c*rho scaling law exact.
inline KappaResult kappa(const LinearBanditEnv& env, const KappaSearch& search = {}) {
    const std::size_t d = env.dim;
    if (d == 0) throw std::invalid_argument("kappa: dimension must be >= 1");
    const std::size_t k = env.n_arms();

    Vec weights(k);
    double w_max = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        weights[a] = 1.0 / (env.rho(a) * env.rho(a));
        w_max = std::max(w_max, weights[a]);
    }
    for (double& w : weights) w /= w_max;

    // Span check: lambda_min of the feature Gram matrix near zero means some
    // direction is orthogonal to every arm and kappa degenerates to ~0.
    Mat gram(d, d, 0.0);
    double gram_scale = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) gram(i, j) += env.phi(a)[i] * env.phi(a)[j];
    for (std::size_t i = 0; i < d; ++i) gram_scale = std::max(gram_scale, gram(i, i));
    const EigenPair gram_min = min_eigenpair(gram);
    const bool degenerate = gram_min.value <= 1e-12 * std::max(1.0, gram_scale);

    Vec best_v;
    double best_val = std::numeric_limits<double>::infinity();
    const auto consider = [&](const Vec& v) {
        const double val = detail::kappa_objective(env, weights, v);
        if (val < best_val) {
            best_val = val;
            best_v = v;
        }
    };

    consider(gram_min.vector);

    std::vector<Vec> starts;
    for (std::size_t i = 0; i < d; ++i) {
        Vec e(d, 0.0);
        e[i] = 1.0;
        starts.push_back(e);
    }
    {
        Vec ones(d, 1.0 / std::sqrt(static_cast<double>(d)));
        starts.push_back(ones);
    }
    Rng rng(search.seed);
    for (int s = 0; s < search.n_starts; ++s) {
        Vec v(d);
        for (double& x : v) x = rng.normal();
        if (norm2(v) < 1e-12) continue;
        detail::normalize_inplace(v);
        starts.push_back(v);
    }

    for (Vec v : starts) {
        std::size_t active = 0;
        double f = detail::kappa_objective(env, weights, v, &active);
        for (int it = 0; it < search.max_iters; ++it) {
            const double proj = dot(v, env.phi(active));
            Vec grad(d);
            for (std::size_t i = 0; i < d; ++i) grad[i] = 2.0 * weights[active] * proj * env.phi(active)[i];
            const double radial = dot(grad, v);
            Vec tangent(d);
            for (std::size_t i = 0; i < d; ++i) tangent[i] = grad[i] - radial * v[i];
            const double tn2 = dot(tangent, tangent);
            if (tn2 < 1e-28) break;
            double eta = 1.0;
            bool improved = false;
            for (int bt = 0; bt < 40; ++bt, eta *= 0.5) {
                Vec cand(d);
                for (std::size_t i = 0; i < d; ++i) cand[i] = v[i] - eta * tangent[i];
                detail::normalize_inplace(cand);
                std::size_t cand_active = 0;
                const double cf = detail::kappa_objective(env, weights, cand, &cand_active);
                if (cf < f - 1e-4 * eta * tn2) {
                    v = cand;
                    f = cf;
                    active = cand_active;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        consider(v);
    }

    // Multiplicative weights on arms against the min eigenvector of the
    // mixed information matrix.
    {
        Vec mu(k, 1.0 / static_cast<double>(k));
        for (int round = 0; round < search.mwu_rounds; ++round) {
            Mat m(d, d, 0.0);
            for (std::size_t a = 0; a < k; ++a) {
                const double c = mu[a] * weights[a];
                if (c == 0.0) continue;
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) m(i, j) += c * env.phi(a)[i] * env.phi(a)[j];
            }
            const EigenPair p = min_eigenpair(m);
            consider(p.vector);
            double vmax = 0.0;
            Vec vals(k);
            for (std::size_t a = 0; a < k; ++a) {
                const double pr = dot(p.vector, env.phi(a));
                vals[a] = weights[a] * pr * pr;
                vmax = std::max(vmax, vals[a]);
            }
            if (vmax <= 0.0) break;
            double total = 0.0;
            for (std::size_t a = 0; a < k; ++a) {
                mu[a] *= std::exp(2.0 * vals[a] / vmax);
                total += mu[a];
            }
            for (double& x : mu) x /= total;
        }
    }

    {
        Rng polish_rng(search.seed ^ 0x9e3779b97f4a7c15ULL);
        double f = best_val;
        Vec v = best_v;
        detail::great_circle_polish(env, weights, v, f, polish_rng, 60 * static_cast<int>(d));
        if (f < best_val) {
            best_val = f;
            best_v = v;
        }
    }

    KappaResult out;
    out.value = best_val * w_max;
    out.certificate = best_v;
    out.degenerate = degenerate;
    return out;
}

// Constants of the bound-refinement analysis. Fields follow the
// supplementary definitions verbatim.
struct EbidsConstants {
    double c0 = 0.0;
    double h0 = 0.0;
    double u0 = 0.0;
    double u1 = 0.0;
    double w0 = 0.0;
    double w1 = 0.0;
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double g = 0.0;
    double kappa = 0.0;
};

inline EbidsConstants ebids_constants(double L, double U, double rho_min, double gamma,
                                      double kappa_value, std::size_t d, double alpha, double g,
                                      double delta, double B) {
    if (!(L > 0.0) || !(U >= L)) throw std::invalid_argument("ebids_constants: need 0 < L <= U");
    if (!(rho_min > 0.0)) throw std::invalid_argument("ebids_constants: rho_min must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("ebids_constants: gamma must be > 0");
    if (!(kappa_value > 0.0)) throw std::invalid_argument("ebids_constants: kappa must be > 0");
    if (d == 0) throw std::invalid_argument("ebids_constants: d must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ebids_constants: alpha must be in (0,1)");
    if (!(g > 0.0)) throw std::invalid_argument("ebids_constants: g must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("ebids_constants: delta must be in (0,1)");
    if (!(B > 0.0)) throw std::invalid_argument("ebids_constants: B must be > 0");

    const double dd = static_cast<double>(d);
    const double q = U * U / (rho_min * rho_min); // rho_min^{-2} U^2
    const double log_term = std::log(1.0 + q / gamma);
    const double ratio = (1.0 - alpha) / alpha;
    const double g2inv = 1.0 / (g * g);

    EbidsConstants c;
    c.g = g;
    c.kappa = kappa_value;
    c.c0 = L * L / (U * U * (gamma + q) * (1.0 / kappa_value + 1.0 / gamma));
    c.h0 = 8.0 * std::log(5.0 / 4.0) + 4.0 * std::log(1.0 / delta) + 2.0 * dd * log_term +
           2.0 * gamma * B * B;
    c.u0 = c.c0 / (6.0 + 16.0 * g2inv) * std::log(2.0) + ratio * dd * log_term;
    c.u1 = c.c0 / (12.0 + 32.0 * g2inv) - ratio / 2.0 * dd;
    c.w0 = c.c0 / (6.0 + 16.0 * g2inv) + ratio * dd * log_term;
    c.w1 = c.c0 / (12.0 + 32.0 * g2inv) - ratio * dd;
    c.b0 = (c.w0 * (gamma / dd * c.u0 - gamma + q) - gamma * c.u0) / dd + gamma - q;
    c.b1 = (gamma * c.u1 - gamma / dd * c.u1 * c.w0 - gamma / dd * c.u0 * c.w1 + gamma * c.w1 -
            q * c.w1) /
           dd;
    c.b2 = gamma / (dd * dd) * c.u1 * c.w1;
    return c;
}

// Assumption on the mixture weight: alpha >= d / (d + c0 / (12 + 32 g^{-2})).
inline double min_alpha(std::size_t d, double c0, double g) {
    if (!(c0 > 0.0)) throw std::invalid_argument("min_alpha: c0 must be > 0");
    if (!(g > 0.0)) throw std::invalid_argument("min_alpha: g must be > 0");
    const double dd = static_cast<double>(d);
    return dd / (dd + c0 / (12.0 + 32.0 / (g * g)));
}

// Assumption on the exploration length:
// T_B >= max{4, exp[ (h0+2d+8)/b2 * (4 g^{-2} B*^{-2} + |b1|/(2d+8) + |b0|/(h0+2d+8)) ]}.
// Requires b2 > 0, i.e. alpha above the min_alpha threshold.
inline double min_exploration_horizon(const EbidsConstants& c, double b_star, std::size_t d) {
    if (!(b_star > 0.0))
        throw std::invalid_argument("min_exploration_horizon: b_star must be > 0");
    if (!(c.b2 > 0.0)) {
        std::ostringstream msg;
        msg << "min_exploration_horizon: b2 = " << c.b2
            << " <= 0; alpha must exceed the threshold d/(d + c0/(12+32 g^-2)) = "
            << min_alpha(d, c.c0, c.g);
        throw std::invalid_argument(msg.str());
    }
    const double dd = static_cast<double>(d);
    const double denom = c.h0 + 2.0 * dd + 8.0;
    const double inner = 4.0 / (c.g * c.g * b_star * b_star) + std::abs(c.b1) / (2.0 * dd + 8.0) +
                         std::abs(c.b0) / denom;
    return std::max(4.0, std::exp(denom / c.b2 * inner));
}

// Guaranteed lower bound on lambda_min(W_{T+1}) for any action sequence:
// gamma - rho_min^{-2} U^2 + (1/d) sum_t omega_t(a_t).
inline double lemma2_lower_bound(double gamma, double rho_min, double U, std::size_t d,
                                 std::span<const double> omegas) {
    if (!(gamma > 0.0) || !(rho_min > 0.0) || !(U > 0.0) || d == 0)
        throw std::invalid_argument("lemma2_lower_bound: invalid inputs");
    double s = 0.0;
    for (double w : omegas) {
        if (w < 0.0) throw std::invalid_argument("lemma2_lower_bound: omegas must be >= 0");
        s += w;
    }
    return gamma - U * U / (rho_min * rho_min) + s / static_cast<double>(d);
}

// Upper bound of the bounded-sequence sum: log T + U/c + 1.
inline double lemma3_upper_bound(std::int64_t T, double U, double c) {
    if (T < 1) throw std::invalid_argument("lemma3_upper_bound: T must be >= 1");
    if (!(U > 0.0) || !(c > 0.0))
        throw std::invalid_argument("lemma3_upper_bound: U and c must be > 0");
    return std::log(static_cast<double>(T)) + U / c + 1.0;
}

struct Theorem1Result {
    bool holds = false;
    double slack = 0.0; // sqrt(sum ratios * sum infos) - sum gaps
};

// Pathwise information-ratio bound: sum gaps <= sqrt(sum ratios * sum infos).
// The inputs must satisfy gap^2 = ratio * info elementwise (the bound is a
// Cauchy-Schwarz instance), verified to 1e-9 relative.
inline Theorem1Result theorem1_check(std::span<const double> gap_estimates,
                                     std::span<const double> ratios,
                                     std::span<const double> infos) {
    if (gap_estimates.size() != ratios.size() || ratios.size() != infos.size())
        throw std::invalid_argument("theorem1_check: misaligned sequence lengths");
    double sum_gap = 0.0, sum_ratio = 0.0, sum_info = 0.0;
    for (std::size_t i = 0; i < gap_estimates.size(); ++i) {
        const double g = gap_estimates[i];
        if (g < 0.0 || ratios[i] < 0.0 || infos[i] < 0.0)
            throw std::invalid_argument("theorem1_check: sequences must be nonnegative");
        const double prod = ratios[i] * infos[i];
        if (std::abs(g * g - prod) > 1e-9 * std::max(1.0, g * g))
            throw std::invalid_argument("theorem1_check: gap^2 != ratio * info");
        sum_gap += g;
        sum_ratio += ratios[i];
        sum_info += infos[i];
    }
    const double rhs = std::sqrt(sum_ratio * sum_info);
    Theorem1Result out;
    out.slack = rhs - sum_gap;
    out.holds = sum_gap <= rhs * (1.0 + 1e-9);
    return out;
}

} // namespace ebids
