#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ebids/env.hpp"
#include "ebids/estimator.hpp"
#include "ebids/rng.hpp"

namespace ebids {

// Information gains below this floor are clamped before ratio division.
// Gap estimates are strictly positive under the UCB-based constructions, so
// the only degeneracy in the information ratio is info -> 0.
constexpr double kInfoFloor = 1e-12;

// What a policy sees of the environment: features and noise scales only.
struct ActionSetView {
    const Mat* features = nullptr;
    const Vec* noise_scale = nullptr;

    std::size_t n_arms() const { return features->rows(); }
    std::span<const double> phi(std::size_t a) const { return features->row(a); }
    double rho(std::size_t a) const { return (*noise_scale)[a]; }
};

inline ActionSetView action_view(const LinearBanditEnv& env) {
    return {&env.features, &env.noise_scale};
}

// argmax_a <phi(a), theta_hat> + beta^{1/2} ||phi(a)||_{W^{-1}},
// lowest-index tie-breaking.
inline std::size_t ucb_action(const WlsEstimator& est, const ActionSetView& view,
                              double confidence, double bound) {
    const double sqrt_beta = std::sqrt(est.beta(confidence, bound));
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < view.n_arms(); ++a) {
        const auto phi = view.phi(a);
        const double score = est.predicted_mean(phi) +
                             sqrt_beta * std::sqrt(est.precision().quad_norm_inv(phi));
        if (score > best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

// <phi(a_ucb) - phi(a), theta_hat> + beta^{1/2} (||phi(a_ucb)||_{W^{-1}} + ||phi(a)||_{W^{-1}})
inline double gap_estimate(const WlsEstimator& est, const ActionSetView& view, std::size_t a,
                           std::size_t a_ucb, double confidence, double bound) {
    const double sqrt_beta = std::sqrt(est.beta(confidence, bound));
    const auto phi_a = view.phi(a);
    const auto phi_ref = view.phi(a_ucb);
    return est.predicted_mean(phi_ref) - est.predicted_mean(phi_a) +
           sqrt_beta * (std::sqrt(est.precision().quad_norm_inv(phi_ref)) +
                        std::sqrt(est.precision().quad_norm_inv(phi_a)));
}

// (1/2) log( ||phi(a_ref)||^2_{W^{-1}} / ||phi(a_ref)||^2_{(W + rho^{-2} phi phi^T)^{-1}} ),
// with the rank-1-updated norm obtained by Sherman-Morrison rather than by
// forming the updated matrix.
inline double info_gain_directional(const WlsEstimator& est, const ActionSetView& view,
                                    std::size_t a, std::size_t a_ref) {
    const PrecisionState& p = est.precision();
    const auto phi_a = view.phi(a);
    const auto phi_ref = view.phi(a_ref);
    const double s_ref = p.quad_norm_inv(phi_ref);
    if (s_ref <= 0.0) return 0.0;
    const Vec u = matvec(p.w_inverse(), phi_a);
    const double cross = dot(phi_ref, u);
    const double q_a = std::max(0.0, dot(phi_a, u));
    const double w = 1.0 / (view.rho(a) * view.rho(a));
    const double updated = s_ref - w * cross * cross / (1.0 + w * q_a);
    if (updated <= 0.0) return 0.0; // cancellation guard; mathematically updated > 0
    return std::max(0.0, 0.5 * (std::log(s_ref) - std::log(updated)));
}

// I^B(a) = (1/2) log(1 + omega_t(a) / lambda_min(W)),
// omega_t(a) = rho(a)^{-2} <v_min, phi(a)>^2.
inline double info_gain_bound(const WlsEstimator& est, const ActionSetView& view, std::size_t a) {
    const PrecisionState& p = est.precision();
    const double proj = dot(p.min_eigenvector(), view.phi(a));
    const double w = 1.0 / (view.rho(a) * view.rho(a));
    return 0.5 * std::log1p(w * proj * proj / p.min_eigenvalue());
}

// Bound-action mixture: alpha I^B + (1 - alpha) I^{EB-UCB}.
inline double info_gain_bam(const WlsEstimator& est, const ActionSetView& view, std::size_t a,
                            std::size_t a_ref, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("info_gain_bam: alpha must be in (0,1)");
    return alpha * info_gain_bound(est, view, a) +
           (1.0 - alpha) * info_gain_directional(est, view, a, a_ref);
}

inline double ids_ratio(double gap, double info) {
    return gap * gap / std::max(info, kInfoFloor);
}

// argmin_a gaps(a)^2 / infos(a), lowest-index tie-breaking.
inline std::size_t ids_select_deterministic(std::span<const double> gaps,
                                            std::span<const double> infos) {
    if (gaps.empty()) throw std::invalid_argument("ids_select_deterministic: empty action set");
    if (gaps.size() != infos.size())
        throw std::invalid_argument("ids_select_deterministic: size mismatch");
    std::size_t best = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < gaps.size(); ++a) {
        const double r = ids_ratio(gaps[a], infos[a]);
        if (r < best_ratio) {
            best_ratio = r;
            best = a;
        }
    }
    return best;
}

struct IdsAtom {
    std::size_t arm = 0;
    double prob = 0.0;
};

struct RandomizedIdsResult {
    std::size_t arm = 0;
    std::vector<IdsAtom> support; // at most two atoms
    double ratio = 0.0;           // information ratio achieved by the mixture
};

// Minimizes [Delta(mu)]^2 / I(mu) over distributions mu. The optimum has at
// most two support points, so all action pairs are scanned and the mixing
// weight is resolved by ternary search (the ratio is unimodal in p).
inline RandomizedIdsResult ids_select_randomized(std::span<const double> gaps,
                                                 std::span<const double> infos, Rng& rng) {
    if (gaps.empty()) throw std::invalid_argument("ids_select_randomized: empty action set");
    if (gaps.size() != infos.size())
        throw std::invalid_argument("ids_select_randomized: size mismatch");
    const std::size_t k = gaps.size();

    RandomizedIdsResult out;
    if (k == 1) {
        out.arm = 0;
        out.support = {{0, 1.0}};
        out.ratio = ids_ratio(gaps[0], infos[0]);
        return out;
    }

    double best_ratio = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0, best_j = 0;
    double best_p = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const auto mix = [&](double p) {
                const double g = p * gaps[i] + (1.0 - p) * gaps[j];
                const double info = p * infos[i] + (1.0 - p) * infos[j];
                return g * g / std::max(info, kInfoFloor);
            };
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (mix(m1) < mix(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            double p = 0.5 * (lo + hi);
            double r = mix(p);
            if (mix(0.0) < r) { p = 0.0; r = mix(0.0); }
            if (mix(1.0) < r) { p = 1.0; r = mix(1.0); }
            if (r < best_ratio) {
                best_ratio = r;
                best_i = i;
                best_j = j;
                best_p = p;
            }
        }
    }

    if (best_p > 1.0 - 1e-9) best_p = 1.0;
    if (best_p < 1e-9) best_p = 0.0;
    out.ratio = best_ratio;
    if (best_p == 1.0) {
        out.support = {{best_i, 1.0}};
        out.arm = best_i;
    } else if (best_p == 0.0) {
        out.support = {{best_j, 1.0}};
        out.arm = best_j;
    } else {
        out.support = {{best_i, best_p}, {best_j, 1.0 - best_p}};
        out.arm = rng.uniform01() < best_p ? best_i : best_j;
    }
    return out;
}

enum class PolicyKind { Ucb, EbUcb, IdsUcbDet, IdsUcbRand, Ebids };

inline std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::Ucb: return "ucb";
        case PolicyKind::EbUcb: return "eb_ucb";
        case PolicyKind::IdsUcbDet: return "ids_ucb_det";
        case PolicyKind::IdsUcbRand: return "ids_ucb_rand";
        case PolicyKind::Ebids: return "ebids";
    }
    throw std::logic_error("unknown PolicyKind");
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "ucb") return PolicyKind::Ucb;
    if (s == "eb_ucb") return PolicyKind::EbUcb;
    if (s == "ids_ucb_det") return PolicyKind::IdsUcbDet;
    if (s == "ids_ucb_rand") return PolicyKind::IdsUcbRand;
    if (s == "ebids") return PolicyKind::Ebids;
    throw std::invalid_argument("unknown policy kind: " + s);
}

// Confidence level fed to the UCB/IDS-UCB action at step t. Values are kept
// strictly inside (0,1); the 1/t^2 schedule is capped just below 1 at t = 1.
struct ConfidenceSchedule {
    enum class Kind { Fixed, InvTSquared, Zeta };
    Kind kind = Kind::InvTSquared;
    double delta = 0.05;

    double at(std::int64_t t) const {
        switch (kind) {
            case Kind::Fixed: return delta;
            case Kind::InvTSquared: {
                const double td = static_cast<double>(t);
                return std::min(1.0 / (td * td), 1.0 - 1e-12);
            }
            case Kind::Zeta: return zeta(t, delta);
        }
        throw std::logic_error("unknown schedule kind");
    }
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Ucb;
    double bound = 100.0;      // norm bound B handed to the estimator
    double delta = 0.05;       // error tolerance for the zeta-based bounds
    ConfidenceSchedule schedule{};
    double alpha = 0.5;        // EBIDS: BAM mixture weight
    std::int64_t t_bound = 50; // EBIDS: bound exploration length T_B
    double gamma = 1.0;        // ridge penalty
    std::optional<double> oracle_bound; // set when running with B = B*
};

struct StepDiagnostics {
    std::size_t chosen = 0;
    std::size_t ref_arm = 0; // the UCB / EB-UCB action of the step
    Vec gaps;                // estimated gap per arm
    Vec info_action;         // I^UCB or I^EB-UCB per arm
    Vec info_bound;          // I^B per arm (EBIDS bound exploration only)
    Vec info_mixture;        // BAM per arm (EBIDS bound exploration only)
    double b_hat = 0.0;
    double b_tilde = 0.0;
    double beta_used = 0.0;
    double gap_chosen = 0.0;
    double info_chosen = 0.0; // selection criterion at the chosen arm, floored
    double psi_chosen = 0.0;  // gap_chosen^2 / info_chosen
    bool used_bam = false;
    std::vector<IdsAtom> support; // randomized IDS only
    double randomized_ratio = std::numeric_limits<double>::quiet_NaN();
    double deterministic_ratio = std::numeric_limits<double>::quiet_NaN();
};

// One bandit policy bound to one replication. step() proposes an action for
// the current round; observe() feeds the reward back.
class PolicyState {
  public:
    PolicyState(const PolicyConfig& config, std::size_t dim)
        : config_(config), estimator_(dim, config.gamma, config.bound, config.delta) {
        if (config_.kind == PolicyKind::Ebids) {
            if (!(config_.alpha > 0.0 && config_.alpha < 1.0))
                throw std::invalid_argument("PolicyState: EBIDS alpha must be in (0,1)");
            if (config_.t_bound < 0)
                throw std::invalid_argument("PolicyState: EBIDS t_bound must be >= 0");
        }
        if (!(config_.schedule.delta > 0.0 && config_.schedule.delta < 1.0))
            throw std::invalid_argument("PolicyState: schedule delta must be in (0,1)");
    }

    std::size_t step(const ActionSetView& view, Rng& rng, StepDiagnostics* diag_out = nullptr) {
        StepDiagnostics local;
        StepDiagnostics& d = diag_out ? *diag_out : local;
        d = StepDiagnostics{};
        const std::int64_t t = estimator_.step();
        const std::size_t k = view.n_arms();

        double confidence = 0.0;
        double bound = 0.0;
        switch (config_.kind) {
            case PolicyKind::Ucb:
                confidence = config_.schedule.at(t);
                bound = config_.bound;
                fill_action_criteria(d, view, confidence, bound);
                d.chosen = d.ref_arm;
                break;
            case PolicyKind::EbUcb:
                confidence = zeta(t, config_.delta);
                bound = estimator_.empirical_bound_hat();
                fill_action_criteria(d, view, confidence, bound);
                d.chosen = d.ref_arm;
                break;
            case PolicyKind::IdsUcbDet:
            case PolicyKind::IdsUcbRand: {
                confidence = config_.schedule.at(t);
                bound = config_.bound;
                fill_action_criteria(d, view, confidence, bound);
                const std::size_t det = ids_select_deterministic(d.gaps, d.info_action);
                d.deterministic_ratio = ids_ratio(d.gaps[det], d.info_action[det]);
                if (config_.kind == PolicyKind::IdsUcbDet) {
                    d.chosen = det;
                } else {
                    const RandomizedIdsResult r =
                        ids_select_randomized(d.gaps, d.info_action, rng);
                    d.chosen = r.arm;
                    d.support = r.support;
                    d.randomized_ratio = r.ratio;
                }
                break;
            }
            case PolicyKind::Ebids: {
                confidence = zeta(t, config_.delta);
                if (t <= config_.t_bound) {
                    // bound exploration phase: BAM criterion with Bhat_t
                    bound = estimator_.empirical_bound_hat();
                    fill_action_criteria(d, view, confidence, bound);
                    d.info_bound.resize(k);
                    d.info_mixture.resize(k);
                    for (std::size_t a = 0; a < k; ++a) {
                        d.info_bound[a] = info_gain_bound(estimator_, view, a);
                        d.info_mixture[a] = config_.alpha * d.info_bound[a] +
                                            (1.0 - config_.alpha) * d.info_action[a];
                    }
                    d.chosen = ids_select_deterministic(d.gaps, d.info_mixture);
                    d.used_bam = true;
                } else {
                    // bound exploitation phase: Btilde_t, EB-UCB criterion only
                    bound = estimator_.empirical_bound_tilde();
                    fill_action_criteria(d, view, confidence, bound);
                    d.chosen = ids_select_deterministic(d.gaps, d.info_action);
                }
                break;
            }
        }

        d.b_hat = estimator_.empirical_bound_hat();
        d.b_tilde = estimator_.empirical_bound_tilde();
        d.beta_used = estimator_.beta(confidence, bound);
        d.gap_chosen = d.gaps[d.chosen];
        const Vec& criterion = d.used_bam ? d.info_mixture : d.info_action;
        d.info_chosen = std::max(criterion[d.chosen], kInfoFloor);
        d.psi_chosen = d.gap_chosen * d.gap_chosen / d.info_chosen;
        return d.chosen;
    }

    void observe(std::span<const double> phi, double rho, double reward) {
        estimator_.observe(phi, rho, reward);
    }

    const WlsEstimator& estimator() const { return estimator_; }
    const PolicyConfig& config() const { return config_; }

  private:
    void fill_action_criteria(StepDiagnostics& d, const ActionSetView& view, double confidence,
                              double bound) {
        const std::size_t k = view.n_arms();
        d.ref_arm = ucb_action(estimator_, view, confidence, bound);
        d.gaps.resize(k);
        d.info_action.resize(k);
        for (std::size_t a = 0; a < k; ++a) {
            d.gaps[a] = gap_estimate(estimator_, view, a, d.ref_arm, confidence, bound);
            d.info_action[a] = info_gain_directional(estimator_, view, a, d.ref_arm);
        }
    }

    PolicyConfig config_;
    WlsEstimator estimator_;
};

} // namespace ebids
