#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ebids/harness.hpp"
#include "ebids/theory.hpp"

namespace ebids {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Sherman-Morrison drift after many rank-1 updates: cached inverse vs direct
// inversion <= 1e-8 elementwise, cached log-det vs scratch <= 1e-6 (and the
// telescoped increments against the scratch value), eigenpair residual <= 1e-8.
inline CheckResult check_kernel_drift(std::uint64_t seed, int updates) {
    Rng rng = make_stream(seed, "kernel");
    const std::size_t d = 5;
    const double gamma = 1.0;
    PrecisionState state(d, gamma);
    double telescoped = 0.0;
    double worst_inv = 0.0, worst_logdet = 0.0, worst_residual = 0.0, worst_tel = 0.0;

    const auto inspect = [&] {
        const Mat direct = invert_spd(state.w_matrix());
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                worst_inv = std::max(worst_inv,
                                     std::abs(state.w_inverse()(i, j) - direct(i, j)));
        const double scratch = log_det_spd(state.w_matrix());
        worst_logdet = std::max(worst_logdet, std::abs(state.log_det() - scratch));
        worst_tel = std::max(worst_tel,
                             std::abs(telescoped - (scratch - d * std::log(gamma))));
        const Vec wv = matvec(state.w_matrix(), state.min_eigenvector());
        double res = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double r = wv[i] - state.min_eigenvalue() * state.min_eigenvector()[i];
            res += r * r;
        }
        worst_residual = std::max(worst_residual, std::sqrt(res));
    };

    for (int u = 1; u <= updates; ++u) {
        Vec phi(d);
        for (double& x : phi) x = rng.uniform(-1.0 / std::sqrt(5.0), 1.0 / std::sqrt(5.0));
        const double rho = (u % 2 == 0) ? 0.2 : 1.0;
        const double w = 1.0 / (rho * rho);
        telescoped += std::log1p(w * state.quad_norm_inv(phi));
        state.rank1_update(w, phi);
        if (u % 1000 == 0) inspect();
    }
    inspect();

    CheckResult r;
    r.name = "sherman_morrison_drift";
    r.pass = worst_inv <= 1e-8 && worst_logdet <= 1e-6 && worst_tel <= 1e-6 &&
             worst_residual <= 1e-8;
    std::ostringstream d_;
    d_ << updates << " updates: inverse drift " << worst_inv << ", log-det drift "
       << worst_logdet << ", telescoping drift " << worst_tel << ", eigen residual "
       << worst_residual;
    r.detail = d_.str();
    return r;
}

// lambda_min(W_{T+1}) >= gamma - rho_min^{-2} U^2 + (1/d) sum omega_t on
// random environments and random action sequences.
inline CheckResult check_lemma2(std::uint64_t seed, int trajectories) {
    int violations = 0;
    for (int c = 0; c < trajectories; ++c) {
        Rng rng = make_stream(seed, "lemma2", static_cast<std::uint64_t>(c));
        const std::size_t d = 2 + static_cast<std::size_t>(rng.raw() % 7); // 2..8
        const std::size_t k = d + static_cast<std::size_t>(rng.raw() % 11);
        const std::int64_t horizon = 1 + static_cast<std::int64_t>(rng.raw() % 200);
        const double gamma = rng.uniform(0.5, 2.0);
        Vec sds(k);
        for (double& s : sds) s = rng.uniform(0.2, 2.0);
        Vec theta(d, 1.0);
        const LinearBanditEnv env = gen_uniform_arms(k, d, 1.0 / std::sqrt(double(d)),
                                                     SdSpec::fixed(sds), theta, rng);
        PrecisionState state(d, gamma);
        Vec omegas;
        for (std::int64_t t = 0; t < horizon; ++t) {
            const std::size_t a = static_cast<std::size_t>(rng.raw() % k);
            omegas.push_back(omega(state.min_eigenvector(), env.phi(a), env.rho(a)));
            state.rank1_update(1.0 / (env.rho(a) * env.rho(a)), env.phi(a));
        }
        const double bound =
            lemma2_lower_bound(gamma, env.rho_min, env.feature_norm_upper, d, omegas);
        if (state.min_eigenvalue() < bound - 1e-8 * std::max(1.0, std::abs(bound)))
            ++violations;
    }
    CheckResult r;
    r.name = "lemma2_eigenvalue_bound";
    r.pass = violations == 0;
    std::ostringstream d_;
    d_ << trajectories << " trajectories, " << violations << " violations";
    r.detail = d_.str();
    return r;
}

// sum_t x_{t+1} / (c + sum_{tau<=t} x_tau) <= log T + U/c + 1 on random
// bounded sequences, plus the near-extremal (0, U, ..., U) sequence.
inline CheckResult check_lemma3(std::uint64_t seed, int sequences) {
    Rng rng = make_stream(seed, "lemma3");
    int violations = 0;
    for (int c = 0; c < sequences; ++c) {
        const std::int64_t horizon = 1 + static_cast<std::int64_t>(rng.raw() % 100);
        const double u = rng.uniform(0.1, 5.0);
        const double cc = rng.uniform(0.1, 5.0);
        Vec x(static_cast<std::size_t>(horizon) + 1);
        for (double& v : x) v = rng.uniform(0.0, u);
        double prefix = cc; // c + sum_{tau<=t} x_tau
        double sum = 0.0;
        for (std::int64_t t = 1; t <= horizon; ++t) {
            prefix += x[static_cast<std::size_t>(t - 1)];
            sum += x[static_cast<std::size_t>(t)] / prefix;
        }
        if (sum > lemma3_upper_bound(horizon, u, cc) + 1e-12) ++violations;
    }
    // near-extremal case
    bool extremal_ok = true;
    double extremal_gap = 0.0;
    {
        const std::int64_t horizon = 100;
        const double u = 1.0, cc = 0.01;
        double prefix = cc + 0.0; // x_1 = 0
        double sum = 0.0;
        for (std::int64_t t = 1; t <= horizon; ++t) {
            sum += u / prefix;
            prefix += u;
        }
        const double bound = lemma3_upper_bound(horizon, u, cc);
        extremal_gap = bound - sum;
        extremal_ok = sum <= bound && extremal_gap <= 1.0;
    }
    CheckResult r;
    r.name = "lemma3_sequence_bound";
    r.pass = violations == 0 && extremal_ok;
    std::ostringstream d_;
    d_ << sequences << " sequences, " << violations
       << " violations; extremal bound gap " << extremal_gap;
    r.detail = d_.str();
    return r;
}

namespace detail {

struct RunAccumulator {
    Vec gaps, psis, infos;
};

inline ExperimentConfig theorem1_config(int reps) {
    ExperimentConfig cfg = preset_config("fig2");
    cfg.replications = reps;
    // add the deterministic IDS variant so every kind is exercised
    PolicyDescriptor det = cfg.policies[2];
    det.kind = PolicyKind::IdsUcbDet;
    det.id = "ids_ucb_det_B100";
    cfg.policies.push_back(det);
    cfg.validate();
    return cfg;
}

} // namespace detail

// Pathwise Theorem 1 bound on every simulated run, across all policy kinds.
inline CheckResult check_theorem1(std::uint64_t seed, int reps_per_policy) {
    ExperimentConfig cfg = detail::theorem1_config(reps_per_policy);
    cfg.master_seed = seed;
    int runs = 0, failures = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& pd : cfg.policies) {
        for (std::int64_t rep = 0; rep < cfg.replications; ++rep) {
            detail::RunAccumulator acc;
            const auto obs = [&](std::int64_t, const StepDiagnostics& d, const LinearBanditEnv&,
                                 const PolicyState&) {
                acc.gaps.push_back(d.gap_chosen);
                acc.psis.push_back(d.psi_chosen);
                acc.infos.push_back(d.info_chosen);
            };
            const ReplicationResult rr = run_replication(cfg, pd, rep, obs);
            if (rr.failed) {
                ++failures;
                continue;
            }
            const Theorem1Result t1 = theorem1_check(acc.gaps, acc.psis, acc.infos);
            ++runs;
            min_slack = std::min(min_slack, t1.slack);
            if (!t1.holds) ++failures;
        }
    }
    CheckResult r;
    r.name = "theorem1_pathwise_bound";
    r.pass = failures == 0;
    std::ostringstream d_;
    d_ << runs << " runs, " << failures << " failures, min slack " << min_slack;
    r.detail = d_.str();
    return r;
}

// Lemma 1 mixture inequality at every EBIDS bound-exploration step:
// I^B(chosen) >= [gap(chosen)^2 / gap(a_IB)^2] I^B(a_IB)
//                - ((1-alpha)/alpha) I^{EB-UCB}(chosen).
inline CheckResult check_lemma1(std::uint64_t seed, int replications) {
    ExperimentConfig cfg = preset_config("fig2");
    cfg.master_seed = seed;
    cfg.replications = replications;
    const PolicyDescriptor& ebids_pd = cfg.policies.front(); // ebids_B100
    const double alpha = ebids_pd.alpha;
    long steps = 0, violations = 0;
    double worst = 0.0;
    for (std::int64_t rep = 0; rep < replications; ++rep) {
        const auto obs = [&](std::int64_t, const StepDiagnostics& d, const LinearBanditEnv&,
                             const PolicyState&) {
            if (!d.used_bam) return;
            ++steps;
            std::size_t a_ib = 0;
            for (std::size_t a = 1; a < d.info_bound.size(); ++a)
                if (d.info_bound[a] > d.info_bound[a_ib]) a_ib = a;
            const double gap_sq_chosen = d.gaps[d.chosen] * d.gaps[d.chosen];
            const double gap_sq_ib = d.gaps[a_ib] * d.gaps[a_ib];
            const double rhs = gap_sq_chosen / gap_sq_ib * d.info_bound[a_ib] -
                               (1.0 - alpha) / alpha * d.info_action[d.chosen];
            const double lhs = d.info_bound[d.chosen];
            const double slack = 1e-9 * std::max(1.0, std::abs(rhs));
            if (lhs < rhs - slack) {
                ++violations;
                worst = std::max(worst, rhs - lhs);
            }
        };
        const ReplicationResult rr = run_replication(cfg, ebids_pd, rep, obs);
        if (rr.failed) ++violations;
    }
    CheckResult r;
    r.name = "lemma1_mixture_inequality";
    r.pass = violations == 0;
    std::ostringstream d_;
    d_ << steps << " bound-exploration steps over " << replications << " replications, "
       << violations << " violations";
    if (violations > 0) d_ << ", worst margin " << worst;
    r.detail = d_.str();
    return r;
}

struct CoverageOutcome {
    int replications = 0;
    int joint_hits = 0;       // ellipsoid event held for every t
    long hat_violations = 0;  // Bhat_t < B* while the event held
    long tilde_violations = 0; // Btilde_t < B* at t > T_B while the event held
    double frequency() const {
        return replications == 0 ? 0.0
                                 : static_cast<double>(joint_hits) / replications;
    }
};

// Theorem 2 joint coverage plus norm-bound validity along EBIDS runs on the
// fixed ten-arm environment, at delta = 0.05 with B' = B*.
inline CoverageOutcome coverage_outcome(std::uint64_t seed, int replications) {
    ExperimentConfig cfg = preset_config("fig2");
    cfg.master_seed = seed;
    cfg.replications = replications;
    const PolicyDescriptor& ebids_pd = cfg.policies.front(); // ebids_B100, delta 0.05
    const std::int64_t t_bound = ebids_pd.t_bound;
    const double delta = ebids_pd.delta;

    CoverageOutcome out;
    out.replications = replications;
    for (std::int64_t rep = 0; rep < replications; ++rep) {
        bool joint = true;
        long hat_bad = 0, tilde_bad = 0;
        const auto obs = [&](std::int64_t t, const StepDiagnostics& d, const LinearBanditEnv& env,
                             const PolicyState& policy) {
            const WlsEstimator& est = policy.estimator();
            Vec diff(env.dim);
            for (std::size_t i = 0; i < env.dim; ++i)
                diff[i] = env.theta_star[i] - est.theta_hat()[i];
            const double dist_sq = quad_form(est.precision().w_matrix(), diff);
            if (dist_sq > est.beta(delta, env.b_star)) joint = false;
            if (d.b_hat < env.b_star - 1e-9) ++hat_bad;
            if (t > t_bound && d.b_tilde < env.b_star - 1e-9) ++tilde_bad;
        };
        const ReplicationResult rr = run_replication(cfg, ebids_pd, rep, obs);
        if (rr.failed) {
            joint = false;
        }
        if (joint) {
            ++out.joint_hits;
            out.hat_violations += hat_bad;
            out.tilde_violations += tilde_bad;
        }
    }
    return out;
}

inline CheckResult check_coverage(std::uint64_t seed, int replications) {
    const CoverageOutcome c = coverage_outcome(seed, replications);
    CheckResult r;
    r.name = "ellipsoid_coverage";
    r.pass = c.frequency() >= 0.95 && c.hat_violations == 0 && c.tilde_violations == 0;
    std::ostringstream d_;
    d_ << "joint coverage " << c.joint_hits << "/" << c.replications << " = " << c.frequency()
       << ", Bhat violations " << c.hat_violations << ", Btilde violations "
       << c.tilde_violations;
    r.detail = d_.str();
    return r;
}

inline std::vector<CheckResult> run_validation_suite(std::uint64_t seed, int cases) {
    if (cases <= 0) cases = 200;
    std::vector<CheckResult> out;
    out.push_back(check_kernel_drift(seed, 10000));
    out.push_back(check_lemma2(seed, std::min(1000, 5 * cases)));
    out.push_back(check_lemma3(seed, std::min(100000, 500 * cases)));
    out.push_back(check_theorem1(seed, std::max(2, cases / 50)));
    out.push_back(check_lemma1(seed, cases));
    out.push_back(check_coverage(seed, cases));
    return out;
}

} // namespace ebids
