#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

#include "ebids/linalg.hpp"

namespace ebids {

// zeta_t(delta) = min(delta, 1/t^2): the confidence schedule for the
// empirical norm bounds.
inline double zeta(std::int64_t t, double delta) {
    if (t < 1) throw std::invalid_argument("zeta: t must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("zeta: delta must be in (0,1)");
    const double td = static_cast<double>(t);
    return std::min(delta, 1.0 / (td * td));
}

// Online weighted ridge regression
//   theta_hat_t = W_t^{-1} b_t,  W_t = gamma I + sum rho^{-2} phi phi^T,
//   b_t = sum rho^{-2} phi Y,
// with the self-normalized confidence radius
//   beta_{t,delta'}(B') = [ sqrt(2 log(1/delta') + log det W_t - log det W_1)
//                           + sqrt(gamma) B' ]^2
// and the empirical norm bounds
//   Bhat_t   = min{ B, ||theta_hat|| + beta(zeta_t(delta), B)^{1/2} lambda_min^{-1/2} }
//   Btilde_t = min{ B, min_{tau<=t} ||theta_hat_tau||
//                         + beta_tau(zeta_tau(delta), Bhat_tau)^{1/2} lambda_min(W_tau)^{-1/2} }.
// Steps are 1-based: step()==1 means no data yet. Both bounds are refreshed
// on every observation; Btilde is maintained as a running minimum.
class WlsEstimator {
  public:
    WlsEstimator(std::size_t dim, double gamma, double b_conservative, double delta)
        : precision_(dim, gamma),
          moment_vector_(dim, 0.0),
          theta_hat_(dim, 0.0),
          gamma_(gamma),
          b_conservative_(b_conservative),
          delta_(delta) {
        if (!(b_conservative > 0.0))
            throw std::invalid_argument("WlsEstimator: conservative bound must be > 0");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("WlsEstimator: delta must be in (0,1)");
        log_det_w1_ = precision_.log_det();
        tilde_running_min_ = std::numeric_limits<double>::infinity();
        refresh_bounds();
    }

    void observe(std::span<const double> phi, double rho, double reward) {
        if (!(rho > 0.0)) throw std::invalid_argument("observe: rho must be > 0");
        if (phi.size() != dim()) throw std::invalid_argument("observe: dimension mismatch");
        const double w = 1.0 / (rho * rho);
        precision_.rank1_update(w, phi);
        for (std::size_t i = 0; i < dim(); ++i) moment_vector_[i] += w * phi[i] * reward;
        theta_hat_ = matvec(precision_.w_inverse(), moment_vector_);
        ++step_;
        refresh_bounds();
    }

    // beta_{t, confidence}(bound), using the cached log-determinant.
    double beta(double confidence, double bound) const {
        if (!(confidence > 0.0 && confidence < 1.0))
            throw std::invalid_argument("beta: confidence must be in (0,1)");
        if (bound < 0.0) throw std::invalid_argument("beta: bound must be >= 0");
        const double log_det_ratio = precision_.log_det() - log_det_w1_;
        const double root = std::sqrt(2.0 * std::log(1.0 / confidence) + log_det_ratio);
        const double s = root + std::sqrt(gamma_) * bound;
        return s * s;
    }

    double empirical_bound_hat() const { return b_hat_; }
    double empirical_bound_tilde() const { return b_tilde_; }

    const Vec& theta_hat() const { return theta_hat_; }
    const Vec& moment_vector() const { return moment_vector_; }
    const PrecisionState& precision() const { return precision_; }
    std::size_t dim() const { return precision_.dim(); }
    std::int64_t step() const { return step_; }
    double gamma() const { return gamma_; }
    double conservative_bound() const { return b_conservative_; }
    double delta() const { return delta_; }

    double predicted_mean(std::span<const double> phi) const { return dot(phi, theta_hat_); }

  private:
    void refresh_bounds() {
        const double lam = precision_.min_eigenvalue();
        const double inv_sqrt_lam = 1.0 / std::sqrt(lam);
        const double zt = zeta(step_, delta_);
        const double theta_norm = norm2(theta_hat_);
        const double raw_hat = theta_norm + std::sqrt(beta(zt, b_conservative_)) * inv_sqrt_lam;
        b_hat_ = std::min(b_conservative_, raw_hat);
        const double tilde_term = theta_norm + std::sqrt(beta(zt, b_hat_)) * inv_sqrt_lam;
        tilde_running_min_ = std::min(tilde_running_min_, tilde_term);
        b_tilde_ = std::min(b_conservative_, tilde_running_min_);
    }

    PrecisionState precision_;
    Vec moment_vector_;
    Vec theta_hat_;
    double gamma_;
    double b_conservative_;
    double delta_;
    std::int64_t step_ = 1;
    double log_det_w1_ = 0.0;
    double b_hat_ = 0.0;
    double b_tilde_ = 0.0;
    double tilde_running_min_ = 0.0;
};

} // namespace ebids
