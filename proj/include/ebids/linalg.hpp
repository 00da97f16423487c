#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ebids {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this library is small (d <= a few
// hundred), so no attempt is made at blocking or sparsity.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Mat&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

inline Vec matvec(const Mat& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: size mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

// <v, A v>
inline double quad_form(const Mat& a, std::span<const double> v) {
    return dot(v, matvec(a, v));
}

inline double max_abs_asymmetry(const Mat& a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    return worst;
}

// Cholesky factor L with A = L L^T. Throws if a pivot is not positive.
inline Mat cholesky_factor(const Mat& a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("cholesky: matrix not square");
    Mat l(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) throw std::runtime_error("cholesky: matrix not positive definite");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline double log_det_spd(const Mat& a) {
    const Mat l = cholesky_factor(a);
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

// Inverse of an SPD matrix via its Cholesky factor.
inline Mat invert_spd(const Mat& a) {
    const std::size_t n = a.rows();
    const Mat l = cholesky_factor(a);
    // Solve L y = e_k, then L^T x = y, column by column.
    Mat inv(n, n, 0.0);
    Vec y(n), x(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = (i == k) ? 1.0 : 0.0;
            for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y[j];
            y[i] = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * x[j];
            x[ii] = s / l(ii, ii);
        }
        for (std::size_t i = 0; i < n; ++i) inv(i, k) = x[i];
    }
    // Symmetrize to keep downstream quadratic forms exactly symmetric.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = m;
            inv(j, i) = m;
        }
    return inv;
}

namespace detail {

inline double off_diagonal_frobenius(const Mat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

inline double frobenius(const Mat& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

} // namespace detail

// Cyclic Jacobi eigendecomposition for symmetric matrices. Converges when
// the off-diagonal Frobenius mass drops below 1e-12 relative to the matrix
// scale (the absolute floor is unreachable once ||A|| ~ 1e4), capped at 50
// sweeps. eigenvectors come out as columns of `vecs`.
inline void jacobi_eigen(const Mat& a, Vec& vals, Mat& vecs) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("jacobi_eigen: matrix not square");
    Mat b = a;
    vecs = Mat::identity(n);
    const double scale = std::max(1.0, detail::frobenius(a));
    const double tol = 1e-12 * scale;
    for (int sweep = 0; sweep < 50 && detail::off_diagonal_frobenius(b) > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = b(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (b(q, q) - b(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double bkp = b(k, p);
                    const double bkq = b(k, q);
                    b(k, p) = c * bkp - s * bkq;
                    b(k, q) = s * bkp + c * bkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double bpk = b(p, k);
                    const double bqk = b(q, k);
                    b(p, k) = c * bpk - s * bqk;
                    b(q, k) = s * bpk + c * bqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vecs(k, p);
                    const double vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - s * vkq;
                    vecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    vals.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vals[i] = b(i, i);
}

struct EigenPair {
    double value = 0.0;
    Vec vector;
};

// First nonzero component positive; ties among equal eigenvalues resolve to
// the lowest column index via strict comparison.
inline void canonicalize_sign(Vec& v) {
    for (double x : v) {
        if (x != 0.0) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

inline EigenPair min_eigenpair(const Mat& symmetric) {
    if (symmetric.rows() != symmetric.cols())
        throw std::invalid_argument("min_eigenpair: matrix not square");
    if (max_abs_asymmetry(symmetric) > 1e-10)
        throw std::invalid_argument("min_eigenpair: matrix not symmetric");
    Vec vals;
    Mat vecs;
    jacobi_eigen(symmetric, vals, vecs);
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] < vals[best]) best = i;
    EigenPair out;
    out.value = vals[best];
    out.vector.resize(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) out.vector[i] = vecs(i, best);
    const double n = norm2(out.vector);
    for (double& x : out.vector) x /= n;
    canonicalize_sign(out.vector);
    return out;
}

// Weighted information matrix W with synchronized inverse, log-determinant
// and minimum eigenpair. W starts at gamma * I and accumulates rank-1 terms
// weight * phi phi^T. The inverse is maintained by Sherman-Morrison and
// rebuilt from scratch every 256 updates to bound numerical drift; the
// eigenpair is recomputed from the exact W after every update.
class PrecisionState {
  public:
    static constexpr int kRefreshInterval = 256;

    PrecisionState(std::size_t dim, double gamma) {
        if (dim == 0) throw std::invalid_argument("PrecisionState: dim must be >= 1");
        if (!(gamma > 0.0)) throw std::invalid_argument("PrecisionState: gamma must be > 0");
        w_matrix_ = Mat(dim, dim, 0.0);
        w_inverse_ = Mat(dim, dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            w_matrix_(i, i) = gamma;
            w_inverse_(i, i) = 1.0 / gamma;
        }
        log_det_ = static_cast<double>(dim) * std::log(gamma);
        min_eigenvalue_ = gamma;
        min_eigenvector_.assign(dim, 0.0);
        min_eigenvector_[0] = 1.0;
    }

    std::size_t dim() const { return w_matrix_.rows(); }
    const Mat& w_matrix() const { return w_matrix_; }
    const Mat& w_inverse() const { return w_inverse_; }
    double log_det() const { return log_det_; }
    double min_eigenvalue() const { return min_eigenvalue_; }
    const Vec& min_eigenvector() const { return min_eigenvector_; }
    int updates_since_refresh() const { return updates_since_refresh_; }

    // W <- W + weight * phi phi^T.
    void rank1_update(double weight, std::span<const double> phi) {
        if (!(weight > 0.0)) throw std::invalid_argument("rank1_update: weight must be > 0");
        if (phi.size() != dim()) throw std::invalid_argument("rank1_update: dimension mismatch");
        double phi_sq = 0.0;
        for (double x : phi) phi_sq += x * x;
        if (phi_sq == 0.0) return; // no-op update

        const std::size_t n = dim();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                w_matrix_(i, j) += weight * phi[i] * phi[j];

        // Sherman-Morrison:
        // (W + w phi phi^T)^{-1} = W^{-1} - w (W^{-1}phi)(W^{-1}phi)^T / (1 + w phi^T W^{-1} phi)
        const Vec u = matvec(w_inverse_, phi);
        const double q = dot(phi, u); // ||phi||^2_{W^{-1}}
        const double denom = 1.0 + weight * q;
        const double f = weight / denom;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                w_inverse_(i, j) -= f * u[i] * u[j];
        log_det_ += std::log1p(weight * q);

        if (++updates_since_refresh_ >= kRefreshInterval) refresh();
        recompute_eigenpair();
    }

    // <v, W^{-1} v>, clamped at zero.
    double quad_norm_inv(std::span<const double> v) const {
        if (v.size() != dim()) throw std::invalid_argument("quad_norm_inv: dimension mismatch");
        return std::max(0.0, quad_form(w_inverse_, v));
    }

    void refresh() {
        w_inverse_ = invert_spd(w_matrix_);
        log_det_ = log_det_spd(w_matrix_);
        updates_since_refresh_ = 0;
    }

  private:
    void recompute_eigenpair() {
        const EigenPair p = min_eigenpair(w_matrix_);
        min_eigenvalue_ = p.value;
        min_eigenvector_ = p.vector;
    }

    Mat w_matrix_;
    Mat w_inverse_;
    double log_det_ = 0.0;
    double min_eigenvalue_ = 0.0;
    Vec min_eigenvector_;
    int updates_since_refresh_ = 0;
};

inline PrecisionState init_precision(std::size_t dim, double gamma) {
    return PrecisionState(dim, gamma);
}

} // namespace ebids
