#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ebids {

// Clamped cubic B-spline basis on [0, 1]: boundary knots of multiplicity 4,
// n_interior equally spaced interior knots. Evaluation uses the Cox-de Boor
// recursion with the 0/0 := 0 convention; the last span is treated as closed
// so the basis sums to one at x = 1.
class CubicBsplineBasis {
  public:
    explicit CubicBsplineBasis(std::size_t n_interior_knots) {
        if (n_interior_knots < 2)
            throw std::invalid_argument("CubicBsplineBasis: need at least 2 interior knots");
        for (int i = 0; i < 4; ++i) knots_.push_back(0.0);
        for (std::size_t i = 1; i <= n_interior_knots; ++i)
            knots_.push_back(static_cast<double>(i) / static_cast<double>(n_interior_knots + 1));
        for (int i = 0; i < 4; ++i) knots_.push_back(1.0);
    }

    // Number of basis functions: #knots - order.
    std::size_t size() const { return knots_.size() - 4; }

    double evaluate(std::size_t i, double x) const {
        if (i >= size()) throw std::out_of_range("CubicBsplineBasis: basis index");
        return cox_de_boor(i, 4, x);
    }

    std::vector<double> evaluate_all(double x) const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = cox_de_boor(i, 4, x);
        return out;
    }

    const std::vector<double>& knots() const { return knots_; }

  private:
    bool in_span(std::size_t i, double x) const {
        const double lo = knots_[i];
        const double hi = knots_[i + 1];
        if (lo >= hi) return false;
        if (x >= lo && x < hi) return true;
        // close the final nonempty span at the right end
        return x == knots_.back() && hi == knots_.back();
    }

    double cox_de_boor(std::size_t i, int order, double x) const {
        if (order == 1) return in_span(i, x) ? 1.0 : 0.0;
        double left = 0.0;
        const double dl = knots_[i + order - 1] - knots_[i];
        if (dl > 0.0) left = (x - knots_[i]) / dl * cox_de_boor(i, order - 1, x);
        double right = 0.0;
        const double dr = knots_[i + order] - knots_[i + 1];
        if (dr > 0.0) right = (knots_[i + order] - x) / dr * cox_de_boor(i + 1, order - 1, x);
        return left + right;
    }

    std::vector<double> knots_;
};

} // namespace ebids
