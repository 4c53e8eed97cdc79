#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kitepath/errors.hpp"

namespace kitepath::sweep {

/// Natural cubic spline through (x_i, y_i): second derivative zero at both
/// ends, C2 in between. Stored in M-form (knot second derivatives), solved by
/// the tridiagonal (Thomas) recurrence.
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2) throw ValidationError("knots", "need at least 2 knots");
        if (y_.size() != n) throw ValidationError("values", "one value per knot required");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw ValidationError("knots", "knots must be strictly increasing");

        m_.assign(n, 0.0);
        if (n > 2) {
            // Interior equations mu_i M_{i-1} + 2 M_i + lambda_i M_{i+1} = d_i
            // with natural ends M_0 = M_{n-1} = 0 already in place.
            const std::size_t interior = n - 2;
            std::vector<double> diag(interior, 2.0), upper(interior, 0.0), rhs(interior, 0.0);
            std::vector<double> mu(interior, 0.0);
            for (std::size_t k = 0; k < interior; ++k) {
                const std::size_t i = k + 1;
                const double h_prev = x_[i] - x_[i - 1];
                const double h_next = x_[i + 1] - x_[i];
                mu[k] = h_prev / (h_prev + h_next);
                upper[k] = h_next / (h_prev + h_next);
                rhs[k] = 6.0 / (h_prev + h_next) *
                         ((y_[i + 1] - y_[i]) / h_next - (y_[i] - y_[i - 1]) / h_prev);
            }
            for (std::size_t k = 1; k < interior; ++k) {
                const double w = mu[k] / diag[k - 1];
                diag[k] -= w * upper[k - 1];
                rhs[k] -= w * rhs[k - 1];
            }
            m_[interior] = rhs[interior - 1] / diag[interior - 1];
            for (std::size_t k = interior - 1; k-- > 0;)
                m_[k + 1] = (rhs[k] - upper[k] * m_[k + 2]) / diag[k];
        }
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    const std::vector<double>& second_derivs() const { return m_; }

    /// Evaluates the interpolant. Arguments outside the knot range (beyond a
    /// rounding allowance of 1e-9 of the span) are a caller error; splines
    /// extrapolate badly, so this refuses rather than guessing.
    double operator()(double t) const {
        const double span = x_.back() - x_.front();
        const double tol = 1e-9 * span;
        if (t < x_.front() - tol || t > x_.back() + tol)
            throw OutOfDomain("spline argument " + std::to_string(t) + " outside [" +
                              std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
        t = std::clamp(t, x_.front(), x_.back());

        const std::size_t i = interval_of(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               h * h / 6.0 * ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]);
    }

  private:
    std::size_t interval_of(double t) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        const std::size_t idx = static_cast<std::size_t>(it - x_.begin());
        if (idx == 0) return 0;
        return std::min(idx - 1, x_.size() - 2);
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // knot second derivatives, zero at both ends
};

}  // namespace kitepath::sweep
