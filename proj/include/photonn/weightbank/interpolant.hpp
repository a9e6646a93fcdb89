#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"

namespace photonn {

/// Shape-preserving cubic Hermite interpolant of non-decreasing data.
///
/// Node slopes start from the not-a-knot cubic spline and are then limited
/// (Hyman filter) so the curve never overshoots monotone data. This keeps
/// spline accuracy on smooth data while guaranteeing an invertible curve.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size()) throw InvalidArgument("interpolant needs equal-length data");
        if (x_.size() < 2) throw CalibrationError("interpolant needs at least 2 distinct points");
        for (std::size_t i = 1; i < x_.size(); ++i) {
            if (!(x_[i] > x_[i - 1])) throw InvalidArgument("interpolant abscissae must increase");
            if (y_[i] < y_[i - 1]) throw CalibrationError("interpolant data must be non-decreasing");
        }
        d_ = limited_slopes();
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    double y_min() const { return y_.front(); }
    double y_max() const { return y_.back(); }
    const std::vector<double>& knots_x() const { return x_; }
    const std::vector<double>& knots_y() const { return y_; }

    /// Value at x, clamped to the end values outside the knot span.
    double operator()(double x) const {
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const auto i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
    }

    /// Smallest-bracket preimage of y by bisection; y is clamped to the range.
    double inverse(double y) const {
        if (y <= y_.front()) return x_.front();
        if (y >= y_.back()) return x_.back();
        double lo = x_.front();
        double hi = x_.back();
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (std::abs(hi) + 1e-300); ++it) {
            const double mid = 0.5 * (lo + hi);
            ((*this)(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    std::vector<double> spline_slopes(const std::vector<double>& s) const {
        const std::size_t n = x_.size();
        std::vector<double> d(n);
        if (n == 2) {
            d[0] = d[1] = s[0];
            return d;
        }
        if (n == 3) {
            // The parabola through all three points.
            const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
            const double c = (s[1] - s[0]) / (h0 + h1);
            d[0] = s[0] - c * h0;
            d[1] = s[0] + c * h0;
            d[2] = s[1] + c * h1;
            return d;
        }
        const auto m = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd b(m);
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
        // Second-derivative continuity at interior knots.
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            A(r, r - 1) = h[i];
            A(r, r) = 2.0 * (h[i - 1] + h[i]);
            A(r, r + 1) = h[i - 1];
            b(r) = 3.0 * (h[i] * s[i - 1] + h[i - 1] * s[i]);
        }
        // Not-a-knot: third-derivative continuity at the second and
        // second-to-last knots.
        auto third_derivative_row = [&](Eigen::Index row, std::size_t k) {
            const double a = 1.0 / (h[k - 1] * h[k - 1]);
            const double c = 1.0 / (h[k] * h[k]);
            const auto j = static_cast<Eigen::Index>(k);
            A(row, j - 1) = a;
            A(row, j) = a - c;
            A(row, j + 1) = -c;
            b(row) = 2.0 * (a * s[k - 1] - c * s[k]);
        };
        third_derivative_row(0, 1);
        third_derivative_row(m - 1, n - 2);
        const Eigen::VectorXd sol = A.partialPivLu().solve(b);
        for (std::size_t i = 0; i < n; ++i) d[i] = sol(static_cast<Eigen::Index>(i));
        return d;
    }

    std::vector<double> limited_slopes() const {
        const std::size_t n = x_.size();
        std::vector<double> s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) s[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        std::vector<double> d = spline_slopes(s);
        for (std::size_t i = 0; i < n; ++i) {
            const bool interior = i > 0 && i + 1 < n;
            const double sl = i > 0 ? s[i - 1] : s[0];
            const double sr = i + 1 < n ? s[i] : s[n - 2];
            if (interior && sl * sr <= 0.0) {
                d[i] = 0.0;
                continue;
            }
            if (d[i] < 0.0) d[i] = 0.0;  // data are non-decreasing
            const double bound = interior ? 3.0 * std::min(sl, sr) : 3.0 * (i > 0 ? sl : sr);
            d[i] = std::min(d[i], bound);
        }
        return d;
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;
};

}  // namespace photonn
