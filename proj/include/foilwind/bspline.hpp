#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "foilwind/errors.hpp"

namespace foilwind {

// Quadratic B-spline basis on a clamped, uniform knot vector over [lower, upper].
//
// Knots t_0 .. t_{n+2}: the end values are repeated three times and the n - 3
// interior knots are uniformly spaced, giving n - 2 non-empty spans. Basis
// function i is supported on [t_i, t_{i+3}].
//
// Evaluation at a knot uses the span to the right of it, except at `upper`
// where the last span (left-sided limit) is used.
template <typename Scalar>
class BSplineBasis {
public:
    static constexpr int degree = 2;

    BSplineBasis() = default;

    BSplineBasis(int n, Scalar lower, Scalar upper) : n_(n), lower_(lower), upper_(upper) {
        if (n < degree + 1) {
            throw DomainError("quadratic B-spline basis needs at least 3 functions, got " +
                              std::to_string(n));
        }
        if (!(lower < upper)) {
            throw DomainError("B-spline interval must satisfy lower < upper");
        }
        const int spans = n - degree;
        knots_.reserve(static_cast<std::size_t>(n + degree + 1));
        knots_.push_back(lower);
        knots_.push_back(lower);
        for (int k = 0; k < spans; ++k) {
            knots_.push_back((lower * Scalar(spans - k) + upper * Scalar(k)) / Scalar(spans));
        }
        knots_.push_back(upper);
        knots_.push_back(upper);
        knots_.push_back(upper);
    }

    int size() const { return n_; }
    Scalar lower() const { return lower_; }
    Scalar upper() const { return upper_; }
    const std::vector<Scalar>& knots() const { return knots_; }

    int num_spans() const { return n_ - degree; }

    // Knot index s with t_s <= alpha < t_{s+1}; the last non-empty span for alpha == upper.
    int find_span(Scalar alpha) const {
        check_domain(alpha);
        if (alpha >= upper_) {
            return n_ - 1;
        }
        auto it = std::upper_bound(knots_.begin(), knots_.end(), alpha);
        return static_cast<int>(it - knots_.begin()) - 1;
    }

    // Bounds of non-empty span number `k` (0-based over the n - 2 spans).
    std::array<Scalar, 2> span_bounds(int k) const {
        return {knots_[static_cast<std::size_t>(k + degree)],
                knots_[static_cast<std::size_t>(k + degree + 1)]};
    }

    Scalar eval(int i, Scalar alpha) const {
        check_index(i);
        return eval_on_span(i, find_span(alpha), alpha);
    }

    Scalar eval_deriv(int i, Scalar alpha) const {
        check_index(i);
        return eval_deriv_on_span(i, find_span(alpha), alpha);
    }

    // Cox-de Boor recursion with the degree-0 indicator fixed to knot span `span`.
    Scalar eval_on_span(int i, int span, Scalar alpha) const {
        return basis(i, degree, span, alpha);
    }

    Scalar eval_deriv_on_span(int i, int span, Scalar alpha) const {
        const Scalar d0 = knot(i + 2) - knot(i);
        const Scalar d1 = knot(i + 3) - knot(i + 1);
        Scalar result(0);
        if (d0 > Scalar(0)) {
            result += Scalar(degree) / d0 * basis(i, 1, span, alpha);
        }
        if (d1 > Scalar(0)) {
            result -= Scalar(degree) / d1 * basis(i + 1, 1, span, alpha);
        }
        return result;
    }

    // Values of all n functions at alpha.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eval_all(Scalar alpha) const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values =
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n_);
        const int span = find_span(alpha);
        for (int i = std::max(0, span - degree); i <= std::min(n_ - 1, span); ++i) {
            values(i) = eval_on_span(i, span, alpha);
        }
        return values;
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eval_deriv_all(Scalar alpha) const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values =
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n_);
        const int span = find_span(alpha);
        for (int i = std::max(0, span - degree); i <= std::min(n_ - 1, span); ++i) {
            values(i) = eval_deriv_on_span(i, span, alpha);
        }
        return values;
    }

    // Greville abscissae (t_{i+1} + t_{i+2}) / 2.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> greville() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> g(n_);
        for (int i = 0; i < n_; ++i) {
            g(i) = (knot(i + 1) + knot(i + 2)) / Scalar(2);
        }
        return g;
    }

    // Exact integral of function i over the interval.
    Scalar integral(int i) const {
        check_index(i);
        return (knot(i + 3) - knot(i)) / Scalar(degree + 1);
    }

private:
    Scalar knot(int k) const { return knots_[static_cast<std::size_t>(k)]; }

    Scalar basis(int i, int p, int span, Scalar alpha) const {
        if (p == 0) {
            return i == span ? Scalar(1) : Scalar(0);
        }
        Scalar result(0);
        const Scalar d0 = knot(i + p) - knot(i);
        const Scalar d1 = knot(i + p + 1) - knot(i + 1);
        if (d0 > Scalar(0)) {
            result += (alpha - knot(i)) / d0 * basis(i, p - 1, span, alpha);
        }
        if (d1 > Scalar(0)) {
            result += (knot(i + p + 1) - alpha) / d1 * basis(i + 1, p - 1, span, alpha);
        }
        return result;
    }

    void check_domain(Scalar alpha) const {
        if (alpha < lower_ || alpha > upper_) {
            throw DomainError("alpha outside the B-spline interval");
        }
    }

    void check_index(int i) const {
        if (i < 0 || i >= n_) {
            throw DomainError("B-spline index out of range");
        }
    }

    int n_ = 0;
    Scalar lower_{};
    Scalar upper_{};
    std::vector<Scalar> knots_;
};

using BSplineBasisd = BSplineBasis<double>;

inline BSplineBasisd make_basis(int n, double lower, double upper) {
    return BSplineBasisd(n, lower, upper);
}

}  // namespace foilwind
