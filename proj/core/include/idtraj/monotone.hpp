#pragma once

#include <vector>

namespace idtraj {

// C1 cubic Hermite interpolant through (xs, ys) with tangents filtered so a
// monotone data sequence yields a monotone interpolant (Hyman filtering).
// xs must be strictly increasing; ys must be non-decreasing.
class MonotoneSpline {
public:
    MonotoneSpline() = default;
    MonotoneSpline(std::vector<double> xs, std::vector<double> ys);

    // Evaluates the interpolant; clamps to ys.front()/ys.back() outside.
    double operator()(double x) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    double y_min() const { return ys_.front(); }
    double y_max() const { return ys_.back(); }

    // Smallest x with value(x) = y, found by bisection to tol; y is clamped
    // into the value range first.
    double inverse(double y, double tol = 1e-9) const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> tangents_;
};

// Continuous marginal distribution function on [x_min, x_max] built from a
// non-decreasing probability grid; 0 below the support, 1 above.
class MonotoneCdf {
public:
    MonotoneCdf() = default;
    MonotoneCdf(std::vector<double> values, std::vector<double> probs);

    double cdf(double x) const;
    double quantile(double p, double tol = 1e-9) const;

    double support_min() const { return spline_.x_min(); }
    double support_max() const { return spline_.x_max(); }

private:
    MonotoneSpline spline_;
};

}  // namespace idtraj
