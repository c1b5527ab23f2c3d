#include "idtraj/monotone.hpp"

#include <algorithm>
#include <cmath>

#include "idtraj/errors.hpp"

namespace idtraj {

MonotoneSpline::MonotoneSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n) throw ContractError("need >= 2 knots");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw ContractError("abscissae must strictly increase");
        if (ys_[i] < ys_[i - 1]) throw ContractError("ordinates must be non-decreasing");
    }

    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        secant[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    }

    // Interval-length weighted tangent estimates, then the Hyman clamp
    // m_i in [0, 3*min(adjacent secants)] which is sufficient for
    // monotonicity of each cubic piece.
    tangents_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double m;
        if (i == 0) {
            m = secant[0];
        } else if (i == n - 1) {
            m = secant[n - 2];
        } else {
            const double h0 = xs_[i] - xs_[i - 1];
            const double h1 = xs_[i + 1] - xs_[i];
            m = (secant[i - 1] * h1 + secant[i] * h0) / (h0 + h1);
        }
        const double lo = (i == 0) ? secant[0] : secant[i - 1];
        const double hi = (i == n - 1) ? secant[n - 2] : secant[i];
        const double cap = 3.0 * std::min(lo, hi);
        tangents_[i] = std::clamp(m, 0.0, cap);
    }
}

double MonotoneSpline::operator()(double x) const {
    if (xs_.empty()) throw ContractError("spline not initialized");
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * ys_[i] + h10 * h * tangents_[i] + h01 * ys_[i + 1] +
           h11 * h * tangents_[i + 1];
}

double MonotoneSpline::inverse(double y, double tol) const {
    y = std::clamp(y, ys_.front(), ys_.back());
    // Bracket on the knot grid first, then bisect inside one interval.
    const auto it = std::lower_bound(ys_.begin(), ys_.end(), y);
    std::size_t hi_idx = static_cast<std::size_t>(it - ys_.begin());
    if (hi_idx == 0) return xs_.front();
    if (ys_[hi_idx] == y) {
        // Return the smallest abscissa attaining y on a flat run.
        std::size_t k = hi_idx;
        while (k > 0 && ys_[k - 1] == y) --k;
        return xs_[k];
    }
    double lo = xs_[hi_idx - 1];
    double hi = xs_[hi_idx];
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(mid) < y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

MonotoneCdf::MonotoneCdf(std::vector<double> values, std::vector<double> probs)
    : spline_(std::move(values), std::move(probs)) {}

double MonotoneCdf::cdf(double x) const {
    if (x < spline_.x_min()) return 0.0;
    if (x > spline_.x_max()) return 1.0;
    return std::clamp(spline_(x), spline_.y_min(), spline_.y_max());
}

double MonotoneCdf::quantile(double p, double tol) const {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("probability outside [0, 1]");
    return spline_.inverse(p, tol);
}

}  // namespace idtraj
