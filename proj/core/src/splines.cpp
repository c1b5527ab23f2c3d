#include "idtraj/splines.hpp"

#include <algorithm>
#include <cmath>

#include "idtraj/errors.hpp"

namespace idtraj {

BSplineBasis::BSplineBasis(double lo, double hi, int n_basis, int degree)
    : lo_(lo), hi_(hi), n_basis_(n_basis), degree_(degree) {
    if (!(hi > lo)) throw ContractError("spline domain must have positive width");
    if (n_basis < degree + 1) throw ContractError("need at least degree+1 basis functions");
    // Uniform knots extended degree steps beyond each end; the basis is a
    // partition of unity on [lo, hi].
    const int n_segments = n_basis - degree;
    const double h = (hi - lo) / n_segments;
    const int n_knots = n_basis + degree + 1;
    knots_.resize(n_knots);
    for (int i = 0; i < n_knots; ++i) {
        knots_[i] = lo + h * (i - degree);
    }
}

Eigen::VectorXd BSplineBasis::row(double x) const {
    if (n_basis_ == 0) throw ContractError("basis not initialized");
    x = std::clamp(x, lo_, hi_);

    // Interval index: knots_[j] <= x < knots_[j+1], with x == hi mapped to
    // the last interior interval.
    const int n_segments = n_basis_ - degree_;
    const double h = (knots_[1] - knots_[0]);
    int seg = static_cast<int>(std::floor((x - lo_) / h));
    seg = std::clamp(seg, 0, n_segments - 1);
    const int j = seg + degree_;  // knot interval index

    // Cox-de Boor on the degree+1 basis functions supported on interval j.
    Eigen::VectorXd b = Eigen::VectorXd::Zero(degree_ + 1);
    b[0] = 1.0;
    for (int d = 1; d <= degree_; ++d) {
        double saved = 0.0;
        for (int r = 0; r < d; ++r) {
            const double left = knots_[j - d + 1 + r];
            const double right = knots_[j + 1 + r];
            const double alpha = (x - left) / (right - left);
            const double tmp = b[r];
            b[r] = saved + (1.0 - alpha) * tmp;
            saved = alpha * tmp;
        }
        b[d] = saved;
    }

    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_basis_);
    out.segment(j - degree_, degree_ + 1) = b;
    return out;
}

Eigen::MatrixXd BSplineBasis::rows(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out(x.size(), n_basis_);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        out.row(i) = row(x[i]).transpose();
    }
    return out;
}

Eigen::MatrixXd pspline_penalty(int n_basis, int diff_order) {
    if (n_basis <= diff_order) throw ContractError("penalty needs n_basis > diff_order");
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n_basis, n_basis);
    for (int k = 0; k < diff_order; ++k) {
        const Eigen::Index n = d.rows();
        d = (d.bottomRows(n - 1) - d.topRows(n - 1)).eval();
    }
    return d.transpose() * d;
}

}  // namespace idtraj
