#pragma once

#include <Eigen/Dense>

namespace idtraj {

// Uniformly spaced B-spline basis on [lo, hi]. Inputs outside the domain are
// clamped to it, so the basis row always sums to one.
class BSplineBasis {
public:
    BSplineBasis() = default;
    BSplineBasis(double lo, double hi, int n_basis, int degree = 3);

    int size() const { return n_basis_; }
    int degree() const { return degree_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    Eigen::VectorXd row(double x) const;
    Eigen::MatrixXd rows(const Eigen::VectorXd& x) const;

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    int n_basis_ = 0;
    int degree_ = 3;
    Eigen::VectorXd knots_;
};

// k-th order difference penalty D'D for an n-coefficient basis. Its null
// space holds polynomial coefficient sequences up to degree k-1.
Eigen::MatrixXd pspline_penalty(int n_basis, int diff_order = 2);

}  // namespace idtraj
