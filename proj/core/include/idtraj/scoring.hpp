#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace idtraj {

// Sample p-quantile, interpolation type 7: h = (n-1)p, linear between order
// statistics. `sorted` must be ascending.
double quantile_type7(const std::vector<double>& sorted, double p);

double pinball(double tau, double obs, double pred);

struct EnergyScore {
    double es = 0.0;
    double ed = 0.0;  // mean distance member to observation
    double ei = 0.0;  // mean distance member to member
};

EnergyScore energy_score(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens);

// p = 1 variogram score with uniform weights 1/T^2.
double variogram_score(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens);

// Log-determinant plus Mahalanobis form of the ensemble moments. A ridge of
// 1e-8 * mean diagonal is escalated tenfold up to 1e-4 before giving up;
// `degenerate` reports failure and the score is then NaN.
double dawid_sebastiani(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens, bool* degenerate);

struct CellScores {
    double es = 0.0;
    double ed = 0.0;
    double ei = 0.0;
    double crps = 0.0;   // mean over horizons and quantile levels
    double vs = 0.0;
    double dss = 0.0;
    bool dss_degenerate = false;
    double mae = 0.0;    // median forecast, mean over horizons
    double mse = 0.0;    // mean forecast, mean squared error over horizons
    std::array<double, 3> coverage{};  // central 50/90/99, strict inequalities
    Eigen::MatrixXd pb;  // horizons x quantile levels pinball values
};

// Scores one (day, product) cell: `obs` holds realized prices per horizon,
// `ens` is members x horizons.
CellScores score_cell(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens,
                      const std::vector<double>& taus);

const std::vector<double>& scoring_tau_grid();  // 0.01 ... 0.99

inline constexpr std::array<double, 3> kCoverageLevels = {0.50, 0.90, 0.99};

}  // namespace idtraj
