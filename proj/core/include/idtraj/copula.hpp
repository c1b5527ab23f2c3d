#pragma once

#include <string>

#include <Eigen/Dense>

#include "idtraj/rng.hpp"

namespace idtraj {

enum class CopulaKind { independence, gaussian, comonotone, countermonotone };

std::string copula_name(CopulaKind kind);
CopulaKind copula_from_name(const std::string& name);

struct CopulaSpec {
    CopulaKind kind = CopulaKind::independence;
    Eigen::MatrixXd correlation;  // gaussian only, T x T
};

// Lower Cholesky factor of a correlation matrix. A non-PSD input is repaired
// by clipping eigenvalues at 1e-10 and renormalizing the diagonal to one;
// *repaired reports whether that happened.
Eigen::MatrixXd correlation_cholesky(const Eigen::MatrixXd& corr, bool* repaired = nullptr);

// Maps an M x T matrix of independent uniforms to uniforms whose rows carry
// the requested dependence structure. Row-wise deterministic in the input.
Eigen::MatrixXd copula_transform(const Eigen::MatrixXd& uniforms, const CopulaSpec& spec);

// Reorders values within each column of an ensemble so member rows follow the
// dependence template while every column keeps exactly the same multiset of
// values. The rng drives the template uniforms.
Eigen::MatrixXd reorder_to_copula(const Eigen::MatrixXd& ensemble, const CopulaSpec& spec,
                                  Rng& rng);

}  // namespace idtraj
