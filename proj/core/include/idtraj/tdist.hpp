#pragma once

#include "idtraj/rng.hpp"

namespace idtraj {

// Student-t location-scale family parameterized by its standard deviation:
// X = mu + sigma * sqrt((nu-2)/nu) * T_nu, nu > 2, so SD(X) = sigma exactly.
// All functions require sigma > 0 and nu > 2.

double t3_pdf(double x, double mu, double sigma, double nu);
double t3_logpdf(double x, double mu, double sigma, double nu);
double t3_cdf(double x, double mu, double sigma, double nu);
double t3_quantile(double p, double mu, double sigma, double nu);
double t3_sample(Rng& rng, double mu, double sigma, double nu);

// Standard normal helpers (shared by copulas and scoring).
double normal_cdf(double z);
double normal_quantile(double p);

// Quantile of chi-squared with nu degrees of freedom.
double chi_squared_quantile(double p, double nu);

// Zero-inflated mixture: with probability pi draw from the t above, else 0.
struct ZeroInflatedT {
    double pi;
    double mu;
    double sigma;
    double nu;
};

double zit_sample(Rng& rng, const ZeroInflatedT& params);

}  // namespace idtraj
