#include "idtraj/tdist.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "idtraj/errors.hpp"

namespace idtraj {

namespace {

void check_params(double sigma, double nu) {
    if (!(sigma > 0.0) || !(nu > 2.0)) {
        throw ContractError("t distribution requires sigma > 0 and nu > 2");
    }
}

// Scale of the underlying standard t that yields SD exactly sigma.
double t_scale(double sigma, double nu) { return sigma * std::sqrt((nu - 2.0) / nu); }

double clamp_unit(double p) { return std::clamp(p, 1e-16, 1.0 - 1e-16); }

}  // namespace

double t3_pdf(double x, double mu, double sigma, double nu) {
    check_params(sigma, nu);
    const double s = t_scale(sigma, nu);
    boost::math::students_t dist(nu);
    return boost::math::pdf(dist, (x - mu) / s) / s;
}

double t3_logpdf(double x, double mu, double sigma, double nu) {
    check_params(sigma, nu);
    const double s = t_scale(sigma, nu);
    const double z = (x - mu) / s;
    return std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
           0.5 * std::log(nu * M_PI) - std::log(s) -
           0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

double t3_cdf(double x, double mu, double sigma, double nu) {
    check_params(sigma, nu);
    boost::math::students_t dist(nu);
    return boost::math::cdf(dist, (x - mu) / t_scale(sigma, nu));
}

double t3_quantile(double p, double mu, double sigma, double nu) {
    check_params(sigma, nu);
    boost::math::students_t dist(nu);
    return mu + t_scale(sigma, nu) * boost::math::quantile(dist, clamp_unit(p));
}

double t3_sample(Rng& rng, double mu, double sigma, double nu) {
    return t3_quantile(rng.uniform(), mu, sigma, nu);
}

double normal_cdf(double z) {
    static const boost::math::normal dist;
    return boost::math::cdf(dist, z);
}

double normal_quantile(double p) {
    static const boost::math::normal dist;
    return boost::math::quantile(dist, clamp_unit(p));
}

double chi_squared_quantile(double p, double nu) {
    boost::math::chi_squared dist(nu);
    return boost::math::quantile(dist, clamp_unit(p));
}

double zit_sample(Rng& rng, const ZeroInflatedT& params) {
    if (!(params.pi >= 0.0 && params.pi <= 1.0)) {
        throw ContractError("mixture weight must lie in [0, 1]");
    }
    // One uniform decides the branch, a second feeds the t draw, so the
    // consumption pattern per variate is fixed.
    const bool active = rng.bernoulli(params.pi);
    const double u = rng.uniform();
    if (!active) return 0.0;
    return t3_quantile(u, params.mu, params.sigma, params.nu);
}

}  // namespace idtraj
