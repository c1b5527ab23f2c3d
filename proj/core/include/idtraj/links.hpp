#pragma once

#include <algorithm>
#include <cmath>

namespace idtraj {

// Location link: identity.
inline double link_mu(double mu) { return mu; }
inline double link_mu_inverse(double eta) { return eta; }

// Scale link: logarithmic below 1, identity-shifted above, continuous at 1.
// Keeps sigma positive without the explosive growth of a pure log link.
inline double link_sigma(double sigma) {
    return sigma <= 1.0 ? std::log(sigma) : sigma - 1.0;
}
inline double link_sigma_inverse(double eta) {
    return eta <= 0.0 ? std::exp(eta) : eta + 1.0;
}
// d sigma / d eta, used by the scoring steps of the scale block.
inline double link_sigma_dinv(double sigma) { return std::min(sigma, 1.0); }

// Tail link: shifted log keeping nu > 2 so the scale parameter stays an
// exact standard deviation.
inline double link_nu(double nu) { return std::log(nu - 2.0); }
inline double link_nu_inverse(double eta) { return std::exp(eta) + 2.0; }

}  // namespace idtraj
