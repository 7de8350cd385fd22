#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "latnet/rng.hpp"

namespace latnet {

// Standard normal cdf; absolute error well below 1e-12 over the whole line.
template <typename Scalar>
inline Scalar std_normal_cdf(Scalar x) {
  return Scalar(0.5) * std::erfc(-x * Scalar(0.70710678118654752440));
}

// Upper tail 1 - Phi(x), accurate far into the tail.
template <typename Scalar>
inline Scalar std_normal_sf(Scalar x) {
  return Scalar(0.5) * std::erfc(x * Scalar(0.70710678118654752440));
}

// Inverse standard normal cdf (Wichura's PPND16 rational approximation).
double std_normal_quantile(double p);

// Draw from normal(mean, 1) restricted to (lo, hi); either bound may be
// infinite. Stable for intervals arbitrarily far into the tails (exponential
// envelope rejection beyond the bulk).
double truncated_normal_draw(double mean, double lo, double hi, RngStream& rng);

// Draw from normal(mean, precision^{-1}) through a Cholesky factor of the
// precision. Throws if the precision is not positive definite.
Eigen::VectorXd mvn_draw(const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& precision, RngStream& rng);

// Gamma(shape, scale 1) via the Marsaglia-Tsang squeeze.
double gamma_draw(double shape, RngStream& rng);

// Inverse gamma with density proportional to x^{-shape-1} exp(-rate/x);
// mean rate/(shape-1) for shape > 1.
double inverse_gamma_draw(double shape, double rate, RngStream& rng);

}  // namespace latnet
