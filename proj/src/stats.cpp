#include "latnet/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace latnet {

// PPND16 (Wichura 1988, algorithm AS 241): relative accuracy ~1e-16.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("std_normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  double r, num, den;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    num = (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
              1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
            1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    den = (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
              5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
            4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  if (r <= 5.0) {
    r -= 1.6;
    num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  const double x = num / den;
  return q < 0.0 ? -x : x;
}

namespace {

// Draw from N(0,1) restricted to (a, +inf).
double std_normal_lower_tail(double a, RngStream& rng) {
  if (a <= 0.45) {
    for (;;) {
      const double x = rng.normal();
      if (x > a) return x;
    }
  }
  // Robert (1995) exponential envelope; stable arbitrarily far out.
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a - std::log(rng.uniform01()) / lambda;
    const double d = x - lambda;
    if (std::log(rng.uniform01()) <= -0.5 * d * d) return x;
  }
}

// Draw from N(0,1) on (a, b) with 0 <= a < b.
double std_normal_band_positive(double a, double b, RngStream& rng) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  if ((b - a) * lambda < 1.0) {
    // Narrow band: uniform proposal, density bounded by its value at a.
    for (;;) {
      const double x = rng.uniform(a, b);
      if (std::log(rng.uniform01()) <= 0.5 * (a * a - x * x)) return x;
    }
  }
  // Wide band: tail draw, discard the rare overshoot past b.
  for (;;) {
    const double x = std_normal_lower_tail(a, rng);
    if (x < b) return x;
  }
}

}  // namespace

double truncated_normal_draw(double mean, double lo, double hi,
                             RngStream& rng) {
  if (!(lo < hi))
    throw std::invalid_argument("truncated_normal_draw: requires lo < hi");
  const double a = lo - mean;
  const double b = hi - mean;
  const bool a_inf = std::isinf(a) && a < 0.0;
  const bool b_inf = std::isinf(b) && b > 0.0;
  double z;
  if (a_inf && b_inf) {
    z = rng.normal();
  } else if (b_inf) {
    z = std_normal_lower_tail(a, rng);
  } else if (a_inf) {
    z = -std_normal_lower_tail(-b, rng);
  } else if (a >= 0.0) {
    z = std_normal_band_positive(a, b, rng);
  } else if (b <= 0.0) {
    z = -std_normal_band_positive(-b, -a, rng);
  } else if (std_normal_cdf(b) - std_normal_cdf(a) > 0.25) {
    for (;;) {
      z = rng.normal();
      if (z > a && z < b) break;
    }
  } else {
    // Narrow band straddling zero: uniform proposal, density peak at zero.
    for (;;) {
      z = rng.uniform(a, b);
      if (std::log(rng.uniform01()) <= -0.5 * z * z) break;
    }
  }
  return mean + z;
}

Eigen::VectorXd mvn_draw(const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& precision, RngStream& rng) {
  if (precision.rows() != precision.cols() || precision.rows() != mean.size())
    throw std::invalid_argument("mvn_draw: dimension mismatch");
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mvn_draw: precision is not positive definite");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  // x = U^{-1} z has covariance (U' U)^{-1} = precision^{-1}.
  return mean + llt.matrixU().solve(z);
}

double gamma_draw(double shape, RngStream& rng) {
  if (!(shape > 0.0))
    throw std::invalid_argument("gamma_draw: shape must be positive");
  if (shape < 1.0) {
    const double u = rng.uniform01();
    return gamma_draw(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double inverse_gamma_draw(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("inverse_gamma_draw: parameters must be positive");
  return rate / gamma_draw(shape, rng);
}

}  // namespace latnet
