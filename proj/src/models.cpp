#include "latnet/models.hpp"

#include <cmath>

namespace latnet {

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::distance: return "dist";
    case ModelKind::latent_class: return "class";
    case ModelKind::eigen: return "eigen";
  }
  return "?";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "dist" || name == "distance") return ModelKind::distance;
  if (name == "class") return ModelKind::latent_class;
  if (name == "eigen") return ModelKind::eigen;
  throw std::invalid_argument("unknown model '" + name + "'");
}

void GlobalParams::validate() const {
  for (Eigen::Index k = 0; k + 1 < thresholds.size(); ++k)
    if (!(thresholds[k] < thresholds[k + 1]))
      throw std::invalid_argument("thresholds must be strictly increasing");
}

double alpha(const LatentState& s, int i, int j) {
  if (const auto* c = std::get_if<ClassState>(&s)) return alpha_class(*c, i, j);
  if (const auto* d = std::get_if<DistanceState>(&s)) return alpha_distance(*d, i, j);
  return alpha_eigen(std::get<EigenState>(s), i, j);
}

double eta(const GlobalParams& g, const DyadCovariates& x, double alpha_value,
           int i, int j) {
  if (x.dim() == 0) return alpha_value;
  if (g.beta.size() != x.dim())
    throw std::invalid_argument("beta dimension does not match covariates");
  return x.x(i, j).dot(g.beta) + alpha_value;
}

double binary_probit_prob(const GlobalParams& g, double eta_value) {
  if (g.level_count() != 2)
    throw std::invalid_argument("binary_probit_prob needs a binary sample space");
  return std_normal_cdf(eta_value - g.thresholds[0]);
}

Eigen::VectorXd ordered_probit_probs(const GlobalParams& g, double eta_value) {
  g.validate();
  const int levels = g.level_count();
  if (levels < 2)
    throw std::invalid_argument("ordered_probit_probs needs at least 2 levels");
  // One cdf per cutpoint, telescoping differences; the top level uses the
  // survival form, which keeps far-tail accuracy and makes the binary case
  // coincide with binary_probit_prob bit for bit.
  Eigen::VectorXd cdf(levels);
  cdf[0] = 0.0;
  for (int k = 1; k < levels; ++k)
    cdf[k] = std_normal_cdf(g.thresholds[k - 1] - eta_value);
  Eigen::VectorXd probs(levels);
  for (int l = 0; l + 1 < levels; ++l) probs[l] = cdf[l + 1] - cdf[l];
  probs[levels - 1] = std_normal_cdf(eta_value - g.thresholds[levels - 2]);
  return probs;
}

PriorConfig PriorConfig::resolved(int node_count) const {
  PriorConfig out = *this;
  if (out.lambda_var <= 0.0) out.lambda_var = static_cast<double>(node_count);
  return out;
}

double prior_alpha_draw(ModelKind kind, int K, const PriorConfig& prior,
                        RngStream& rng) {
  switch (kind) {
    case ModelKind::latent_class: {
      // Marginally over the uniform labels, alpha is one effects entry.
      const double v = inverse_gamma_draw(prior.m_var_shape, prior.m_var_rate, rng);
      return std::sqrt(v) * rng.normal();
    }
    case ModelKind::distance: {
      double ss = 0.0;
      for (int k = 0; k < K; ++k) {
        const double pv = inverse_gamma_draw(prior.pos_var_shape, prior.pos_var_rate, rng);
        const double d = std::sqrt(pv) * (rng.normal() - rng.normal());
        ss += d * d;
      }
      return -std::sqrt(ss);
    }
    case ModelKind::eigen: {
      if (prior.lambda_var <= 0.0)
        throw std::invalid_argument("prior_alpha_draw: unresolved lambda_var");
      double a = 0.0;
      for (int k = 0; k < K; ++k) {
        const double m = prior.vec_mean_var > 0.0
                             ? std::sqrt(prior.vec_mean_var) * rng.normal()
                             : 0.0;
        const double su = std::sqrt(prior.u_var);
        const double ui = m + su * rng.normal();
        const double uj = m + su * rng.normal();
        const double lk = std::sqrt(prior.lambda_var) * rng.normal();
        a += lk * ui * uj;
      }
      return a;
    }
  }
  throw std::logic_error("unreachable");
}

double monte_carlo_alpha_variance(ModelKind kind, int K,
                                  const PriorConfig& prior, int draws,
                                  RngStream& rng) {
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double a = prior_alpha_draw(kind, K, prior, rng);
    sum += a;
    sumsq += a * a;
  }
  const double mean = sum / draws;
  return sumsq / draws - mean * mean;
}

PriorConfig calibrate_prior_alpha_variance(ModelKind kind, int K,
                                           const PriorConfig& prior,
                                           int node_count,
                                           double target_variance,
                                           std::uint64_t seed, int draws) {
  if (!(target_variance > 0.0))
    throw std::invalid_argument("target variance must be positive");
  PriorConfig out = prior.resolved(node_count);
  if (kind == ModelKind::latent_class) {
    // Var[alpha] = E[m_var] = rate / (shape - 1): exact, no Monte Carlo.
    out.m_var_rate = target_variance * (out.m_var_shape - 1.0);
    return out;
  }
  RngStream rng(seed, static_cast<std::uint64_t>(kind) * 64 + K);
  const double var = monte_carlo_alpha_variance(kind, K, out, draws, rng);
  const double scale = target_variance / var;
  if (kind == ModelKind::distance)
    out.pos_var_rate *= scale;
  else
    out.lambda_var *= scale;
  return out;
}

}  // namespace latnet
