#include "latnet/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "latnet/stats.hpp"

namespace latnet {

SimulationResult simulate(ModelKind kind, int n, int K,
                          const SimulateParams& params, std::uint64_t seed) {
  if (n < 2 || K < 1) throw std::invalid_argument("simulate: need n >= 2, K >= 1");
  RngStream rng(seed, 0x51);
  const PriorConfig prior = params.prior.resolved(n);
  LatentState latent;
  switch (kind) {
    case ModelKind::latent_class: {
      ClassState s;
      s.labels.resize(n);
      for (int i = 0; i < n; ++i)
        s.labels[i] = params.random_labels
                          ? static_cast<int>(rng.uniform_below(K))
                          : static_cast<int>(static_cast<long>(i) * K / n);
      if (params.class_effects) {
        if (params.class_effects->rows() != K || params.class_effects->cols() != K)
          throw std::invalid_argument("simulate: class effects must be K x K");
        s.effects = *params.class_effects;
        if (!s.effects.isApprox(s.effects.transpose()))
          throw std::invalid_argument("simulate: class effects must be symmetric");
      } else {
        s.m_var = inverse_gamma_draw(prior.m_var_shape, prior.m_var_rate, rng);
        s.effects.resize(K, K);
        for (int a = 0; a < K; ++a)
          for (int b = a; b < K; ++b) {
            const double m = std::sqrt(s.m_var) * rng.normal();
            s.effects(a, b) = m;
            s.effects(b, a) = m;
          }
      }
      latent = std::move(s);
      break;
    }
    case ModelKind::distance: {
      DistanceState s;
      s.pos_var = Eigen::VectorXd::Ones(K);
      if (params.positions) {
        if (params.positions->rows() != n || params.positions->cols() != K)
          throw std::invalid_argument("simulate: positions must be n x K");
        s.positions = *params.positions;
      } else if (params.clusters > 0) {
        s.positions.resize(n, K);
        for (int i = 0; i < n; ++i) {
          const int c = static_cast<int>(static_cast<long>(i) * params.clusters / n);
          const double center =
              (c - 0.5 * (params.clusters - 1)) * params.cluster_separation;
          for (int k = 0; k < K; ++k)
            s.positions(i, k) =
                (k == 0 ? center : 0.0) + params.cluster_spread * rng.normal();
        }
      } else {
        s.positions.resize(n, K);
        for (int k = 0; k < K; ++k) {
          const double pv =
              inverse_gamma_draw(prior.pos_var_shape, prior.pos_var_rate, rng);
          s.pos_var[k] = pv;
          for (int i = 0; i < n; ++i)
            s.positions(i, k) = std::sqrt(pv) * rng.normal();
        }
      }
      latent = std::move(s);
      break;
    }
    case ModelKind::eigen: {
      EigenState s;
      s.vec_mean = Eigen::VectorXd::Zero(K);
      if (params.lambda) {
        if (params.lambda->size() != K)
          throw std::invalid_argument("simulate: lambda must have K entries");
        s.lambda = *params.lambda;
      } else {
        s.lambda.resize(K);
        for (int k = 0; k < K; ++k)
          s.lambda[k] = std::sqrt(prior.lambda_var) * rng.normal();
      }
      s.vectors.resize(n, K);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < K; ++k) s.vectors(i, k) = rng.normal();
      latent = std::move(s);
      break;
    }
  }
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "v" + std::to_string(i + 1);
  Eigen::VectorXi values(dyad_count(n));
  Eigen::VectorXd theta(dyad_count(n));
  const double cut = -params.intercept;
  for (int i = 0, d = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++d) {
      const double a = alpha(latent, i, j);
      theta[d] = std_normal_cdf(a - cut);
      const double z = a + rng.normal();
      values[d] = z > cut ? 1 : 0;
    }
  }
  GlobalParams globals;
  globals.thresholds = Eigen::VectorXd::Constant(1, cut);
  return SimulationResult{
      Sociomatrix::all_observed(std::move(labels), std::move(values)),
      std::move(globals), std::move(latent), std::move(theta)};
}

void write_latent_tsv(const SimulationResult& sim, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[32];
  const auto& labels = sim.y.labels();
  if (const auto* c = std::get_if<ClassState>(&sim.latent)) {
    out << "node\tlabel\n";
    for (int i = 0; i < c->labels.size(); ++i)
      out << labels[i] << '\t' << c->labels[i] + 1 << '\n';
    out << "# effects rows follow\n";
    for (int a = 0; a < c->class_count(); ++a) {
      for (int b = 0; b < c->class_count(); ++b) {
        std::snprintf(buf, sizeof buf, "%.10g", c->effects(a, b));
        out << (b ? "\t" : "") << buf;
      }
      out << '\n';
    }
  } else if (const auto* d = std::get_if<DistanceState>(&sim.latent)) {
    out << "node\tposition...\n";
    for (int i = 0; i < d->positions.rows(); ++i) {
      out << labels[i];
      for (int k = 0; k < d->positions.cols(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g", d->positions(i, k));
        out << '\t' << buf;
      }
      out << '\n';
    }
  } else {
    const auto& e = std::get<EigenState>(sim.latent);
    out << "# lambda\n";
    for (int k = 0; k < e.lambda.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.10g", e.lambda[k]);
      out << (k ? "\t" : "") << buf;
    }
    out << "\nnode\tvector...\n";
    for (int i = 0; i < e.vectors.rows(); ++i) {
      out << labels[i];
      for (int k = 0; k < e.vectors.cols(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g", e.vectors(i, k));
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
}

void write_theta_tsv(const SimulationResult& sim, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "i\tj\ty\ttheta\n";
  char buf[32];
  for (int d = 0; d < sim.y.dyad_count(); ++d) {
    const auto [i, j] = sim.y.dyad_nodes(d);
    std::snprintf(buf, sizeof buf, "%.10g", sim.theta[d]);
    out << sim.y.labels()[i] << '\t' << sim.y.labels()[j] << '\t'
        << sim.y.value_at(d) << '\t' << buf << '\n';
  }
}

}  // namespace latnet
