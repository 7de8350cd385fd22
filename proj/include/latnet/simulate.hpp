#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "latnet/models.hpp"
#include "latnet/sociomatrix.hpp"

namespace latnet {

// Forward generation controls. Anything left unset is drawn from the prior.
struct SimulateParams {
  double intercept = 0.0;  // P(edge) = Phi(intercept + alpha); cutpoint -intercept

  // class model
  std::optional<Eigen::MatrixXd> class_effects;
  bool random_labels = false;  // default: balanced contiguous blocks

  // distance model
  int clusters = 0;  // 0 draws positions from the prior
  double cluster_separation = 4.0;
  double cluster_spread = 1.0;
  std::optional<Eigen::MatrixXd> positions;

  // eigenmodel
  std::optional<Eigen::VectorXd> lambda;

  PriorConfig prior;
};

struct SimulationResult {
  Sociomatrix y;           // binary
  GlobalParams globals;    // the single cutpoint
  LatentState latent;      // the generating configuration
  Eigen::VectorXd theta;   // P(y = 1) per dyad
};

// Draws (or takes) a latent configuration, computes theta per dyad, and
// draws binary data through the latent-z construction.
SimulationResult simulate(ModelKind kind, int n, int K,
                          const SimulateParams& params, std::uint64_t seed);

void write_latent_tsv(const SimulationResult& sim, const std::string& path);
void write_theta_tsv(const SimulationResult& sim, const std::string& path);

}  // namespace latnet
