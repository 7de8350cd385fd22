#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "latnet/models.hpp"
#include "latnet/sociomatrix.hpp"

namespace latnet {

struct SamplerConfig {
  int iterations = 20000;
  int burn_in = 5000;
  int thin = 10;
  double mh_step = 0.5;  // distance-model proposal sd
  bool adapt = true;     // tune mh_step during burn-in only
  std::uint64_t seed = 1;

  void validate() const;
};

// Full Markov chain state: latent dyad variables, global parameters and the
// model-specific latent configuration (hyperparameters live inside it).
struct ChainState {
  Eigen::VectorXd z;  // one latent real per dyad
  GlobalParams globals;
  LatentState latent;
  RngStream rng{0};
};

// Recorded scalar samples plus running predictive-mean accumulators.
struct Trace {
  int recorded = 0;
  Eigen::VectorXd theta_sum;  // per dyad, sum of P(y > lowest | state)
  std::vector<std::string> scalar_names;
  std::vector<Eigen::VectorXd> scalars;  // one row per recorded sample
  long long mh_proposals = 0;
  long long mh_accepted = 0;
};

// Mean of P(y > lowest level) over the recorded samples, per dyad.
Eigen::VectorXd posterior_predictive_mean(const Trace& trace);

// One row per recorded sample of the scalar parameters, for diagnostics.
void write_trace_csv(const Trace& trace, const std::string& path);

// Gibbs/Metropolis sampler implementing the four-block update schedule:
//   1. z from its constrained-normal full conditional,
//   2. each cutpoint from its truncated-normal full conditional,
//   3. beta from its multivariate-normal full conditional,
//   4. the latent state (model-specific block).
// Unobserved dyads carry imputed unconstrained z, so every conditional keeps
// its complete-data form.
class GibbsSampler {
 public:
  // level_count_override pins the sample space when it is not derivable from
  // the data (the correctness harness); then values must be level indices.
  GibbsSampler(Sociomatrix y, DyadCovariates x, ModelKind kind, int K,
               SamplerConfig cfg, PriorConfig prior,
               int level_count_override = -1);

  // Composes the schedule: data-driven initialization, then iterate,
  // recording every thin-th sweep after burn-in. Deterministic given the
  // config seed.
  Trace run();

  // Individual update blocks (public for tests and the harness).
  void sample_z();
  void sample_thresholds();
  void sample_beta();
  void update_latent();

  void init_for_data();    // thresholds at empirical quantiles, beta 0
  void init_from_prior();  // everything from the prior
  void sweep(int sweep_index);

  // Forward-simulates y (and z) from the current parameters. Used by the
  // joint-distribution harness; requires a fully observed matrix.
  void redraw_data();

  // P(y > lowest level | current state) per dyad.
  Eigen::VectorXd current_theta();

  // Summary statistics of (parameters, data) for the harness.
  Eigen::VectorXd harness_stats();
  std::vector<std::string> harness_stat_names() const;

  // Deliberately breaks sample_z (wrong truncation side); harness mutation
  // hook, never used in real runs.
  void enable_truncation_bug() { truncation_bug_ = true; }

  const ChainState& state() const { return st_; }
  // Mutable access invalidates the kernel cache, so tests may edit the state
  // directly between update calls.
  ChainState& state() {
    alpha_dirty_ = true;
    return st_;
  }
  const Sociomatrix& data() const { return y_; }
  int level_count() const { return level_count_; }
  int level_at_dyad(int d) const { return level_[d]; }
  double mh_step() const { return mh_step_; }
  double sweep_acceptance() const { return last_acceptance_; }
  long long mh_proposals() const { return mh_proposals_; }
  long long mh_accepted() const { return mh_accepted_; }
  const PriorConfig& prior() const { return prior_; }

 private:
  void ensure_alpha();
  void refresh_resid();
  void draw_latent_from_prior();
  void record(Trace& trace);
  void update_u_distance();
  void update_u_class();
  void update_u_eigen();

  Sociomatrix y_;
  DyadCovariates x_;
  ModelKind kind_;
  int K_;
  SamplerConfig cfg_;
  PriorConfig prior_;
  int level_count_;
  int n_;
  int dyads_;

  std::vector<int> level_;  // per dyad; -1 where unobserved
  std::vector<int> di_, dj_;

  ChainState st_;
  Eigen::VectorXd alpha_, xbeta_, resid_;
  bool alpha_dirty_ = true;

  double mh_step_ = 0.5;
  double last_acceptance_ = 0.0;
  long long mh_proposals_ = 0;
  long long mh_accepted_ = 0;
  bool truncation_bug_ = false;
};

// Joint-distribution correctness check: compares moments of
// (parameters, data) under forward simulation from the prior against a
// successive-conditional run that interleaves the Gibbs sweep with data
// redraws. Any discrepancy beyond sampling noise indicates a broken update.
struct JointCheckReport {
  std::vector<std::string> stat_names;
  Eigen::VectorXd forward_mean;
  Eigen::VectorXd successive_mean;
  Eigen::VectorXd z_score;  // standardized discrepancies
  double max_abs_z = 0.0;

  bool pass(double limit = 4.0) const { return max_abs_z <= limit; }
};

JointCheckReport joint_distribution_check(ModelKind kind, int n, int K,
                                          int level_count, int rounds,
                                          std::uint64_t seed,
                                          bool corrupt_sample_z = false);

}  // namespace latnet
