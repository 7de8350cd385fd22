#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <variant>

#include "latnet/rng.hpp"
#include "latnet/sociomatrix.hpp"
#include "latnet/stats.hpp"

namespace latnet {

enum class ModelKind { distance, latent_class, eigen };

const char* model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);  // "dist" | "class" | "eigen"

// Regression coefficients and ordered-probit cutpoints. Level l of an
// L-level sample space occupies the latent interval
// (lower_cut(l), upper_cut(l)); the L-1 finite cutpoints are strictly
// increasing and the outer bounds are -inf / +inf.
struct GlobalParams {
  Eigen::VectorXd beta;
  Eigen::VectorXd thresholds;

  int level_count() const { return static_cast<int>(thresholds.size()) + 1; }
  double lower_cut(int level) const {
    return level == 0 ? -std::numeric_limits<double>::infinity()
                      : thresholds[level - 1];
  }
  double upper_cut(int level) const {
    return level == level_count() - 1
               ? std::numeric_limits<double>::infinity()
               : thresholds[level];
  }
  void validate() const;  // strict ordering
};

// Latent class configuration: labels in 0..K-1 and a symmetric K x K matrix
// of between-class effects with entry prior variance m_var.
struct ClassState {
  Eigen::VectorXi labels;
  Eigen::MatrixXd effects;  // symmetric
  double m_var = 1.0;

  int class_count() const { return static_cast<int>(effects.rows()); }
};

// Latent positions in R^K with per-coordinate population variances.
struct DistanceState {
  Eigen::MatrixXd positions;  // n x K
  Eigen::VectorXd pos_var;    // K
};

// Latent vectors in R^K, signed weights lambda, and the population mean of
// the vectors.
struct EigenState {
  Eigen::MatrixXd vectors;  // n x K
  Eigen::VectorXd lambda;   // K
  Eigen::VectorXd vec_mean; // K
};

using LatentState = std::variant<ClassState, DistanceState, EigenState>;

// The three symmetric kernels -----------------------------------------------

inline double alpha_class(const ClassState& s, int i, int j) {
  if (i == j) throw std::invalid_argument("alpha is undefined on the diagonal");
  if (i < 0 || j < 0 || i >= s.labels.size() || j >= s.labels.size())
    throw std::out_of_range("node index out of range");
  return s.effects(s.labels[i], s.labels[j]);
}

template <typename DA, typename DB>
double alpha_distance(const Eigen::MatrixBase<DA>& ui,
                      const Eigen::MatrixBase<DB>& uj) {
  return -(ui - uj).norm();
}

inline double alpha_distance(const DistanceState& s, int i, int j) {
  if (i == j) throw std::invalid_argument("alpha is undefined on the diagonal");
  return alpha_distance(s.positions.row(i), s.positions.row(j));
}

template <typename DA, typename DB, typename DL>
double alpha_eigen(const Eigen::MatrixBase<DA>& ui,
                   const Eigen::MatrixBase<DB>& uj,
                   const Eigen::MatrixBase<DL>& lambda) {
  return (ui.transpose().cwiseProduct(uj.transpose()) * lambda.asDiagonal()).sum();
}

inline double alpha_eigen(const EigenState& s, int i, int j) {
  if (i == j) throw std::invalid_argument("alpha is undefined on the diagonal");
  return (s.vectors.row(i).array() * s.vectors.row(j).array() *
          s.lambda.transpose().array())
      .sum();
}

double alpha(const LatentState& s, int i, int j);

// Systematic part beta' x_{i,j} + alpha(u_i, u_j).
double eta(const GlobalParams& g, const DyadCovariates& x, double alpha_value,
           int i, int j);

// P(y = 1 | eta) for binary data: the single cutpoint plays the role of a
// negated intercept, so this equals Phi(eta - cutpoint).
double binary_probit_prob(const GlobalParams& g, double eta_value);

// Ordered-probit level probabilities P(y = l | eta) =
// Phi(upper_cut(l) - eta) - Phi(lower_cut(l) - eta); sums to one.
Eigen::VectorXd ordered_probit_probs(const GlobalParams& g, double eta_value);

// Prior configuration --------------------------------------------------------

// Weakly informative defaults; conjugate wherever the update schedule needs
// it. lambda_var < 0 stands for the data-driven default (node count) and is
// resolved before use.
struct PriorConfig {
  double beta_var = 100.0;
  double threshold_var = 100.0;
  // class model; labels follow a Dirichlet(label_conc) compound multinomial,
  // collapsed over the class proportions in the label update
  double m_var_shape = 2.0;
  double m_var_rate = 1.0;
  double label_conc = 1.0;
  // distance model
  double pos_var_shape = 2.0;
  double pos_var_rate = 1.0;
  // eigenmodel
  double u_var = 1.0;
  double vec_mean_var = 1.0;
  double lambda_var = -1.0;

  PriorConfig resolved(int node_count) const;  // fills lambda_var default
};

// One draw of alpha(u_i, u_j) for a generic dyad under the prior (including
// the hyperpriors on spreads).
double prior_alpha_draw(ModelKind kind, int K, const PriorConfig& prior,
                        RngStream& rng);

// Monte Carlo estimate of Var[alpha] under the prior.
double monte_carlo_alpha_variance(ModelKind kind, int K,
                                  const PriorConfig& prior, int draws,
                                  RngStream& rng);

// Rescales the model's spread knob (class: m_var rate; distance: pos_var
// rate; eigen: lambda variance) so that Var[alpha] under the prior equals
// target_variance, estimated with `draws` Monte Carlo prior draws. The
// variance is exactly linear in each knob, so a single rescale suffices.
PriorConfig calibrate_prior_alpha_variance(ModelKind kind, int K,
                                           const PriorConfig& prior,
                                           int node_count,
                                           double target_variance = 1.0,
                                           std::uint64_t seed = 0xCA11B7A7E,
                                           int draws = 100000);

}  // namespace latnet
