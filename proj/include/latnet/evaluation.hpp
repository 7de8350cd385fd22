#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "latnet/mcmc.hpp"
#include "latnet/models.hpp"
#include "latnet/sociomatrix.hpp"

namespace latnet {

// Out-of-sample posterior predictive means: every prediction was produced by
// a chain fit with that dyad hidden.
struct PredictionMatrix {
  FoldAssignment folds;
  Eigen::VectorXd yhat;                  // per dyad; meaningful where predicted
  std::vector<std::uint8_t> predicted;   // per dyad
  std::vector<std::uint8_t> truth;       // indicator y > lowest level
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) .. (1,1), one point per tie group
  double auc = 0.0;
};

// Five-fold (by default) cross validation: fit on the complement of each
// fold, fill predictions for the held-out dyads, never reading their values.
// Fold chains get independent substreams of cfg.seed, so runs are bit-exact
// reproducible for any jobs count.
PredictionMatrix cross_validate(const Sociomatrix& y, const DyadCovariates& x,
                                ModelKind kind, int K, int folds,
                                const SamplerConfig& cfg,
                                const PriorConfig& prior, int jobs = 1);

// Threshold sweep over the distinct scores (ties grouped); the trapezoid
// area equals the Mann-Whitney statistic with ties counted one half.
RocCurve roc_curve(const std::vector<double>& score,
                   const std::vector<std::uint8_t>& truth);
RocCurve roc_curve(const PredictionMatrix& pred);

void write_predictions_tsv(const Sociomatrix& y, const PredictionMatrix& pred,
                           const std::string& path);
void write_roc_tsv(const RocCurve& roc, const std::string& path);

// Cross-validation AUC grid: rows by dimension, column blocks by
// dataset x model, entries rounded to two decimals.
struct AucTable {
  std::vector<std::string> datasets;
  std::vector<std::string> models{"dist", "class", "eigen"};
  std::vector<int> dimensions;
  std::map<std::tuple<std::string, std::string, int>, double> cells;

  void set(const std::string& dataset, const std::string& model, int k, double auc);
  double get(const std::string& dataset, const std::string& model, int k) const;
};

std::string format_auc_table_csv(const AucTable& table);
AucTable parse_auc_table_csv(const std::string& csv);
void write_auc_table_csv(const AucTable& table, const std::string& path);

}  // namespace latnet
