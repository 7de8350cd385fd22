#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace latnet {

// Flat upper-triangle index of the unordered pair {i, j} among n nodes.
// The diagonal is undefined and throws.
int dyad_index(int n, int i, int j);
int dyad_count(int n);

// Symmetric ordinal relational data: one value per unordered node pair,
// an observation mask, and no diagonal. Immutable after construction.
class Sociomatrix {
 public:
  Sociomatrix(std::vector<std::string> labels, Eigen::VectorXi values,
              std::vector<std::uint8_t> observed);

  static Sociomatrix all_observed(std::vector<std::string> labels,
                                  Eigen::VectorXi values);

  int node_count() const { return n_; }
  int dyad_count() const { return static_cast<int>(values_.size()); }
  int observed_count() const { return observed_count_; }
  const std::vector<std::string>& labels() const { return labels_; }

  int dyad_index(int i, int j) const { return latnet::dyad_index(n_, i, j); }
  std::pair<int, int> dyad_nodes(int d) const;  // (i, j) with i < j

  bool is_observed(int i, int j) const { return observed_[dyad_index(i, j)] != 0; }
  bool observed_at(int d) const { return observed_[d] != 0; }

  // Value of an observed dyad; reading a hidden dyad is an error.
  int value(int i, int j) const { return value_at(dyad_index(i, j)); }
  int value_at(int d) const;

  // Sorted distinct values among observed dyads (the sample space).
  const std::vector<int>& value_levels() const { return value_levels_; }
  int level_at(int d) const;  // index of value_at(d) within value_levels()

 private:
  int n_;
  std::vector<std::string> labels_;
  Eigen::VectorXi values_;
  std::vector<std::uint8_t> observed_;
  std::vector<int> value_levels_;
  int observed_count_;
};

// Optional per-dyad covariate vectors; x(i,j) = x(j,i) by construction.
class DyadCovariates {
 public:
  static DyadCovariates none(int node_count);
  DyadCovariates(int node_count, Eigen::MatrixXd x);  // rows indexed by dyad

  int node_count() const { return n_; }
  int dim() const { return static_cast<int>(x_.cols()); }
  Eigen::RowVectorXd x(int i, int j) const { return x_.row(dyad_index(n_, i, j)); }
  const Eigen::MatrixXd& matrix() const { return x_; }

 private:
  int n_;
  Eigen::MatrixXd x_;
};

// Assignment of observed dyads to cross-validation folds (1..fold_count;
// 0 marks dyads outside the partition).
struct FoldAssignment {
  int fold_count = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold;  // per dyad index

  int size_of(int f) const;
};

// Loaders and writers ------------------------------------------------------

// Tab-separated lines `label_i  label_j  value` (value optional, default 1).
// Unlisted dyads become observed with `default_value`. Self loops,
// non-integer values and conflicting duplicates are errors.
Sociomatrix load_edge_list(const std::string& path, int default_value = 0);

// Canonical i<j order, observed dyads only; bit-exact round trip with
// load_edge_list for fully observed data.
void write_edge_list(const Sociomatrix& y, const std::string& path);

// Dense n x n CSV with a label header row, NA on the diagonal and NA for
// unobserved entries; lossless round trip including the mask.
Sociomatrix load_dense_csv(const std::string& path);
void write_dense_csv(const Sociomatrix& y, const std::string& path);

// Covariate TSV: `label_i  label_j  v1 ... vp`; unlisted dyads get zeros.
DyadCovariates load_covariates(const std::string& path, const Sociomatrix& y);

// Token-adjacency counts from raw text. Tokens are maximal alphabetic runs
// (case-folded) and the individual punctuation characters . , ; : ? !
// y_{i,j} counts unordered adjacencies of distinct tokens i, j in the
// stream; repeated-token adjacencies are dropped. All dyads observed.
Sociomatrix tokenize_adjacency_counts(const std::string& text);

// Restriction of y to the largest connected component of the graph whose
// edges are observed dyads with value > threshold. Ties in component size
// break toward the component containing the smallest label.
Sociomatrix largest_connected_component(const Sociomatrix& y, int threshold);

// Uniformly random partition of the observed dyads into `folds` sets whose
// sizes differ by at most one; deterministic given the seed.
FoldAssignment assign_folds(const Sociomatrix& y, int folds, std::uint64_t seed);

// Copy of y with fold-f dyads hidden (unobserved, value erased).
Sociomatrix mask_fold(const Sociomatrix& y, const FoldAssignment& a, int f);

}  // namespace latnet
