#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latnet/models.hpp"

namespace latnet {

// An element of the space of n x n symmetric kernel matrices: upper-triangle
// entries plus an optional diagonal completion.
struct AlphaMatrix {
  int n = 0;
  Eigen::VectorXd upper;                      // n(n-1)/2 entries
  std::optional<Eigen::VectorXd> completion;  // diagonal, when meaningful

  double entry(int i, int j) const;  // off-diagonal, symmetric
  Eigen::MatrixXd completed() const; // requires a completion
};

AlphaMatrix alpha_matrix_from(const ClassState& s);
AlphaMatrix alpha_matrix_from(const DistanceState& s);
AlphaMatrix alpha_matrix_from(const EigenState& s);

// Class-model kernel with the diagonal completed by the own-class effect;
// has at most K distinct rows, hence rank at most K.
AlphaMatrix complete_class_matrix(const ClassState& s);

// Count of singular values above tol_factor times the largest.
int numerical_rank(const Eigen::MatrixXd& m, double tol_factor = 1e-8);

// Builds the squared-distance matrix through the identity
// D2 = s 1' + 1 s' - 2 Z Z' (s_i = z_i'z_i) and returns it with its
// numerical rank, which is at most K+2.
std::pair<Eigen::MatrixXd, int> squared_distance_rank_check(
    const Eigen::MatrixXd& positions, double tol_factor = 1e-8);

// Lifts K-dimensional positions onto a sphere of radius r in K+1 dimensions:
// u_i = (z_i, sqrt(r^2 - |z_i|^2)) with identity weights, so that
// u_i'u_j = z_i'z_j + sqrt((r^2 - |z_i|^2)(r^2 - |z_j|^2)). For large r the
// inner products order like the negative distances.
EigenState sphere_embedding(const Eigen::MatrixXd& positions, double r);

// Kendall rank correlation (tau-b) between the off-diagonal entries.
double order_agreement(const AlphaMatrix& a, const AlphaMatrix& b);

// Rank-one kernel with one hub: entries r between node 1 and the rest and
// r^2 elsewhere, so every hub entry strictly exceeds every non-hub entry.
AlphaMatrix star_eigen_matrix(int n, double r);

// Multi-restart gradient search for n points in R^K whose distances satisfy
// d_{1,i} < d_{i,j} for all i, j != 1. Reports the smallest scale-normalized
// constraint violation found (0 means a feasible configuration was found;
// a strictly positive floor is evidence of infeasibility, not a proof).
struct FeasibilityResult {
  double best_violation = 0.0;
  Eigen::MatrixXd best_positions;  // n x K, node 0 at the origin
};
FeasibilityResult distance_feasibility_search(int n, int K, int restarts,
                                              std::uint64_t seed);

// The full verification battery; one pass/fail line per property.
struct TheoryReport {
  struct Item {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Item> items;
  bool all_pass() const;
  std::string to_string() const;
};
TheoryReport run_theory_battery(std::uint64_t seed = 7);

}  // namespace latnet
