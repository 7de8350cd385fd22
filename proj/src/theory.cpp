#include "latnet/theory.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "latnet/rng.hpp"

namespace latnet {

double AlphaMatrix::entry(int i, int j) const {
  return upper[dyad_index(n, i, j)];
}

Eigen::MatrixXd AlphaMatrix::completed() const {
  if (!completion) throw std::logic_error("alpha matrix has no completion");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = (*completion)[i];
    for (int j = i + 1; j < n; ++j) {
      const double v = entry(i, j);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

namespace {

template <typename F>
AlphaMatrix build_alpha(int n, F&& f) {
  AlphaMatrix m;
  m.n = n;
  m.upper.resize(dyad_count(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.upper[dyad_index(n, i, j)] = f(i, j);
  return m;
}

}  // namespace

AlphaMatrix alpha_matrix_from(const ClassState& s) {
  return build_alpha(static_cast<int>(s.labels.size()),
                     [&](int i, int j) { return alpha_class(s, i, j); });
}

AlphaMatrix alpha_matrix_from(const DistanceState& s) {
  return build_alpha(static_cast<int>(s.positions.rows()),
                     [&](int i, int j) { return alpha_distance(s, i, j); });
}

AlphaMatrix alpha_matrix_from(const EigenState& s) {
  return build_alpha(static_cast<int>(s.vectors.rows()),
                     [&](int i, int j) { return alpha_eigen(s, i, j); });
}

AlphaMatrix complete_class_matrix(const ClassState& s) {
  AlphaMatrix m = alpha_matrix_from(s);
  Eigen::VectorXd diag(m.n);
  for (int i = 0; i < m.n; ++i) diag[i] = s.effects(s.labels[i], s.labels[i]);
  m.completion = std::move(diag);
  return m;
}

int numerical_rank(const Eigen::MatrixXd& m, double tol_factor) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = tol_factor * sv[0];
  if (sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += (sv[k] > cutoff);
  return rank;
}

std::pair<Eigen::MatrixXd, int> squared_distance_rank_check(
    const Eigen::MatrixXd& positions, double tol_factor) {
  const int n = static_cast<int>(positions.rows());
  const Eigen::VectorXd sq = positions.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq * Eigen::RowVectorXd::Ones(n);
  d2 += Eigen::VectorXd::Ones(n) * sq.transpose();
  d2 -= 2.0 * positions * positions.transpose();
  return {d2, numerical_rank(d2, tol_factor)};
}

EigenState sphere_embedding(const Eigen::MatrixXd& positions, double r) {
  const int n = static_cast<int>(positions.rows());
  const int k = static_cast<int>(positions.cols());
  const double max_sq = positions.rowwise().squaredNorm().maxCoeff();
  if (!(r * r > max_sq))
    throw std::invalid_argument("sphere_embedding: radius too small");
  EigenState s;
  s.vectors.resize(n, k + 1);
  s.vectors.leftCols(k) = positions;
  for (int i = 0; i < n; ++i)
    s.vectors(i, k) = std::sqrt(r * r - positions.row(i).squaredNorm());
  s.lambda = Eigen::VectorXd::Ones(k + 1);
  s.vec_mean = Eigen::VectorXd::Zero(k + 1);
  return s;
}

double order_agreement(const AlphaMatrix& a, const AlphaMatrix& b) {
  if (a.n != b.n) throw std::invalid_argument("order_agreement: size mismatch");
  const Eigen::Index m = a.upper.size();
  long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = p + 1; q < m; ++q) {
      const double da = a.upper[p] - a.upper[q];
      const double db = b.upper[p] - b.upper[q];
      if (da == 0.0 && db == 0.0) continue;  // joint ties drop out of tau-b
      if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double cd = static_cast<double>(concordant) + discordant;
  const double den = std::sqrt((cd + ties_a) * (cd + ties_b));
  if (den == 0.0) return 1.0;  // both sides constant
  return (static_cast<double>(concordant) - discordant) / den;
}

AlphaMatrix star_eigen_matrix(int n, double r) {
  if (n < 3) throw std::invalid_argument("star_eigen_matrix: need n >= 3");
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("star_eigen_matrix: r must lie in (0,1)");
  return build_alpha(n, [r](int i, int) { return i == 0 ? r : r * r; });
}

namespace {

// Hinge loss demanding d_{0,i} < d_{i,j} with a small margin; node 0 sits at
// the origin and p holds the remaining n-1 points.
double feasibility_loss_grad(const Eigen::MatrixXd& p, double margin,
                             Eigen::MatrixXd& grad) {
  const int m = static_cast<int>(p.rows());
  grad.setZero();
  double loss = 0.0;
  Eigen::VectorXd dh(m);  // hub distances
  for (int i = 0; i < m; ++i) dh[i] = p.row(i).norm() + 1e-12;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Eigen::RowVectorXd diff = p.row(i) - p.row(j);
      const double dij = diff.norm() + 1e-12;
      for (const int hub : {i, j}) {
        const double t = dh[hub] - dij + margin;
        if (t <= 0.0) continue;
        loss += t * t;
        grad.row(hub) += 2.0 * t * p.row(hub) / dh[hub];
        grad.row(i) -= 2.0 * t * diff / dij;
        grad.row(j) += 2.0 * t * diff / dij;
      }
    }
  }
  return loss;
}

double max_violation(const Eigen::MatrixXd& p) {
  const int m = static_cast<int>(p.rows());
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, p.row(i).norm());
  if (scale == 0.0) return 1.0;  // fully degenerate
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double dij = (p.row(i) - p.row(j)).norm();
      worst = std::max(worst, std::max(p.row(i).norm(), p.row(j).norm()) - dij);
    }
  return std::max(0.0, worst / scale);
}

}  // namespace

FeasibilityResult distance_feasibility_search(int n, int K, int restarts,
                                              std::uint64_t seed) {
  if (n < 3 || K < 1) throw std::invalid_argument("feasibility search: n >= 3, K >= 1");
  const int m = n - 1;
  const double margin = 0.1;
  FeasibilityResult best;
  best.best_violation = std::numeric_limits<double>::infinity();
  RngStream root(seed, 0xFEA5);
  for (int r = 0; r < restarts; ++r) {
    RngStream rng = root.substream(r);
    Eigen::MatrixXd p(m, K);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < K; ++k) p(i, k) = rng.normal();
    // Adam on the hinge loss.
    Eigen::MatrixXd grad(m, K), mom = Eigen::MatrixXd::Zero(m, K),
                    vel = Eigen::MatrixXd::Zero(m, K);
    const double lr = 0.03, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int it = 1; it <= 3000; ++it) {
      const double loss = feasibility_loss_grad(p, margin, grad);
      if (loss == 0.0) break;
      mom = b1 * mom + (1.0 - b1) * grad;
      vel = b2 * vel + (1.0 - b2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(b1, it), c2 = 1.0 - std::pow(b2, it);
      p.array() -= lr * (mom.array() / c1) / ((vel.array() / c2).sqrt() + eps);
    }
    const double viol = max_violation(p);
    if (viol < best.best_violation) {
      best.best_violation = viol;
      best.best_positions = Eigen::MatrixXd::Zero(n, K);
      best.best_positions.bottomRows(m) = p;
    }
    if (best.best_violation == 0.0) break;
  }
  return best;
}

bool TheoryReport::all_pass() const {
  for (const auto& item : items)
    if (!item.pass) return false;
  return true;
}

std::string TheoryReport::to_string() const {
  std::ostringstream out;
  for (const auto& item : items)
    out << (item.pass ? "PASS" : "FAIL") << ' ' << item.name
        << (item.detail.empty() ? "" : " (" + item.detail + ")") << '\n';
  out << (all_pass() ? "ALL PASS" : "FAILURES PRESENT") << '\n';
  return out.str();
}

TheoryReport run_theory_battery(std::uint64_t seed) {
  TheoryReport rep;
  RngStream rng(seed, 0x7E07);
  const auto add = [&rep](const std::string& name, bool pass, std::string detail = "") {
    rep.items.push_back({name, pass, std::move(detail)});
  };

  {  // (a) class completions have rank at most K
    bool ok = true;
    int worst = 0;
    for (int t = 0; t < 1000 && ok; ++t) {
      const int k = 1 + static_cast<int>(rng.uniform_below(5));
      const int n = k + 2 + static_cast<int>(rng.uniform_below(15));
      ClassState s;
      s.labels.resize(n);
      for (int i = 0; i < n; ++i)
        s.labels[i] = static_cast<int>(rng.uniform_below(k));
      s.effects.resize(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
          const double v = rng.normal();
          s.effects(a, b) = v;
          s.effects(b, a) = v;
        }
      const int rank = numerical_rank(complete_class_matrix(s).completed());
      worst = std::max(worst, rank - k);
      ok = ok && rank <= k;
    }
    add("class completion rank <= K over 1000 random draws", ok,
        "max rank excess " + std::to_string(worst));
  }

  {  // (b) squared-distance matrices have rank at most K+2
    bool ok = true;
    std::string detail;
    for (const int k : {1, 2, 3}) {
      Eigen::MatrixXd z(50, k);
      for (int i = 0; i < 50; ++i)
        for (int c = 0; c < k; ++c) z(i, c) = rng.normal();
      const auto [d2, rank] = squared_distance_rank_check(z);
      detail += "K=" + std::to_string(k) + ":rank=" + std::to_string(rank) + " ";
      ok = ok && rank <= k + 2;
    }
    add("squared-distance rank <= K+2 at n=50, K in {1,2,3}", ok, detail);
  }

  {  // (c) sphere embedding reproduces the distance ordering exactly
    Eigen::MatrixXd z(20, 2);
    for (int i = 0; i < 20; ++i)
      for (int c = 0; c < 2; ++c) z(i, c) = rng.normal();
    double max_norm = 0.0;
    for (int i = 0; i < 20; ++i) max_norm = std::max(max_norm, z.row(i).norm());
    DistanceState ds;
    ds.positions = z;
    ds.pos_var = Eigen::VectorXd::Ones(2);
    const AlphaMatrix neg_dist = alpha_matrix_from(ds);
    double smallest_exact = -1.0;
    for (const double mult : {2.0, 10.0, 100.0, 1000.0}) {
      const EigenState lifted = sphere_embedding(z, mult * max_norm);
      if (order_agreement(neg_dist, alpha_matrix_from(lifted)) == 1.0) {
        smallest_exact = mult;
        break;
      }
    }
    const EigenState lifted = sphere_embedding(z, 1000.0 * max_norm);
    const double tau = order_agreement(neg_dist, alpha_matrix_from(lifted));
    add("sphere embedding reaches Kendall tau 1 at r = 1e3 max|z|", tau == 1.0,
        "tau=" + std::to_string(tau) + ", smallest tested multiplier with tau=1: " +
            std::to_string(smallest_exact));
  }

  {  // (d) hub-versus-rest ordering of the rank-one kernel
    bool ok = true;
    for (int n = 3; n <= 50; ++n) {
      for (const double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const AlphaMatrix e = star_eigen_matrix(n, r);
        double min_hub = std::numeric_limits<double>::infinity();
        double max_rest = -std::numeric_limits<double>::infinity();
        for (int j = 1; j < n; ++j) min_hub = std::min(min_hub, e.entry(0, j));
        for (int i = 1; i < n; ++i)
          for (int j = i + 1; j < n; ++j) max_rest = std::max(max_rest, e.entry(i, j));
        ok = ok && min_hub > max_rest;
      }
    }
    add("star kernel ordering holds for all n <= 50", ok);
  }

  {  // (e) feasibility of the star ordering in low dimension
    const auto f31 = distance_feasibility_search(3, 1, 50, seed + 1);
    add("distance representation feasible at n=3, K=1",
        f31.best_violation == 0.0,
        "violation " + std::to_string(f31.best_violation));
    const auto f62 = distance_feasibility_search(6, 2, 50, seed + 2);
    add("distance representation feasible at n=6, K=2",
        f62.best_violation == 0.0,
        "violation " + std::to_string(f62.best_violation));
    const auto f72 = distance_feasibility_search(7, 2, 200, seed + 3);
    add("distance representation infeasible at n=7, K=2 (search floor > 0)",
        f72.best_violation > 0.0,
        "best violation " + std::to_string(f72.best_violation));
  }

  return rep;
}

}  // namespace latnet
