#include "latnet/mcmc.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "latnet/stats.hpp"

namespace latnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic k-means (farthest-point seeding, fixed Lloyd iterations) on
// the leading scaled eigenvectors of the binarized adjacency. Warm-starts
// the class labels; single-site label updates cannot cross between partition
// modes on their own, and a random start routinely lands in a poor one.
Eigen::VectorXi spectral_class_labels(int n, int k,
                                      const std::vector<int>& di,
                                      const std::vector<int>& dj,
                                      const std::vector<int>& level) {
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t d = 0; d < di.size(); ++d) {
    if (level[d] > 0) {
      adj(di[d], dj[d]) = 1.0;
      adj(dj[d], di[d]) = 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adj);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int p, int q) {
    return std::fabs(es.eigenvalues()[p]) > std::fabs(es.eigenvalues()[q]);
  });
  const int dims = std::min(k, n);
  Eigen::MatrixXd u(n, dims);
  for (int c = 0; c < dims; ++c)
    u.col(c) = es.eigenvectors().col(order[c]) * es.eigenvalues()[order[c]];
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(k, dims);
  int first = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    if (u.row(i).norm() > best) {
      best = u.row(i).norm();
      first = i;
    }
  }
  centers.row(0) = u.row(first);
  for (int c = 1; c < k; ++c) {
    int far = 0;
    double fd = -1.0;
    for (int i = 0; i < n; ++i) {
      double dmin = kInf;
      for (int b = 0; b < c; ++b)
        dmin = std::min(dmin, (u.row(i) - centers.row(b)).squaredNorm());
      if (dmin > fd) {
        fd = dmin;
        far = i;
      }
    }
    centers.row(c) = u.row(far);
  }
  Eigen::VectorXi labels(n);
  for (int it = 0; it < 25; ++it) {
    for (int i = 0; i < n; ++i) {
      int pick = 0;
      double bd = kInf;
      for (int c = 0; c < k; ++c) {
        const double d2 = (u.row(i) - centers.row(c)).squaredNorm();
        if (d2 < bd) {
          bd = d2;
          pick = c;
        }
      }
      labels[i] = pick;
    }
    for (int c = 0; c < k; ++c) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(dims);
      int cnt = 0;
      for (int i = 0; i < n; ++i) {
        if (labels[i] == c) {
          mean += u.row(i);
          ++cnt;
        }
      }
      if (cnt > 0) centers.row(c) = mean / cnt;
    }
  }
  return labels;
}

}  // namespace

void SamplerConfig::validate() const {
  if (iterations <= 0 || burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("sampler config: need 0 <= burn_in < iterations");
  if (thin < 1) throw std::invalid_argument("sampler config: thin must be >= 1");
  if (!(mh_step > 0.0)) throw std::invalid_argument("sampler config: mh_step must be positive");
}

Eigen::VectorXd posterior_predictive_mean(const Trace& trace) {
  if (trace.recorded == 0) throw std::runtime_error("empty trace");
  return trace.theta_sum / static_cast<double>(trace.recorded);
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "sample";
  for (const auto& name : trace.scalar_names) out << ',' << name;
  out << '\n';
  char buf[32];
  for (int s = 0; s < static_cast<int>(trace.scalars.size()); ++s) {
    out << s;
    for (Eigen::Index k = 0; k < trace.scalars[s].size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.10g", trace.scalars[s][k]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

GibbsSampler::GibbsSampler(Sociomatrix y, DyadCovariates x, ModelKind kind,
                           int K, SamplerConfig cfg, PriorConfig prior,
                           int level_count_override)
    : y_(std::move(y)),
      x_(std::move(x)),
      kind_(kind),
      K_(K),
      cfg_(cfg),
      prior_(prior.resolved(y_.node_count())),
      n_(y_.node_count()),
      dyads_(y_.dyad_count()) {
  cfg_.validate();
  if (K_ < 1) throw std::invalid_argument("K must be at least 1");
  if (x_.node_count() != n_)
    throw std::invalid_argument("covariates node count mismatch");
  level_count_ = level_count_override > 0
                     ? level_count_override
                     : static_cast<int>(y_.value_levels().size());
  if (level_count_ < 2)
    throw std::invalid_argument("need at least two observed value levels");
  level_.assign(dyads_, -1);
  di_.resize(dyads_);
  dj_.resize(dyads_);
  for (int d = 0; d < dyads_; ++d) {
    const auto [i, j] = y_.dyad_nodes(d);
    di_[d] = i;
    dj_[d] = j;
    if (y_.observed_at(d)) {
      const int l = level_count_override > 0 ? y_.value_at(d) : y_.level_at(d);
      if (l < 0 || l >= level_count_)
        throw std::invalid_argument("value outside the pinned sample space");
      level_[d] = l;
    }
  }
  st_.rng = RngStream(cfg_.seed, 0x6B17);
  st_.z = Eigen::VectorXd::Zero(dyads_);
  st_.globals.beta = Eigen::VectorXd::Zero(x_.dim());
  st_.globals.thresholds = Eigen::VectorXd::Zero(level_count_ - 1);
  alpha_ = Eigen::VectorXd::Zero(dyads_);
  xbeta_ = Eigen::VectorXd::Zero(dyads_);
  resid_ = Eigen::VectorXd::Zero(dyads_);
  mh_step_ = cfg_.mh_step;
  switch (kind_) {
    case ModelKind::latent_class: {
      ClassState s;
      s.labels = Eigen::VectorXi::Zero(n_);
      s.effects = Eigen::MatrixXd::Zero(K_, K_);
      st_.latent = std::move(s);
      break;
    }
    case ModelKind::distance: {
      DistanceState s;
      s.positions = Eigen::MatrixXd::Zero(n_, K_);
      s.pos_var = Eigen::VectorXd::Ones(K_);
      st_.latent = std::move(s);
      break;
    }
    case ModelKind::eigen: {
      EigenState s;
      s.vectors = Eigen::MatrixXd::Zero(n_, K_);
      s.lambda = Eigen::VectorXd::Zero(K_);
      s.vec_mean = Eigen::VectorXd::Zero(K_);
      st_.latent = std::move(s);
      break;
    }
  }
}

void GibbsSampler::ensure_alpha() {
  if (!alpha_dirty_) return;
  switch (kind_) {
    case ModelKind::latent_class: {
      const auto& s = std::get<ClassState>(st_.latent);
      for (int d = 0; d < dyads_; ++d)
        alpha_[d] = s.effects(s.labels[di_[d]], s.labels[dj_[d]]);
      break;
    }
    case ModelKind::distance: {
      const auto& s = std::get<DistanceState>(st_.latent);
      for (int d = 0; d < dyads_; ++d)
        alpha_[d] = -(s.positions.row(di_[d]) - s.positions.row(dj_[d])).norm();
      break;
    }
    case ModelKind::eigen: {
      const auto& s = std::get<EigenState>(st_.latent);
      for (int d = 0; d < dyads_; ++d)
        alpha_[d] = (s.vectors.row(di_[d]).array() * s.vectors.row(dj_[d]).array() *
                     s.lambda.transpose().array())
                        .sum();
      break;
    }
  }
  alpha_dirty_ = false;
}

void GibbsSampler::refresh_resid() { resid_ = st_.z - xbeta_; }

void GibbsSampler::sample_z() {
  ensure_alpha();
  const auto& g = st_.globals;
  for (int d = 0; d < dyads_; ++d) {
    const double mu = alpha_[d] + xbeta_[d];
    if (level_[d] < 0) {
      st_.z[d] = mu + st_.rng.normal();
      continue;
    }
    double lo = g.lower_cut(level_[d]);
    double hi = g.upper_cut(level_[d]);
    if (truncation_bug_) {
      // Wrong truncation side: mirrors the interval to the complement.
      if (std::isfinite(lo)) {
        hi = lo;
        lo = -kInf;
      } else {
        lo = hi;
        hi = kInf;
      }
    }
    st_.z[d] = truncated_normal_draw(mu, lo, hi, st_.rng);
  }
}

void GibbsSampler::sample_thresholds() {
  auto& g = st_.globals;
  const int levels = level_count_;
  std::vector<double> zmin(levels, kInf), zmax(levels, -kInf);
  for (int d = 0; d < dyads_; ++d) {
    if (level_[d] < 0) continue;
    zmin[level_[d]] = std::min(zmin[level_[d]], st_.z[d]);
    zmax[level_[d]] = std::max(zmax[level_[d]], st_.z[d]);
  }
  const double sd = std::sqrt(prior_.threshold_var);
  for (int t = 1; t < levels; ++t) {
    // Cutpoint t separates level t-1 from level t; the neighbors keep the
    // ordering when a level has no observations this round.
    double lo = zmax[t - 1];
    double hi = zmin[t];
    if (t >= 2) lo = std::max(lo, g.thresholds[t - 2]);
    if (t <= levels - 2) hi = std::min(hi, g.thresholds[t]);
    if (!(lo < hi)) {
      if (lo == -kInf && hi == kInf) {
        lo = -kInf;
      } else {
        throw std::logic_error("sample_thresholds: empty feasible interval");
      }
    }
    g.thresholds[t - 1] = sd * truncated_normal_draw(0.0, lo / sd, hi / sd, st_.rng);
  }
}

void GibbsSampler::sample_beta() {
  if (x_.dim() == 0) {
    refresh_resid();
    return;
  }
  ensure_alpha();
  const Eigen::MatrixXd& xm = x_.matrix();
  const Eigen::VectorXd response = st_.z - alpha_;
  Eigen::MatrixXd prec = xm.transpose() * xm;
  prec.diagonal().array() += 1.0 / prior_.beta_var;
  const Eigen::VectorXd rhs = xm.transpose() * response;
  const Eigen::VectorXd mean = prec.llt().solve(rhs);
  st_.globals.beta = mvn_draw(mean, prec, st_.rng);
  xbeta_ = xm * st_.globals.beta;
  refresh_resid();
}

void GibbsSampler::update_latent() {
  refresh_resid();
  switch (kind_) {
    case ModelKind::distance: update_u_distance(); break;
    case ModelKind::latent_class: update_u_class(); break;
    case ModelKind::eigen: update_u_eigen(); break;
  }
  alpha_dirty_ = true;
}

void GibbsSampler::update_u_distance() {
  auto& s = std::get<DistanceState>(st_.latent);
  int accepted = 0;
  Eigen::VectorXd prop(K_);
  for (int i = 0; i < n_; ++i) {
    for (int k = 0; k < K_; ++k)
      prop[k] = s.positions(i, k) + mh_step_ * st_.rng.normal();
    double dlog = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double r = resid_[dyad_index(n_, i, j)];
      const double dn = (prop.transpose() - s.positions.row(j)).norm();
      const double dc = (s.positions.row(i) - s.positions.row(j)).norm();
      dlog += -0.5 * ((r + dn) * (r + dn) - (r + dc) * (r + dc));
    }
    for (int k = 0; k < K_; ++k)
      dlog += -0.5 * (prop[k] * prop[k] - s.positions(i, k) * s.positions(i, k)) /
              s.pos_var[k];
    ++mh_proposals_;
    if (std::log(st_.rng.uniform01()) < dlog) {
      s.positions.row(i) = prop.transpose();
      ++accepted;
      ++mh_accepted_;
    }
  }
  last_acceptance_ = static_cast<double>(accepted) / n_;
  for (int k = 0; k < K_; ++k) {
    const double ssq = s.positions.col(k).squaredNorm();
    s.pos_var[k] = inverse_gamma_draw(prior_.pos_var_shape + 0.5 * n_,
                                      prior_.pos_var_rate + 0.5 * ssq, st_.rng);
  }
}

void GibbsSampler::update_u_class() {
  auto& s = std::get<ClassState>(st_.latent);
  const int K = K_;
  const int blocks = K * (K + 1) / 2;
  const auto bidx = [K](int a, int b) {
    if (a > b) std::swap(a, b);
    return a * K - a * (a - 1) / 2 + (b - a);
  };
  // Sufficient statistics per unordered class pair: count and residual sum.
  std::vector<double> nb(blocks, 0.0), sb(blocks, 0.0);
  std::vector<double> csize(K, 0.0);
  for (int i = 0; i < n_; ++i) csize[s.labels[i]] += 1.0;
  for (int d = 0; d < dyads_; ++d) {
    const int b = bidx(s.labels[di_[d]], s.labels[dj_[d]]);
    nb[b] += 1.0;
    sb[b] += resid_[d];
  }
  const double v = s.m_var;
  const double conc = prior_.label_conc;
  // Marginal block score with the effects entry integrated out under its
  // normal(0, v) prior; terms constant across candidates are dropped.
  const auto block_score = [v](double cnt, double sum) {
    return -0.5 * std::log(v * cnt + 1.0) + 0.5 * v * sum * sum / (v * cnt + 1.0);
  };
  std::vector<double> cnt(K), rsum(K), score(K);
  for (int i = 0; i < n_; ++i) {
    std::fill(cnt.begin(), cnt.end(), 0.0);
    std::fill(rsum.begin(), rsum.end(), 0.0);
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      const int c = s.labels[j];
      cnt[c] += 1.0;
      rsum[c] += resid_[dyad_index(n_, i, j)];
    }
    const int old = s.labels[i];
    csize[old] -= 1.0;
    for (int c = 0; c < K; ++c) {
      nb[bidx(old, c)] -= cnt[c];
      sb[bidx(old, c)] -= rsum[c];
    }
    double best = -kInf;
    for (int a = 0; a < K; ++a) {
      // Collapsed class-proportion prior plus the collapsed-effects blocks.
      double sc = std::log(csize[a] + conc);
      for (int c = 0; c < K; ++c) {
        const int b = bidx(a, c);
        sc += block_score(nb[b] + cnt[c], sb[b] + rsum[c]) - block_score(nb[b], sb[b]);
      }
      score[a] = sc;
      best = std::max(best, sc);
    }
    double total = 0.0;
    for (int a = 0; a < K; ++a) {
      score[a] = std::exp(score[a] - best);
      total += score[a];
    }
    const double u = st_.rng.uniform01() * total;
    double acc = 0.0;
    int pick = K - 1;
    for (int a = 0; a < K; ++a) {
      acc += score[a];
      if (u <= acc) {
        pick = a;
        break;
      }
    }
    s.labels[i] = pick;
    csize[pick] += 1.0;
    for (int c = 0; c < K; ++c) {
      nb[bidx(pick, c)] += cnt[c];
      sb[bidx(pick, c)] += rsum[c];
    }
  }
  // Conjugate refresh of the effects matrix, then its entry variance.
  for (int a = 0; a < K; ++a) {
    for (int b = a; b < K; ++b) {
      const int k = bidx(a, b);
      const double prec = nb[k] + 1.0 / v;
      const double mean = sb[k] / prec;
      const double draw = mean + st_.rng.normal() / std::sqrt(prec);
      s.effects(a, b) = draw;
      s.effects(b, a) = draw;
    }
  }
  double ssq = 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = a; b < K; ++b) ssq += s.effects(a, b) * s.effects(a, b);
  s.m_var = inverse_gamma_draw(prior_.m_var_shape + 0.25 * K * (K + 1),
                               prior_.m_var_rate + 0.5 * ssq, st_.rng);
}

void GibbsSampler::update_u_eigen() {
  auto& s = std::get<EigenState>(st_.latent);
  const int K = K_;
  Eigen::MatrixXd w = s.vectors * s.lambda.asDiagonal();  // n x K
  Eigen::MatrixXd gram = w.transpose() * w;
  const double prior_prec = 1.0 / prior_.u_var;
  for (int i = 0; i < n_; ++i) {
    const Eigen::VectorXd wi = w.row(i).transpose();
    Eigen::MatrixXd prec = gram - wi * wi.transpose();
    prec.diagonal().array() += prior_prec;
    Eigen::VectorXd rhs = s.vec_mean * prior_prec;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      rhs += w.row(j).transpose() * resid_[dyad_index(n_, i, j)];
    }
    const Eigen::VectorXd mean = prec.llt().solve(rhs);
    const Eigen::VectorXd draw = mvn_draw(mean, prec, st_.rng);
    gram -= wi * wi.transpose();
    s.vectors.row(i) = draw.transpose();
    w.row(i) = (draw.array() * s.lambda.array()).transpose();
    gram += w.row(i).transpose() * w.row(i);
  }
  if (prior_.vec_mean_var > 0.0) {
    const double prec = 1.0 / prior_.vec_mean_var + n_ * prior_prec;
    for (int k = 0; k < K; ++k) {
      const double mean = prior_prec * s.vectors.col(k).sum() / prec;
      s.vec_mean[k] = mean + st_.rng.normal() / std::sqrt(prec);
    }
  }
  // Weighted-inner-product weights: regression of residuals on the K
  // elementwise products over all dyads.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd q(K);
  for (int d = 0; d < dyads_; ++d) {
    q = (s.vectors.row(di_[d]).array() * s.vectors.row(dj_[d]).array()).transpose();
    a.noalias() += q * q.transpose();
    b.noalias() += q * resid_[d];
  }
  a.diagonal().array() += 1.0 / prior_.lambda_var;
  const Eigen::VectorXd mean = a.llt().solve(b);
  s.lambda = mvn_draw(mean, a, st_.rng);
}

void GibbsSampler::draw_latent_from_prior() {
  switch (kind_) {
    case ModelKind::latent_class: {
      auto& s = std::get<ClassState>(st_.latent);
      s.m_var = inverse_gamma_draw(prior_.m_var_shape, prior_.m_var_rate, st_.rng);
      // Polya-urn draw of the Dirichlet compound multinomial labels.
      std::vector<double> urn(K_, prior_.label_conc);
      double total = K_ * prior_.label_conc;
      for (int i = 0; i < n_; ++i) {
        double u = st_.rng.uniform01() * total;
        int pick = K_ - 1;
        for (int c = 0; c < K_; ++c) {
          u -= urn[c];
          if (u <= 0.0) {
            pick = c;
            break;
          }
        }
        s.labels[i] = pick;
        urn[pick] += 1.0;
        total += 1.0;
      }
      for (int a = 0; a < K_; ++a)
        for (int b = a; b < K_; ++b) {
          const double m = std::sqrt(s.m_var) * st_.rng.normal();
          s.effects(a, b) = m;
          s.effects(b, a) = m;
        }
      break;
    }
    case ModelKind::distance: {
      auto& s = std::get<DistanceState>(st_.latent);
      for (int k = 0; k < K_; ++k)
        s.pos_var[k] = inverse_gamma_draw(prior_.pos_var_shape, prior_.pos_var_rate, st_.rng);
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < K_; ++k)
          s.positions(i, k) = std::sqrt(s.pos_var[k]) * st_.rng.normal();
      break;
    }
    case ModelKind::eigen: {
      auto& s = std::get<EigenState>(st_.latent);
      for (int k = 0; k < K_; ++k)
        s.vec_mean[k] = prior_.vec_mean_var > 0.0
                            ? std::sqrt(prior_.vec_mean_var) * st_.rng.normal()
                            : 0.0;
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < K_; ++k)
          s.vectors(i, k) = s.vec_mean[k] + std::sqrt(prior_.u_var) * st_.rng.normal();
      for (int k = 0; k < K_; ++k)
        s.lambda[k] = std::sqrt(prior_.lambda_var) * st_.rng.normal();
      break;
    }
  }
  alpha_dirty_ = true;
}

void GibbsSampler::init_for_data() {
  auto& g = st_.globals;
  // Cutpoints at standard-normal quantiles of the empirical level mix.
  std::vector<int> count(level_count_, 0);
  int total = 0;
  for (int d = 0; d < dyads_; ++d) {
    if (level_[d] < 0) continue;
    ++count[level_[d]];
    ++total;
  }
  double cum = 0.0;
  for (int t = 1; t < level_count_; ++t) {
    cum += count[t - 1];
    const double frac = std::min(std::max(cum / std::max(total, 1), 1e-8), 1.0 - 1e-8);
    g.thresholds[t - 1] = std_normal_quantile(frac);
  }
  for (int t = 1; t + 1 < level_count_; ++t)
    if (!(g.thresholds[t] > g.thresholds[t - 1]))
      g.thresholds[t] = g.thresholds[t - 1] + 1e-6;
  g.beta.setZero();
  xbeta_.setZero();
  draw_latent_from_prior();
  if (kind_ == ModelKind::latent_class && K_ > 1)
    std::get<ClassState>(st_.latent).labels =
        spectral_class_labels(n_, K_, di_, dj_, level_);
  mh_step_ = cfg_.mh_step;
  sample_z();
}

void GibbsSampler::init_from_prior() {
  auto& g = st_.globals;
  std::vector<double> cuts(level_count_ - 1);
  const double sd = std::sqrt(prior_.threshold_var);
  for (auto& c : cuts) c = sd * st_.rng.normal();
  std::sort(cuts.begin(), cuts.end());
  for (int t = 0; t + 1 < level_count_; ++t) g.thresholds[t] = cuts[t];
  if (x_.dim() > 0) {
    for (Eigen::Index k = 0; k < g.beta.size(); ++k)
      g.beta[k] = std::sqrt(prior_.beta_var) * st_.rng.normal();
    xbeta_ = x_.matrix() * g.beta;
  }
  draw_latent_from_prior();
}

void GibbsSampler::redraw_data() {
  ensure_alpha();
  const auto& g = st_.globals;
  const double* cuts = g.thresholds.data();
  const int ncuts = level_count_ - 1;
  for (int d = 0; d < dyads_; ++d) {
    const double z = alpha_[d] + xbeta_[d] + st_.rng.normal();
    st_.z[d] = z;
    const int level = static_cast<int>(std::upper_bound(cuts, cuts + ncuts, z) - cuts);
    level_[d] = level;
  }
}

void GibbsSampler::sweep(int sweep_index) {
  sample_z();
  sample_thresholds();
  sample_beta();
  update_latent();
  if (kind_ == ModelKind::distance && cfg_.adapt && sweep_index < cfg_.burn_in) {
    // Robbins-Monro on the log proposal scale toward 0.35 acceptance,
    // frozen after burn-in so the stationary distribution is untouched.
    const double gain = std::pow(static_cast<double>(sweep_index + 1), -0.6);
    double ls = std::log(mh_step_) + gain * (last_acceptance_ - 0.35);
    ls = std::min(std::max(ls, -7.0), 3.0);
    mh_step_ = std::exp(ls);
  }
}

Eigen::VectorXd GibbsSampler::current_theta() {
  ensure_alpha();
  const double c1 = st_.globals.thresholds[0];
  Eigen::VectorXd theta(dyads_);
  for (int d = 0; d < dyads_; ++d)
    theta[d] = std_normal_cdf(alpha_[d] + xbeta_[d] - c1);
  return theta;
}

void GibbsSampler::record(Trace& trace) {
  trace.theta_sum += current_theta();
  Eigen::VectorXd row(static_cast<int>(trace.scalar_names.size()));
  int k = 0;
  for (Eigen::Index t = 0; t < st_.globals.thresholds.size(); ++t)
    row[k++] = st_.globals.thresholds[t];
  for (Eigen::Index t = 0; t < st_.globals.beta.size(); ++t)
    row[k++] = st_.globals.beta[t];
  switch (kind_) {
    case ModelKind::latent_class:
      row[k++] = std::get<ClassState>(st_.latent).m_var;
      break;
    case ModelKind::distance: {
      const auto& s = std::get<DistanceState>(st_.latent);
      for (int t = 0; t < K_; ++t) row[k++] = s.pos_var[t];
      break;
    }
    case ModelKind::eigen: {
      const auto& s = std::get<EigenState>(st_.latent);
      for (int t = 0; t < K_; ++t) row[k++] = s.lambda[t];
      for (int t = 0; t < K_; ++t) row[k++] = s.vec_mean[t];
      break;
    }
  }
  trace.scalars.push_back(std::move(row));
  ++trace.recorded;
}

Trace GibbsSampler::run() {
  Trace trace;
  trace.theta_sum = Eigen::VectorXd::Zero(dyads_);
  for (int t = 1; t < level_count_; ++t)
    trace.scalar_names.push_back("threshold_" + std::to_string(t));
  for (int t = 0; t < x_.dim(); ++t)
    trace.scalar_names.push_back("beta_" + std::to_string(t + 1));
  switch (kind_) {
    case ModelKind::latent_class:
      trace.scalar_names.push_back("m_var");
      break;
    case ModelKind::distance:
      for (int t = 0; t < K_; ++t)
        trace.scalar_names.push_back("pos_var_" + std::to_string(t + 1));
      break;
    case ModelKind::eigen:
      for (int t = 0; t < K_; ++t)
        trace.scalar_names.push_back("lambda_" + std::to_string(t + 1));
      for (int t = 0; t < K_; ++t)
        trace.scalar_names.push_back("vec_mean_" + std::to_string(t + 1));
      break;
  }
  init_for_data();
  for (int s = 0; s < cfg_.iterations; ++s) {
    sweep(s);
    if (s >= cfg_.burn_in && (s - cfg_.burn_in + 1) % cfg_.thin == 0)
      record(trace);
  }
  trace.mh_proposals = mh_proposals_;
  trace.mh_accepted = mh_accepted_;
  return trace;
}

std::vector<std::string> GibbsSampler::harness_stat_names() const {
  std::vector<std::string> names{"mean_level", "frac_top", "cut_1"};
  if (level_count_ > 2) names.push_back("cut_last");
  names.push_back("mean_phi_alpha");
  switch (kind_) {
    case ModelKind::latent_class:
      names.insert(names.end(), {"log_m_var", "std_effect_00"});
      break;
    case ModelKind::distance:
      names.insert(names.end(), {"mean_log_pos_var", "mean_log1p_usq"});
      break;
    case ModelKind::eigen:
      names.insert(names.end(),
                   {"mean_lambda", "mean_lambda_sq", "vec_mean_1", "mean_usq"});
      break;
  }
  return names;
}

Eigen::VectorXd GibbsSampler::harness_stats() {
  ensure_alpha();
  std::vector<double> out;
  double mean_level = 0.0, frac_top = 0.0;
  for (int d = 0; d < dyads_; ++d) {
    mean_level += level_[d];
    frac_top += (level_[d] == level_count_ - 1);
  }
  out.push_back(mean_level / dyads_);
  out.push_back(frac_top / dyads_);
  out.push_back(st_.globals.thresholds[0]);
  if (level_count_ > 2) out.push_back(st_.globals.thresholds[level_count_ - 2]);
  double mp = 0.0;
  for (int d = 0; d < dyads_; ++d) mp += std_normal_cdf(alpha_[d]);
  out.push_back(mp / dyads_);
  switch (kind_) {
    case ModelKind::latent_class: {
      const auto& s = std::get<ClassState>(st_.latent);
      out.push_back(std::log(s.m_var));
      out.push_back(s.effects(0, 0) / std::sqrt(s.m_var));
      break;
    }
    case ModelKind::distance: {
      const auto& s = std::get<DistanceState>(st_.latent);
      out.push_back(s.pos_var.array().log().mean());
      out.push_back((s.positions.rowwise().squaredNorm().array() + 1.0).log().mean());
      break;
    }
    case ModelKind::eigen: {
      const auto& s = std::get<EigenState>(st_.latent);
      out.push_back(s.lambda.mean());
      out.push_back(s.lambda.squaredNorm() / K_);
      out.push_back(s.vec_mean[0]);
      out.push_back(s.vectors.squaredNorm() / (n_ * K_));
      break;
    }
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<int>(out.size()));
}

JointCheckReport joint_distribution_check(ModelKind kind, int n, int K,
                                          int level_count, int rounds,
                                          std::uint64_t seed,
                                          bool corrupt_sample_z) {
  if (n > 8 || K > 2)
    throw std::invalid_argument("joint_distribution_check: keep n <= 8, K <= 2");
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "v" + std::to_string(i);
  Eigen::VectorXi values(dyad_count(n));
  for (int d = 0; d < values.size(); ++d) values[d] = d % level_count;
  const Sociomatrix y0 = Sociomatrix::all_observed(labels, values);
  const DyadCovariates x = DyadCovariates::none(n);
  SamplerConfig cfg;
  cfg.iterations = 2;
  cfg.burn_in = 1;
  cfg.thin = 1;
  cfg.mh_step = 1.0;
  cfg.adapt = false;
  PriorConfig prior;
  prior.threshold_var = 1.0;
  prior.lambda_var = 1.0;

  cfg.seed = mix_seed(seed, 1);
  GibbsSampler forward(y0, x, kind, K, cfg, prior, level_count);
  cfg.seed = mix_seed(seed, 2);
  GibbsSampler successive(y0, x, kind, K, cfg, prior, level_count);
  if (corrupt_sample_z) successive.enable_truncation_bug();

  const auto names = forward.harness_stat_names();
  const int m = static_cast<int>(names.size());
  Eigen::VectorXd fsum = Eigen::VectorXd::Zero(m), fss = Eigen::VectorXd::Zero(m);
  for (int r = 0; r < rounds; ++r) {
    forward.init_from_prior();
    forward.redraw_data();
    const Eigen::VectorXd st = forward.harness_stats();
    fsum += st;
    fss += st.cwiseProduct(st);
  }
  const Eigen::VectorXd fmean = fsum / rounds;
  const Eigen::VectorXd fvar = (fss / rounds - fmean.cwiseProduct(fmean)).cwiseMax(0.0);

  // Successive-conditional simulation; batch means absorb autocorrelation.
  const int batches = 100;
  const int batch_len = rounds / batches;
  successive.init_from_prior();
  successive.redraw_data();
  Eigen::MatrixXd bmean = Eigen::MatrixXd::Zero(batches, m);
  try {
    for (int b = 0; b < batches; ++b) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
      for (int r = 0; r < batch_len; ++r) {
        successive.sweep(1 << 20);  // never in the adaptive phase
        successive.redraw_data();
        acc += successive.harness_stats();
      }
      bmean.row(b) = (acc / batch_len).transpose();
    }
  } catch (const std::logic_error&) {
    // A broken update drove the chain state outside its own invariants;
    // maximal discrepancy by definition.
    JointCheckReport rep;
    rep.stat_names = names;
    rep.forward_mean = fmean;
    rep.successive_mean = Eigen::VectorXd::Constant(m, std::nan(""));
    rep.z_score =
        Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    rep.max_abs_z = std::numeric_limits<double>::infinity();
    return rep;
  }
  const Eigen::VectorXd smean = bmean.colwise().mean().transpose();
  Eigen::VectorXd svar(m);
  for (int k = 0; k < m; ++k)
    svar[k] = (bmean.col(k).array() - smean[k]).square().sum() / (batches - 1);

  JointCheckReport rep;
  rep.stat_names = names;
  rep.forward_mean = fmean;
  rep.successive_mean = smean;
  rep.z_score.resize(m);
  for (int k = 0; k < m; ++k) {
    const double se2 = fvar[k] / rounds + svar[k] / batches;
    rep.z_score[k] = (fmean[k] - smean[k]) / std::sqrt(std::max(se2, 1e-300));
    rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(rep.z_score[k]));
  }
  return rep;
}

}  // namespace latnet
