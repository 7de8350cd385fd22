#include <doctest.h>

#include <cmath>

#include "latnet/mcmc.hpp"
#include "latnet/simulate.hpp"
#include "latnet/stats.hpp"

using namespace latnet;

namespace {

Sociomatrix binary_matrix(int n, const std::vector<int>& values) {
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "v" + std::to_string(i);
  Eigen::VectorXi v(dyad_count(n));
  for (int d = 0; d < v.size(); ++d) v[d] = values[d];
  return Sociomatrix::all_observed(std::move(labels), std::move(v));
}

SamplerConfig tiny_config(std::uint64_t seed, int iterations = 10) {
  SamplerConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = iterations / 2;
  cfg.thin = 1;
  cfg.seed = seed;
  cfg.adapt = false;
  cfg.mh_step = 0.8;
  return cfg;
}

bool z_invariant_holds(const GibbsSampler& s) {
  const auto& st = s.state();
  for (int d = 0; d < st.z.size(); ++d) {
    const int l = s.level_at_dyad(d);
    if (l < 0) continue;
    if (!(st.globals.lower_cut(l) < st.z[d] && st.z[d] < st.globals.upper_cut(l)))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sample_z respects the truncation constraints") {
  const SimulationResult sim = simulate(ModelKind::eigen, 10, 2,
                                        SimulateParams{}, 5);
  GibbsSampler s(sim.y, DyadCovariates::none(10), ModelKind::eigen, 2,
                 tiny_config(1), PriorConfig{});
  s.init_for_data();
  for (int t = 0; t < 20; ++t) {
    s.sample_z();
    CHECK(z_invariant_holds(s));
  }
}

TEST_CASE("sample_z half-normal mean at a forced constraint") {
  // Single dyad with y = 1, eta = 0, cutpoint 0: z is half normal.
  const Sociomatrix y = binary_matrix(2, {1});
  GibbsSampler s(y, DyadCovariates::none(2), ModelKind::latent_class, 1,
                 tiny_config(3), PriorConfig{}, 2);
  // default state: effects = 0, thresholds = 0, so the mean is exact
  double sum = 0.0;
  const int rounds = 10000;
  for (int t = 0; t < rounds; ++t) {
    s.sample_z();
    CHECK(s.state().z[0] > 0.0);
    sum += s.state().z[0];
  }
  CHECK(std::fabs(sum / rounds - 0.79788456080286536) < 0.025);
}

TEST_CASE("thresholds stay ordered and feasible across sweeps") {
  std::vector<int> vals(dyad_count(8));
  for (std::size_t d = 0; d < vals.size(); ++d) vals[d] = static_cast<int>(d % 3);
  const Sociomatrix y = binary_matrix(8, vals);
  for (const auto kind :
       {ModelKind::latent_class, ModelKind::distance, ModelKind::eigen}) {
    GibbsSampler s(y, DyadCovariates::none(8), kind, 2, tiny_config(9),
                   PriorConfig{});
    s.init_for_data();
    for (int t = 0; t < 30; ++t) {
      s.sweep(t);
      const auto& th = s.state().globals.thresholds;
      CHECK(th.size() == 2);
      CHECK(th[0] < th[1]);
      CHECK(z_invariant_holds(s));
    }
  }
}

TEST_CASE("binary data keeps the cutpoint between the two z groups") {
  const SimulationResult sim = simulate(ModelKind::latent_class, 12, 2,
                                        SimulateParams{}, 17);
  GibbsSampler s(sim.y, DyadCovariates::none(12), ModelKind::latent_class, 2,
                 tiny_config(2), PriorConfig{});
  s.init_for_data();
  for (int t = 0; t < 20; ++t) {
    s.sample_z();
    s.sample_thresholds();
    double max0 = -1e300, min1 = 1e300;
    for (int d = 0; d < sim.y.dyad_count(); ++d) {
      if (s.level_at_dyad(d) == 0) max0 = std::max(max0, s.state().z[d]);
      else min1 = std::min(min1, s.state().z[d]);
    }
    const double cut = s.state().globals.thresholds[0];
    CHECK(cut > max0);
    CHECK(cut < min1);
  }
}

TEST_CASE("sample_beta is a no-op without covariates") {
  const SimulationResult sim = simulate(ModelKind::eigen, 6, 1, SimulateParams{}, 2);
  GibbsSampler s(sim.y, DyadCovariates::none(6), ModelKind::eigen, 1,
                 tiny_config(4), PriorConfig{});
  s.init_for_data();
  CHECK(s.state().globals.beta.size() == 0);
  s.sample_beta();
  CHECK(s.state().globals.beta.size() == 0);
}

TEST_CASE("sample_beta shrinks to zero under an overwhelming prior") {
  const int n = 10;
  const SimulationResult sim = simulate(ModelKind::latent_class, n, 1,
                                        SimulateParams{}, 3);
  RngStream xr(77);
  Eigen::MatrixXd xm(dyad_count(n), 1);
  for (int d = 0; d < xm.rows(); ++d) xm(d, 0) = xr.normal();
  PriorConfig prior;
  prior.beta_var = 1e-12;
  GibbsSampler s(sim.y, DyadCovariates(n, xm), ModelKind::latent_class, 1,
                 tiny_config(5), prior);
  s.init_for_data();
  for (int t = 0; t < 10; ++t) {
    s.sweep(t);
    CHECK(std::fabs(s.state().globals.beta[0]) < 1e-4);
  }
}

TEST_CASE("sample_beta recovers a known coefficient") {
  // y generated from beta = 1.5 with a flat kernel; the posterior must cover it.
  const int n = 60;
  RngStream gen(2024);
  Eigen::MatrixXd xm(dyad_count(n), 1);
  std::vector<int> vals(dyad_count(n));
  const double beta_true = 1.5;
  for (int d = 0; d < xm.rows(); ++d) {
    xm(d, 0) = gen.normal();
    vals[d] = beta_true * xm(d, 0) + gen.normal() > 0.0 ? 1 : 0;
  }
  const Sociomatrix y = binary_matrix(n, vals);
  SamplerConfig cfg = tiny_config(6, 5000);
  cfg.burn_in = 1000;
  GibbsSampler s(y, DyadCovariates(n, xm), ModelKind::latent_class, 1, cfg,
                 PriorConfig{});
  const Trace trace = s.run();
  // beta is the second scalar column (after the single threshold)
  double sum = 0.0, ss = 0.0;
  for (const auto& row : trace.scalars) {
    sum += row[1];
    ss += row[1] * row[1];
  }
  const double mean = sum / trace.recorded;
  const double sd = std::sqrt(std::max(ss / trace.recorded - mean * mean, 1e-12));
  CHECK(std::fabs(mean - beta_true) < 3.0 * sd + 0.05);
}

TEST_CASE("distance proposals freeze as the step vanishes") {
  const SimulationResult sim = simulate(ModelKind::distance, 12, 2,
                                        SimulateParams{}, 8);
  SamplerConfig cfg = tiny_config(7);
  cfg.mh_step = 1e-9;
  GibbsSampler s(sim.y, DyadCovariates::none(12), ModelKind::distance, 2, cfg,
                 PriorConfig{});
  s.init_for_data();
  const Eigen::MatrixXd before = std::get<DistanceState>(s.state().latent).positions;
  double acc = 0.0;
  const int sweeps = 20;
  for (int t = 0; t < sweeps; ++t) {
    s.update_latent();
    acc += s.sweep_acceptance();
  }
  CHECK(acc / sweeps > 0.95);
  const Eigen::MatrixXd after = std::get<DistanceState>(s.state().latent).positions;
  CHECK((after - before).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("burn-in adaptation lands in the target acceptance band") {
  SimulateParams params;
  params.clusters = 2;
  params.cluster_separation = 4.0;
  params.cluster_spread = 1.0;
  params.intercept = -1.0;
  const SimulationResult sim = simulate(ModelKind::distance, 80, 2, params, 11);
  SamplerConfig cfg;
  cfg.iterations = 1000;
  cfg.burn_in = 800;
  cfg.thin = 10;
  cfg.seed = 12;
  cfg.adapt = true;
  cfg.mh_step = 5.0;  // start far off
  const PriorConfig prior = calibrate_prior_alpha_variance(
      ModelKind::distance, 2, PriorConfig{}, 80);
  GibbsSampler s(sim.y, DyadCovariates::none(80), ModelKind::distance, 2, cfg,
                 prior);
  s.init_for_data();
  double post_acc = 0.0;
  int post_sweeps = 0;
  for (int t = 0; t < cfg.iterations; ++t) {
    s.sweep(t);
    if (t >= cfg.burn_in) {
      post_acc += s.sweep_acceptance();
      ++post_sweeps;
    }
  }
  const double rate = post_acc / post_sweeps;
  CHECK(rate > 0.2);
  CHECK(rate < 0.55);
}

TEST_CASE("class labels are inert at K=1 and recover planted blocks at K=2") {
  {
    const SimulationResult sim = simulate(ModelKind::latent_class, 10, 1,
                                          SimulateParams{}, 13);
    GibbsSampler s(sim.y, DyadCovariates::none(10), ModelKind::latent_class, 1,
                   tiny_config(14), PriorConfig{});
    s.init_for_data();
    for (int t = 0; t < 5; ++t) s.sweep(t);
    CHECK(std::get<ClassState>(s.state().latent).labels.maxCoeff() == 0);
  }
  {
    SimulateParams params;
    Eigen::MatrixXd m(2, 2);
    m << 3.0, -3.0, -3.0, 3.0;
    params.class_effects = m;
    const int n = 30;
    const SimulationResult sim = simulate(ModelKind::latent_class, n, 2, params, 15);
    const auto& truth = std::get<ClassState>(sim.latent).labels;
    GibbsSampler s(sim.y, DyadCovariates::none(n), ModelKind::latent_class, 2,
                   tiny_config(16), PriorConfig{});
    s.init_for_data();
    for (int t = 0; t < 100; ++t) s.sweep(t);
    const auto& found = std::get<ClassState>(s.state().latent).labels;
    int agree = 0;
    for (int i = 0; i < n; ++i) agree += (found[i] == truth[i]);
    const int best = std::max(agree, n - agree);  // up to label swap
    CHECK(best >= static_cast<int>(0.95 * n));
  }
}

TEST_CASE("eigen node update matches the hand-built single-dyad conditional") {
  // n=2, K=1: precision = 1/u_var + (lambda u_2)^2,
  // mean = (vec_mean/u_var + lambda u_2 r) / precision.
  const Sociomatrix y = binary_matrix(2, {1});
  PriorConfig prior;
  prior.u_var = 1.0;
  prior.vec_mean_var = 1.0;
  prior.lambda_var = 1.0;
  GibbsSampler s(y, DyadCovariates::none(2), ModelKind::eigen, 1,
                 tiny_config(18), prior, 2);
  const double u2 = 1.3, lam = 0.8, vm = 0.4, zval = 0.9;
  const double prec = 1.0 + (lam * u2) * (lam * u2);
  const double mean = (vm + lam * u2 * zval) / prec;
  double sum = 0.0, ssq = 0.0;
  const int rounds = 20000;
  for (int t = 0; t < rounds; ++t) {
    auto& st = s.state();
    auto& e = std::get<EigenState>(st.latent);
    e.vectors(0, 0) = 0.0;
    e.vectors(1, 0) = u2;
    e.lambda[0] = lam;
    e.vec_mean[0] = vm;
    st.z[0] = zval;
    s.update_latent();
    const double u1 = std::get<EigenState>(s.state().latent).vectors(0, 0);
    sum += u1;
    ssq += u1 * u1;
  }
  const double m = sum / rounds;
  const double v = ssq / rounds - m * m;
  CHECK(std::fabs(m - mean) < 4.0 / std::sqrt(prec * rounds));
  CHECK(v == doctest::Approx(1.0 / prec).epsilon(0.05));
}

TEST_CASE("eigen fit recovers the weight signs") {
  SimulateParams params;
  params.lambda = Eigen::Vector2d(3.0, -3.0);
  const SimulationResult sim = simulate(ModelKind::eigen, 40, 2, params, 19);
  SamplerConfig cfg;
  cfg.iterations = 1500;
  cfg.burn_in = 500;
  cfg.thin = 5;
  cfg.seed = 20;
  const PriorConfig prior =
      calibrate_prior_alpha_variance(ModelKind::eigen, 2, PriorConfig{}, 40);
  GibbsSampler s(sim.y, DyadCovariates::none(40), ModelKind::eigen, 2, cfg, prior);
  const Trace trace = s.run();
  // lambda columns follow the single threshold column
  double l1 = 0.0, l2 = 0.0;
  for (const auto& row : trace.scalars) {
    l1 += std::max(row[1], row[2]);
    l2 += std::min(row[1], row[2]);
  }
  CHECK(l1 / trace.recorded > 0.5);
  CHECK(l2 / trace.recorded < -0.5);
}

TEST_CASE("run_chain bookkeeping and bitwise determinism") {
  const SimulationResult sim = simulate(ModelKind::eigen, 12, 2, SimulateParams{}, 23);
  SamplerConfig cfg;
  cfg.iterations = 21;
  cfg.burn_in = 20;
  cfg.thin = 1;
  cfg.seed = 77;
  GibbsSampler a(sim.y, DyadCovariates::none(12), ModelKind::eigen, 2, cfg,
                 PriorConfig{});
  const Trace ta = a.run();
  CHECK(ta.recorded == 1);
  CHECK(static_cast<int>(ta.scalars.size()) == 1);

  cfg.iterations = 60;
  cfg.burn_in = 20;
  cfg.thin = 7;
  GibbsSampler b1(sim.y, DyadCovariates::none(12), ModelKind::eigen, 2, cfg,
                  PriorConfig{});
  GibbsSampler b2(sim.y, DyadCovariates::none(12), ModelKind::eigen, 2, cfg,
                  PriorConfig{});
  const Trace t1 = b1.run();
  const Trace t2 = b2.run();
  CHECK(t1.recorded == (60 - 20) / 7);
  CHECK(t1.theta_sum == t2.theta_sum);
  REQUIRE(t1.scalars.size() == t2.scalars.size());
  for (std::size_t k = 0; k < t1.scalars.size(); ++k)
    CHECK(t1.scalars[k] == t2.scalars[k]);
}

TEST_CASE("posterior predictive mean is the accumulator average") {
  Trace t;
  t.recorded = 10;
  t.theta_sum = Eigen::VectorXd::Constant(3, 7.0);
  const Eigen::VectorXd yhat = posterior_predictive_mean(t);
  for (int d = 0; d < 3; ++d) CHECK(yhat[d] == doctest::Approx(0.7));
  Trace empty;
  empty.theta_sum = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(posterior_predictive_mean(empty), std::runtime_error);
}

TEST_CASE("predictive mean agrees with direct monte carlo of y draws") {
  const SimulationResult sim = simulate(ModelKind::latent_class, 8, 2,
                                        SimulateParams{}, 29);
  SamplerConfig cfg;
  cfg.iterations = 2100;
  cfg.burn_in = 100;
  cfg.thin = 2;
  cfg.seed = 30;
  GibbsSampler s(sim.y, DyadCovariates::none(8), ModelKind::latent_class, 2,
                 cfg, PriorConfig{});
  s.init_for_data();
  const int dyads = sim.y.dyad_count();
  Eigen::VectorXd acc_theta = Eigen::VectorXd::Zero(dyads);
  Eigen::VectorXd acc_draws = Eigen::VectorXd::Zero(dyads);
  RngStream side(31);
  int recorded = 0;
  const int reps = 200;
  for (int t = 0; t < cfg.iterations; ++t) {
    s.sweep(t);
    if (t >= cfg.burn_in && (t - cfg.burn_in + 1) % cfg.thin == 0) {
      const Eigen::VectorXd theta = s.current_theta();
      acc_theta += theta;
      for (int d = 0; d < dyads; ++d)
        for (int r = 0; r < reps; ++r)
          acc_draws[d] += side.uniform01() < theta[d] ? 1.0 : 0.0;
      ++recorded;
    }
  }
  const Eigen::VectorXd est1 = acc_theta / recorded;
  const Eigen::VectorXd est2 = acc_draws / (static_cast<double>(recorded) * reps);
  for (int d = 0; d < dyads; ++d) CHECK(std::fabs(est1[d] - est2[d]) < 1e-2);
}

TEST_CASE("joint distribution check passes and is deterministic") {
  const JointCheckReport rep = joint_distribution_check(
      ModelKind::eigen, 6, 2, 2, 20000, 555);
  INFO("max |z| = ", rep.max_abs_z);
  CHECK(rep.pass(4.0));
  const JointCheckReport rep2 = joint_distribution_check(
      ModelKind::eigen, 6, 2, 2, 20000, 555);
  CHECK(rep.z_score == rep2.z_score);
}

TEST_CASE("joint distribution check flags a corrupted truncation") {
  const JointCheckReport rep = joint_distribution_check(
      ModelKind::latent_class, 6, 2, 2, 20000, 556, /*corrupt_sample_z=*/true);
  CHECK(rep.max_abs_z > 6.0);
}
