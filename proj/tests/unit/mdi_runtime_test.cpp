#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "mdi/markov_analysis.hpp"
#include "mdi/mdi_runtime.hpp"
#include "oracles.hpp"

using namespace mdi;

namespace {

const QuantizerConfig kCfg = QuantizerConfig::uniform(-0.2, 0.2, 5, -0.3, 0.3, 7);

std::shared_ptr<const TransitionModel> dense_model(std::uint64_t seed, std::size_t samples = 200000) {
  std::mt19937_64 rng(seed);
  return std::make_shared<const TransitionModel>(oracle::sample_model(oracle::dense_chain(kCfg, rng), samples, rng));
}

EpochFeedback ack(double delay) {
  EpochFeedback f;
  f.mean_delay_ms = delay;
  f.min_delay_ms = 40;
  f.acked_pkts = 5;
  return f;
}

/// Brings the controller past bootstrap with window w at delay 100.
MdiController primed(std::shared_ptr<const TransitionModel> m, double w, MdiParams p = {}) {
  p.w_init = w;
  MdiController c(std::move(m), p);
  c.start();
  c.on_epoch(ack(100));
  c.on_epoch(ack(100));
  return c;
}

}  // namespace

TEST(InvertWHat, Examples) {
  EXPECT_NEAR(invert_w_hat(1.30103, 10), 20.0, 1e-4);
  EXPECT_NEAR(invert_w_hat(-0.349485, 10), 5.0, 1e-4);
  EXPECT_NEAR(invert_w_hat(0.0, 10), 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(invert_w_hat(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(invert_w_hat(-5.0, 1.0), 1.0);
}

TEST(InvertWHat, RoundTripOnReachableTargets) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> wp(1.0, 500.0), t(-2.0, 3.0);
  for (int i = 0; i < 5000; ++i) {
    const double w_prev = wp(rng);
    const double target = t(rng);
    const double lo = w_hat_argmin(w_prev);
    if (target <= compute_w_hat(lo, w_prev)) continue;
    const double w = invert_w_hat(target, w_prev);
    ASSERT_GE(w, 1.0);
    ASSERT_NEAR(compute_w_hat(w, w_prev), target, 1e-6) << w_prev << " " << target;
  }
}

TEST(InvertWHat, UnreachableDecreaseReturnsDeepestWindow) {
  const double lo = w_hat_argmin(10);
  // w (ln w + 1) = w_prev at the minimum of the composite
  EXPECT_NEAR(lo * (std::log(lo) + 1.0), 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(invert_w_hat(-5.0, 10), lo);
  EXPECT_LE(compute_w_hat(lo, 10), compute_w_hat(lo * 1.01, 10));
  EXPECT_LE(compute_w_hat(lo, 10), compute_w_hat(lo * 0.99, 10));
}

TEST(SampleRow, InverseCdf) {
  const std::vector<double> row{0.0, 0.25, 0.0, 0.75};
  EXPECT_EQ(sample_row(row, 0.0), 1u);
  EXPECT_EQ(sample_row(row, 0.2499), 1u);
  EXPECT_EQ(sample_row(row, 0.25), 3u);
  EXPECT_EQ(sample_row(row, 0.9999999999999999), 3u);
  EXPECT_THROW(sample_row({}, 0.5), std::invalid_argument);
}

TEST(SampleRow, FrequencyWithinThreeSigma) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> row{0.25, 0.75};
  const int n = 10000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += sample_row(row, u(rng)) == 0 ? 1 : 0;
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  EXPECT_NEAR(hits, n * 0.25, 3 * sigma);
}

TEST(MdiParams, Validation) {
  MdiParams p;
  p.c1 = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.c2 = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.w_init = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  TransitionModel raw(kCfg);
  EXPECT_THROW(MdiController(std::make_shared<const TransitionModel>(raw)), std::invalid_argument);
}

TEST(MdiController, BootstrapHoldsInitialWindow) {
  MdiParams p;
  p.w_init = 7;
  MdiController c(dense_model(1), p);
  EXPECT_EQ(c.start().window_pkts, 7.0);
  EpochFeedback none;
  EXPECT_EQ(c.on_epoch(none).window_pkts, 7.0);
  EXPECT_EQ(c.on_epoch(ack(80)).window_pkts, 7.0);
  EXPECT_FALSE(c.state());
  EXPECT_EQ(c.on_epoch(ack(80)).window_pkts, 7.0);
  ASSERT_TRUE(c.state());
  EXPECT_EQ(c.diagnostics().bootstrap, 3u);
}

TEST(MdiController, BoundaryMultipliers) {
  auto c = primed(dense_model(2), 10);
  // far below range: 100 -> 10 ms
  EXPECT_DOUBLE_EQ(c.on_epoch(ack(10)).window_pkts, 12.5);
  auto d = primed(dense_model(2), 10);
  EXPECT_DOUBLE_EQ(d.on_epoch(ack(1000)).window_pkts, 8.0);
  EXPECT_EQ(d.diagnostics().boundary_down, 1u);
  // the next in-range observation resumes the walk from a valid state
  ASSERT_TRUE(d.state());
  EXPECT_LT(d.state()->d_idx, kCfg.n_d());
  d.on_epoch(ack(1000));
  EXPECT_EQ(d.diagnostics().sampled, 1u);
}

TEST(MdiController, ZeroAckEpochHoldsWindow) {
  auto c = primed(dense_model(3), 10);
  EpochFeedback stall;
  stall.mean_delay_ms = 100;
  const double before = c.window();
  EXPECT_EQ(c.on_epoch(stall).window_pkts, before);
  EXPECT_EQ(c.diagnostics().zero_ack, 1u);
}

TEST(MdiController, EmptyRowFallsBackToHold) {
  TransitionModel m(kCfg);
  m.add({0, 0}, {0, 0});
  m.normalize();
  auto c = primed(std::make_shared<const TransitionModel>(m), 10);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(c.on_epoch(ack(100)).window_pkts, 10.0);
  EXPECT_EQ(c.diagnostics().fallback, 20u);
  EXPECT_DOUBLE_EQ(c.diagnostics().fallback_fraction(), 20.0 / 22.0);
}

TEST(MdiController, HoldReanchorsToNearestTrainedWindowBucket) {
  const std::size_t r = bucket_of(0.0, kCfg.d_hat_edges());
  const std::size_t top = kCfg.n_w() - 1;
  TransitionModel m(kCfg);
  m.add({r, top}, {r, top});
  m.normalize();
  auto c = primed(std::make_shared<const TransitionModel>(m), 10);
  ASSERT_TRUE(c.state());
  EXPECT_EQ(*c.state(), (StateIndex{r, top}));
  EXPECT_GT(c.on_epoch(ack(100)).window_pkts, 10.0);
  EXPECT_EQ(c.diagnostics().sampled, 1u);
  EXPECT_EQ(c.diagnostics().fallback, 0u);
}

TEST(MdiController, OneHotZeroBucketKeepsWindowNearConstant) {
  // every quadrant row puts all mass on the w_hat bucket containing 0
  const std::size_t zero = bucket_of(0.0, kCfg.w_hat_edges());
  TransitionModel m(kCfg);
  for (std::size_t f = 0; f < kCfg.n_states(); ++f) {
    for (std::size_t r = 0; r < kCfg.n_d(); ++r) m.add(kCfg.unflat(f), {r, zero});
  }
  m.normalize();
  auto c = primed(std::make_shared<const TransitionModel>(m), 20);
  const double mid = w_hat_midpoint(zero, kCfg);
  ASSERT_NEAR(mid, 0.0, 1e-12);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(c.on_epoch(ack(100)).window_pkts, 20.0, 1e-6);
}

TEST(MdiController, Deterministic) {
  auto m = dense_model(5);
  MdiParams p;
  p.seed = 99;
  auto a = primed(m, 10, p);
  auto b = primed(m, 10, p);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(80, 120);
  for (int i = 0; i < 500; ++i) {
    const auto f = ack(d(rng));
    ASSERT_EQ(a.on_epoch(f).window_pkts, b.on_epoch(f).window_pkts);
  }
}

TEST(GuidedWalk, FollowsQuadrantRows) {
  auto m = dense_model(6);
  MdiParams p;
  p.seed = 17;
  p.w_init = 30;
  MdiController c(m, p);
  std::mt19937_64 rng(18);
  const auto walk = oracle::drive_guided_walk(c, *m, 60000, rng);

  // Pool every (k, l, r) context with enough visits into one chi-square.
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<std::uint64_t>> seen;
  for (std::size_t i = 0; i < walk.states.size(); ++i) {
    const auto& s = walk.states[i];
    ASSERT_EQ(s.d_idx, walk.observed_r[i]);
    auto& counts = seen[std::make_tuple(walk.from[i].d_idx, walk.from[i].w_idx, s.d_idx)];
    counts.resize(kCfg.n_w());
    ++counts[s.w_idx];
  }
  double chi2 = 0.0;
  std::size_t dof = 0;
  for (const auto& [key, counts] : seen) {
    std::uint64_t n = 0;
    for (auto x : counts) n += x;
    if (n < 200) continue;
    const auto row = m->quadrant_row({std::get<0>(key), std::get<1>(key)}, std::get<2>(key));
    for (std::size_t v = 0; v < counts.size(); ++v) {
      const double e = row[v] * static_cast<double>(n);
      if (e < 5.0) continue;
      chi2 += (static_cast<double>(counts[v]) - e) * (static_cast<double>(counts[v]) - e) / e;
      ++dof;
    }
    --dof;
  }
  ASSERT_GT(dof, 50u);
  // Wilson-Hilferty upper 1% point of chi-square(dof).
  const double k = static_cast<double>(dof);
  const double crit = k * std::pow(1.0 - 2.0 / (9.0 * k) + 2.326 * std::sqrt(2.0 / (9.0 * k)), 3.0);
  EXPECT_LT(chi2, crit);
}

TEST(GuidedWalk, EmpiricalMatchesStationary) {
  auto m = dense_model(7);
  MdiParams p;
  p.seed = 23;
  p.w_init = 30;
  MdiController c(m, p);
  std::mt19937_64 rng(24);
  const auto walk = oracle::drive_guided_walk(c, *m, 10000, rng);
  std::vector<double> hist(kCfg.n_states(), 0.0);
  for (const auto& s : walk.states) hist[kCfg.flat(s)] += 1.0;
  for (auto& h : hist) h /= static_cast<double>(walk.states.size());
  const auto pi = stationary(to_stochastic(*m));
  EXPECT_LE(kl_divergence(pi, StateDistribution(hist)), 0.5);
}
