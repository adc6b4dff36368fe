#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "mdi/trainer.hpp"
#include "oracles.hpp"

using namespace mdi;

namespace {

const QuantizerConfig kCfg = QuantizerConfig::uniform(-1, 1, 4, -1, 1, 5);

std::vector<EpochRecord> raw(std::initializer_list<std::pair<double, double>> dw) {
  std::vector<EpochRecord> out;
  std::int64_t t = 0;
  for (auto [d, w] : dw) out.push_back({t += 20, d, w, std::nullopt});
  return out;
}

EpochRecord at(StateIndex s) {
  EpochRecord e;
  e.derived = DerivedState{0.0, 0.0, s};
  return e;
}

std::string saved(const TransitionModel& m) {
  std::ostringstream out;
  save_model(m, out);
  return out.str();
}

TransitionModel loaded(const std::string& s) {
  std::istringstream in(s);
  return load_model(in);
}

}  // namespace

TEST(DeriveStates, ConstantRunSitsAtOrigin) {
  const auto d = derive_states(raw({{50, 10}, {50, 10}, {50, 10}, {50, 10}}), kCfg);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_FALSE(d[0].derived);
  const auto origin = quantize(CompositeObservation(0, 0), kCfg);
  for (std::size_t i = 1; i < d.size(); ++i) {
    ASSERT_TRUE(d[i].derived);
    EXPECT_EQ(d[i].derived->state, origin);
    EXPECT_EQ(d[i].derived->d_hat, 0.0);
  }
}

TEST(DeriveStates, ComposedExample) {
  const auto cfg = QuantizerConfig::uniform(-3, 3, 11, -3, 3, 21);
  const auto d = derive_states(raw({{100, 10}, {200, 20}}), cfg);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[1].derived->d_hat, 2.30103, 1e-5);
  EXPECT_NEAR(d[1].derived->w_hat, 1.30103, 1e-5);
  EXPECT_EQ(d[1].derived->state, quantize(CompositeObservation(2.30103, 1.30103), cfg));
}

TEST(DeriveStates, Errors) {
  EXPECT_THROW(derive_states(raw({{50, 10}}), kCfg), std::invalid_argument);
  EXPECT_THROW(derive_states(raw({{50, 10}, {0, 10}}), kCfg), std::domain_error);
}

TEST(CountTransitions, DirectCounts) {
  TransitionModel m(kCfg);
  const StateIndex a{1, 2}, b{3, 0};
  std::vector<EpochRecord> log{EpochRecord{}, at(a), at(b), at(a)};
  count_transitions(log, m);
  EXPECT_EQ(m.count(a, b), 1u);
  EXPECT_EQ(m.count(b, a), 1u);
  EXPECT_EQ(m.total_transitions(), 2u);
}

TEST(CountTransitions, ResetsAtRunBoundariesAndIsAdditive) {
  const std::vector<EpochRecord> r1{at({0, 0}), at({1, 1}), at({2, 2})};
  const std::vector<EpochRecord> r2{at({3, 3}), at({0, 4}), at({0, 0})};
  TransitionModel sep(kCfg), other(kCfg), rev(kCfg);
  count_transitions(r1, sep);
  count_transitions(r2, sep);
  count_transitions(r2, rev);
  count_transitions(r1, rev);
  TransitionModel a(kCfg), b(kCfg);
  count_transitions(r1, a);
  count_transitions(r2, b);
  a.merge(b);
  EXPECT_EQ(sep, a);
  EXPECT_EQ(sep, rev);
  EXPECT_EQ(sep.count({2, 2}, {3, 3}), 0u);
  EXPECT_EQ(sep.total_transitions(), 4u);
}

TEST(CountTransitions, RejectsForeignIndices) {
  TransitionModel m(kCfg);
  const std::vector<EpochRecord> log{at({0, 0}), at({9, 0})};
  EXPECT_THROW(count_transitions(log, m), std::invalid_argument);
  TransitionModel other(QuantizerConfig::uniform(-1, 1, 3, -1, 1, 3));
  EXPECT_THROW(m.merge(other), std::invalid_argument);
}

TEST(Normalize, QuadrantAndFullRows) {
  TransitionModel m(kCfg);
  const StateIndex from{0, 0};
  m.add(from, {2, 0}, 1);
  m.add(from, {2, 1}, 1);
  m.add(from, {2, 2}, 2);
  m.add(from, {3, 4}, 4);
  m.normalize();
  const auto q = m.quadrant_row(from, 2);
  ASSERT_EQ(q.size(), 5u);
  EXPECT_DOUBLE_EQ(q[0], 0.25);
  EXPECT_DOUBLE_EQ(q[1], 0.25);
  EXPECT_DOUBLE_EQ(q[2], 0.5);
  EXPECT_TRUE(m.quadrant_row(from, 1).empty());
  const auto f = m.full_row(from);
  EXPECT_DOUBLE_EQ(f[kCfg.flat({3, 4})], 0.5);
  EXPECT_TRUE(m.full_row({1, 1}).empty());
  EXPECT_TRUE(m.full_row_empty(kCfg.flat({1, 1})));
  EXPECT_EQ(m.count(from, {3, 4}), 4u);
}

TEST(Normalize, RowsSumToOneAndMarginalsAgree) {
  std::mt19937_64 rng(8);
  const auto chain = oracle::dense_chain(kCfg, rng);
  auto m = oracle::sample_model(chain, 20000, rng);
  const auto before = m.quadrant_probabilities();
  m.normalize();
  EXPECT_EQ(before, m.quadrant_probabilities());
  const std::size_t n = m.n_states(), nw = kCfg.n_w();
  const auto totals = m.row_totals();
  for (std::size_t i = 0; i < n; ++i) {
    const auto full = m.full_row(kCfg.unflat(i));
    if (full.empty()) continue;
    double s = 0.0;
    for (double p : full) s += p;
    EXPECT_NEAR(s, 1.0, 1e-9);
    for (std::size_t r = 0; r < kCfg.n_d(); ++r) {
      const auto q = m.quadrant_row(kCfg.unflat(i), r);
      double mass_r = 0.0;
      for (std::size_t v = 0; v < nw; ++v) mass_r += full[r * nw + v];
      if (q.empty()) {
        EXPECT_EQ(mass_r, 0.0);
        continue;
      }
      double qs = 0.0;
      for (std::size_t v = 0; v < nw; ++v) {
        qs += q[v];
        EXPECT_NEAR(q[v] * mass_r, full[r * nw + v], 1e-12);
      }
      EXPECT_NEAR(qs, 1.0, 1e-9);
    }
    EXPECT_GT(totals[i], 0u);
  }
}

TEST(Trainer, RecoversKnownChain) {
  std::mt19937_64 rng(31);
  const auto cfg = QuantizerConfig::uniform(-1, 1, 3, -1, 1, 4);
  const auto chain = oracle::dense_chain(cfg, rng);
  const auto m = oracle::sample_model(chain, 100000, rng);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < cfg.n_states(); ++i) {
    for (std::size_t r = 0; r < cfg.n_d(); ++r) {
      std::uint64_t visits = 0;
      for (std::size_t v = 0; v < cfg.n_w(); ++v) visits += m.count(cfg.unflat(i), {r, v});
      if (visits < 500) continue;
      const auto truth = chain.quadrant_truth(i, r);
      const auto got = m.quadrant_row(cfg.unflat(i), r);
      double tv = 0.0;
      for (std::size_t v = 0; v < truth.size(); ++v) tv += std::abs(truth[v] - got[v]);
      EXPECT_LE(0.5 * tv, 0.05);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20u);
}

TEST(ModelFile, RoundTripBitExact) {
  std::mt19937_64 rng(4);
  const auto cfg = QuantizerConfig::uniform(-0.123456789012345, 0.3333333333333333, 11, -0.5, 0.17, 21);
  const auto m = oracle::sample_model(oracle::dense_chain(cfg, rng), 5000, rng);
  const auto text = saved(m);
  const auto back = loaded(text);
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.config().d_hat_edges(), m.config().d_hat_edges());
  EXPECT_TRUE(back.normalized());
  EXPECT_EQ(saved(back), text);
  EXPECT_EQ(text.rfind("MDIMODEL v1\n11 21 5000\n", 0), 0u);
}

TEST(ModelFile, RejectsMalformed) {
  TransitionModel m(kCfg);
  m.add({0, 0}, {1, 1}, 3);
  m.add({1, 1}, {0, 0}, 2);
  const auto good = saved(m);
  EXPECT_NO_THROW(loaded(good));

  auto replace = [&](const std::string& from, const std::string& to) {
    auto s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(loaded(replace("MDIMODEL v1", "MDIMODEL v2")), ModelFormatError);
  EXPECT_THROW(loaded(replace("4 5 5", "4 6 5")), ModelFormatError);
  EXPECT_THROW(loaded(replace("4 5 5", "4 5 9")), ModelFormatError);
  EXPECT_THROW(loaded(replace("0 0 1 1 3", "0 0 7 1 3")), ModelFormatError);
  EXPECT_THROW(loaded(replace("0 0 1 1 3", "0 0 1 1 x")), ModelFormatError);
  EXPECT_THROW(loaded(good.substr(0, good.size() - 6)), ModelFormatError);
  EXPECT_THROW(loaded(""), ModelFormatError);
  EXPECT_THROW(loaded(good + "1 1 0 0 2\n"), ModelFormatError);
}

TEST(ModelFile, EmptyModelLoads) {
  TransitionModel m(kCfg);
  const auto back = loaded(saved(m));
  EXPECT_EQ(back.total_transitions(), 0u);
  EXPECT_TRUE(back.full_row({0, 0}).empty());
}
