#include <gtest/gtest.h>

#include <sstream>

#include "mdi/pipeline.hpp"

using namespace mdi;

namespace {

std::vector<NamedTrace> traces(std::size_t n, std::uint64_t seed0, double seconds = 10) {
  std::vector<NamedTrace> out;
  for (std::size_t i = 0; i < n; ++i) {
    SyntheticTraceSpec s;
    s.duration_s = seconds;
    s.seed = seed0 + i;
    out.push_back({"t" + std::to_string(i), gen_rapidly_changing(s)});
  }
  return out;
}

std::string saved(const TransitionModel& m) {
  std::ostringstream out;
  save_model(m, out);
  return out.str();
}

}  // namespace

TEST(DeriveSeed, StableAndDistinct) {
  EXPECT_EQ(derive_seed(1, "a.trace", 0), derive_seed(1, "a.trace", 0));
  EXPECT_NE(derive_seed(1, "a.trace", 0), derive_seed(1, "a.trace", 1));
  EXPECT_NE(derive_seed(1, "a.trace", 0), derive_seed(2, "a.trace", 0));
  EXPECT_NE(derive_seed(1, "a.trace", 0), derive_seed(1, "b.trace", 0));
}

TEST(MakeController, Names) {
  ControllerSpec s;
  for (const char* n : {"verus-like", "copa-like", "pinned"}) {
    s.name = n;
    EXPECT_EQ(make_controller(s, 1)->name(), n);
  }
  s.name = "mdi";
  EXPECT_THROW(make_controller(s, 1), std::invalid_argument);
  s.name = "cubic";
  EXPECT_THROW(make_controller(s, 1), std::invalid_argument);
}

TEST(TrainModel, CountsEveryConsecutivePair) {
  const auto ts = traces(4, 10);
  ControllerSpec spec;
  NetworkParams net;
  const auto out = train_model(ts, spec, net, 2, 5);
  EXPECT_EQ(out.summary.runs, 8u);
  // each run contributes (epochs - 2) transitions: first record underived
  EXPECT_EQ(out.summary.transitions, out.summary.epochs - 2 * out.summary.runs);
  EXPECT_EQ(out.model.total_transitions(), out.summary.transitions);
  EXPECT_GT(out.summary.distinct_states, 10u);
  EXPECT_TRUE(out.model.normalized());
}

TEST(TrainModel, DeterministicAndOrderIndependent) {
  auto ts = traces(3, 40);
  ControllerSpec spec;
  spec.name = "copa-like";
  NetworkParams net;
  const auto a = saved(train_model(ts, spec, net, 1, 9).model);
  const auto b = saved(train_model(ts, spec, net, 1, 9).model);
  EXPECT_EQ(a, b);
  std::reverse(ts.begin(), ts.end());
  EXPECT_EQ(saved(train_model(ts, spec, net, 1, 9).model), a);
}

TEST(TrainModel, Errors) {
  ControllerSpec spec;
  NetworkParams net;
  EXPECT_THROW(train_model({}, spec, net, 1, 1), std::invalid_argument);
  const auto ts = traces(1, 1);
  EXPECT_THROW(train_model(ts, spec, net, 0, 1), std::invalid_argument);
}

TEST(RunController, MdiOnOwnTrainingTraceRarelyFallsBack) {
  const auto ts = traces(6, 70, 30);
  ControllerSpec spec;
  spec.name = "copa-like";
  NetworkParams net;
  const auto trained = train_model(ts, spec, net, 1, 3);
  ControllerSpec mdi;
  mdi.name = "mdi";
  mdi.model = std::make_shared<const TransitionModel>(trained.model);
  const auto out = run_controller(ts[0], mdi, net, 4);
  ASSERT_TRUE(out.mdi);
  EXPECT_LT(out.mdi->fallback_fraction(), 0.2);
}

TEST(Histogram, DensityIntegratesToOne) {
  const std::vector<double> xs{0, 1, 1, 2, 3, 3, 3, 4};
  const auto h = histogram(xs, 0, 4, 4);
  double area = 0.0;
  for (double d : h.density) area += d * 1.0;
  EXPECT_NEAR(area, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(h.density[3], 4.0 / 8.0);  // 3, 3, 3 and the top edge 4
}

TEST(CompareSeries, IdentityAndRelativeDiff) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const auto same = compare_series(a, a);
  EXPECT_EQ(same.relative_median_diff, 0.0);
  EXPECT_EQ(same.baseline_pdf.density, same.candidate_pdf.density);
  EXPECT_EQ(same.baseline_pdf.density.size(), 50u);
  const std::vector<double> b{2, 4, 6, 8, 10};
  const auto c = compare_series(a, b);
  EXPECT_DOUBLE_EQ(c.relative_median_diff, 1.0);
  EXPECT_DOUBLE_EQ(c.baseline_pdf.lo, 1.0);
  EXPECT_DOUBLE_EQ(c.baseline_pdf.hi, 10.0);
}
