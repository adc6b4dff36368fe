#include <gtest/gtest.h>

#include <sstream>

#include "mdi/trace.hpp"

using namespace mdi;

namespace {

LinkTrace parse(const std::string& s) {
  std::istringstream in(s);
  return load_trace(in);
}

std::size_t error_line(const std::string& s) {
  try {
    parse(s);
  } catch (const TraceParseError& e) {
    return e.line();
  }
  return 9999;
}

}  // namespace

TEST(TraceLoad, ThreeOpportunitiesAre12Mbps) {
  const auto t = parse("0\n1\n2\n");
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.opportunities(), (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(t.period_ms(), 2u);
  // one 1500-byte packet per ms
  EXPECT_DOUBLE_EQ(1500.0 * 8 / 1000.0, 12.0);
}

TEST(TraceLoad, Errors) {
  EXPECT_EQ(error_line("5\n3\n"), 2u);
  EXPECT_EQ(error_line(""), 0u);
  EXPECT_EQ(error_line("1\nabc\n"), 2u);
  EXPECT_EQ(error_line("1\n-4\n"), 2u);
  EXPECT_EQ(error_line("1\n2.5\n"), 2u);
  EXPECT_EQ(error_line("1\n\n3\n"), 2u);
}

TEST(TraceLoad, AcceptsCrlfAndMissingFinalNewline) {
  EXPECT_EQ(parse("1\r\n2\r\n").size(), 2u);
  EXPECT_EQ(parse("4\n7").size(), 2u);
}

TEST(TraceSave, Format) {
  std::ostringstream a;
  save_trace(LinkTrace({0}), a);
  EXPECT_EQ(a.str(), "0\n");
  std::ostringstream b;
  save_trace(LinkTrace({0, 0, 7}), b);
  EXPECT_EQ(b.str(), "0\n0\n7\n");
}

TEST(TraceSave, RoundTrip) {
  SyntheticTraceSpec s;
  s.duration_s = 12;
  s.seed = 4;
  const auto t = gen_rapidly_changing(s);
  std::ostringstream out;
  save_trace(t, out);
  EXPECT_EQ(parse(out.str()), t);
}

TEST(LinkTrace, RejectsInvalid) {
  EXPECT_THROW(LinkTrace({}), std::invalid_argument);
  EXPECT_THROW(LinkTrace({3, 2}), std::invalid_argument);
}

TEST(LinkTrace, WrapsAtLastTimestamp) {
  const LinkTrace t({1, 3, 3, 4});
  EXPECT_EQ(t.period_ms(), 4u);
  EXPECT_EQ(t.opportunities_at(0), 0u);
  EXPECT_EQ(t.opportunities_at(1), 1u);
  EXPECT_EQ(t.opportunities_at(3), 2u);
  EXPECT_EQ(t.opportunities_at(4), 1u);
  // second cycle: 1 + 4, 3 + 4, 4 + 4
  EXPECT_EQ(t.opportunities_at(5), 1u);
  EXPECT_EQ(t.opportunities_at(7), 2u);
  EXPECT_EQ(t.opportunities_at(8), 1u);
  EXPECT_EQ(t.opportunities_between(0, 100), 25u * 4u - 1u);  // 100 itself excluded
}

TEST(Generator, ConstantRateExample) {
  SyntheticTraceSpec s;
  s.rate_min_mbps = s.rate_max_mbps = 12.0;
  s.duration_s = 10;
  s.segment_s = 5;
  const auto t = gen_rapidly_changing(s);
  EXPECT_EQ(t.size(), 10000u);
  for (std::uint64_t ms = 1; ms < 10000; ms += 997) EXPECT_EQ(t.opportunities_between(ms, ms + 1000), 1000u);
}

TEST(Generator, CapacityMatchesRateIntegral) {
  SyntheticTraceSpec s;
  s.duration_s = 30;
  s.seed = 21;
  const auto t = gen_rapidly_changing(s);
  const auto rates = segment_rates(s);
  const double pkts_per_ms_per_mbps = 1e6 / (8.0 * s.mtu_bytes) / 1000.0;
  auto integral = [&](double a, double b) {
    double total = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) {
      const double lo = std::max(a, k * s.segment_s * 1000.0);
      const double hi = std::min(b, (k + 1) * s.segment_s * 1000.0);
      if (hi > lo) total += (hi - lo) * rates[k] * pkts_per_ms_per_mbps;
    }
    return total;
  };
  for (std::uint64_t a = 0; a < 30000; a += 613) {
    for (std::uint64_t len : {1u, 17u, 500u, 4999u}) {
      const std::uint64_t b = std::min<std::uint64_t>(a + len, 30000);
      // opportunity at ms index m carries capacity of [m - 1, m)
      const double got = static_cast<double>(t.opportunities_between(a + 1, b + 1));
      EXPECT_NEAR(got, integral(static_cast<double>(a), static_cast<double>(b)), 1.0) << a << " " << b;
    }
  }
}

TEST(Generator, DeterministicAndSeedSensitive) {
  SyntheticTraceSpec s;
  s.seed = 77;
  EXPECT_EQ(gen_rapidly_changing(s), gen_rapidly_changing(s));
  const auto base = segment_rates(s);
  int differing = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticTraceSpec o = s;
    o.seed = s.seed + seed;
    differing += segment_rates(o) != base ? 1 : 0;
  }
  EXPECT_EQ(differing, 10);
}

TEST(Generator, ZeroRateSegmentIsAnOutage) {
  SyntheticTraceSpec s;
  s.rate_min_mbps = s.rate_max_mbps = 0.001;
  s.duration_s = 10;
  EXPECT_NO_THROW(gen_rapidly_changing(s));
}

TEST(Generator, RejectsInvalidSettings) {
  SyntheticTraceSpec s;
  s.rate_min_mbps = 5;
  s.rate_max_mbps = 2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.duration_s = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}
