#include "mdi/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

namespace mdi {

LinkTrace::LinkTrace(std::vector<std::uint64_t> opportunities_ms, std::uint32_t mtu_bytes)
    : opportunities_(std::move(opportunities_ms)), mtu_(mtu_bytes) {
  if (opportunities_.empty()) throw std::invalid_argument("trace has no delivery opportunities");
  if (mtu_ == 0) throw std::invalid_argument("mtu must be positive");
  for (std::size_t i = 1; i < opportunities_.size(); ++i) {
    if (opportunities_[i] < opportunities_[i - 1]) {
      throw std::invalid_argument("trace timestamps must be non-decreasing");
    }
  }
  period_ = std::max<std::uint64_t>(opportunities_.back(), 1);
  first_cycle_.assign(period_, 0);
  per_offset_.assign(period_, 0);
  for (auto ts : opportunities_) {
    if (ts < period_) ++first_cycle_[ts];
    ++per_offset_[ts % period_];
  }
}

std::uint32_t LinkTrace::opportunities_at(std::uint64_t t_ms) const noexcept {
  if (t_ms < period_) return first_cycle_[t_ms];
  return per_offset_[t_ms % period_];
}

std::uint64_t LinkTrace::opportunities_between(std::uint64_t t1_ms, std::uint64_t t2_ms) const noexcept {
  std::uint64_t n = 0;
  for (auto t = t1_ms; t < t2_ms; ++t) n += opportunities_at(t);
  return n;
}

double LinkTrace::mean_rate_mbps() const noexcept {
  const double bits = static_cast<double>(opportunities_.size()) * mtu_ * 8.0;
  return bits / static_cast<double>(period_) / 1000.0;
}

TraceParseError::TraceParseError(std::size_t line, const std::string& what)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}

LinkTrace load_trace(std::istream& in, std::uint32_t mtu_bytes) {
  std::vector<std::uint64_t> ts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw TraceParseError(lineno, "empty line");
    if (line.front() == '-') throw TraceParseError(lineno, "negative timestamp");
    std::uint64_t value = 0;
    const auto* first = line.data();
    const auto* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw TraceParseError(lineno, "not a base-10 integer: '" + line + "'");
    if (!ts.empty() && value < ts.back()) throw TraceParseError(lineno, "timestamp decreases");
    ts.push_back(value);
  }
  if (ts.empty()) throw TraceParseError(0, "empty trace");
  return LinkTrace(std::move(ts), mtu_bytes);
}

LinkTrace load_trace_file(const std::string& path, std::uint32_t mtu_bytes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  return load_trace(in, mtu_bytes);
}

void save_trace(const LinkTrace& trace, std::ostream& out) {
  for (auto ts : trace.opportunities()) out << ts << '\n';
  if (!out) throw std::runtime_error("failed writing trace");
}

void save_trace_file(const LinkTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_trace(trace, out);
}

void SyntheticTraceSpec::validate() const {
  if (!(duration_s > 0) || !(segment_s > 0)) throw std::invalid_argument("duration and segment must be positive");
  if (!(rate_min_mbps > 0) || !(rate_max_mbps >= rate_min_mbps)) {
    throw std::invalid_argument("rates must satisfy 0 < min <= max");
  }
  if (mtu_bytes == 0) throw std::invalid_argument("mtu must be positive");
}

std::vector<double> segment_rates(const SyntheticTraceSpec& spec) {
  spec.validate();
  const auto duration_ms = static_cast<std::uint64_t>(std::llround(spec.duration_s * 1000.0));
  const auto segment_ms = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(spec.segment_s * 1000.0)));
  const std::uint64_t segments = (duration_ms + segment_ms - 1) / segment_ms;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> draw(spec.rate_min_mbps, spec.rate_max_mbps);
  std::vector<double> rates(segments);
  for (auto& r : rates) r = spec.rate_min_mbps == spec.rate_max_mbps ? spec.rate_min_mbps : draw(rng);
  return rates;
}

LinkTrace gen_rapidly_changing(const SyntheticTraceSpec& spec) {
  const auto rates = segment_rates(spec);
  const auto duration_ms = static_cast<std::uint64_t>(std::llround(spec.duration_s * 1000.0));
  const auto segment_ms = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(spec.segment_s * 1000.0)));
  const double bits_per_pkt = 8.0 * spec.mtu_bytes;

  std::vector<std::uint64_t> ts;
  double base = 0.0;  // packets accumulated before the current segment
  for (std::size_t s = 0; s < rates.size(); ++s) {
    const std::uint64_t start = s * segment_ms;
    const std::uint64_t end = std::min(duration_ms, start + segment_ms);
    const double pkts_per_ms = rates[s] * 1000.0 / bits_per_pkt;
    for (std::uint64_t m = start; m < end; ++m) {
      const double before = base + pkts_per_ms * static_cast<double>(m - start);
      const double after = base + pkts_per_ms * static_cast<double>(m + 1 - start);
      const auto n = static_cast<std::uint64_t>(std::floor(after) - std::floor(before));
      for (std::uint64_t k = 0; k < n; ++k) ts.push_back(m + 1);
    }
    base += pkts_per_ms * static_cast<double>(end - start);
  }
  if (ts.empty()) {
    // Whole trace is an outage; keep one opportunity at the end so the
    // trace stays non-empty and its period spans the requested duration.
    ts.push_back(duration_ms);
  }
  return LinkTrace(std::move(ts), spec.mtu_bytes);
}

}  // namespace mdi
