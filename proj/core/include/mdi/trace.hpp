#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdi {

/// Packet-delivery-opportunity trace (MahiMahi linkshell format): each entry
/// is one millisecond timestamp at which the bottleneck may transmit one
/// MTU-sized packet.
class LinkTrace {
 public:
  static constexpr std::uint32_t kDefaultMtu = 1500;

  /// Throws std::invalid_argument if empty or not non-decreasing.
  explicit LinkTrace(std::vector<std::uint64_t> opportunities_ms, std::uint32_t mtu_bytes = kDefaultMtu);

  const std::vector<std::uint64_t>& opportunities() const noexcept { return opportunities_; }
  std::uint32_t mtu_bytes() const noexcept { return mtu_; }
  std::size_t size() const noexcept { return opportunities_.size(); }

  /// Wrap-around period: the last timestamp (at least 1 ms). Opportunity j
  /// fires at ts_j + c * period for every cycle c >= 0.
  std::uint64_t period_ms() const noexcept { return period_; }

  /// Number of delivery opportunities at absolute time t_ms, wrapping the
  /// trace indefinitely.
  std::uint32_t opportunities_at(std::uint64_t t_ms) const noexcept;

  /// Opportunities in [t1, t2), with wrap-around.
  std::uint64_t opportunities_between(std::uint64_t t1_ms, std::uint64_t t2_ms) const noexcept;

  /// Long-run capacity in Mbit/s implied by one full wrap period.
  double mean_rate_mbps() const noexcept;

  friend bool operator==(const LinkTrace& a, const LinkTrace& b) {
    return a.mtu_ == b.mtu_ && a.opportunities_ == b.opportunities_;
  }

 private:
  std::vector<std::uint64_t> opportunities_;
  std::uint32_t mtu_;
  std::uint64_t period_;
  std::vector<std::uint32_t> first_cycle_;  // counts for t in [0, period)
  std::vector<std::uint32_t> per_offset_;   // counts for t >= period, indexed by t % period
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

LinkTrace load_trace(std::istream& in, std::uint32_t mtu_bytes = LinkTrace::kDefaultMtu);
LinkTrace load_trace_file(const std::string& path, std::uint32_t mtu_bytes = LinkTrace::kDefaultMtu);
void save_trace(const LinkTrace& trace, std::ostream& out);
void save_trace_file(const LinkTrace& trace, const std::string& path);

/// Capacity re-drawn uniformly from [rate_min, rate_max] every segment.
struct SyntheticTraceSpec {
  double duration_s = 60.0;
  double segment_s = 5.0;
  double rate_min_mbps = 2.0;
  double rate_max_mbps = 24.0;
  std::uint64_t seed = 1;
  std::uint32_t mtu_bytes = LinkTrace::kDefaultMtu;

  void validate() const;
};

/// Per-segment rates drawn by gen_rapidly_changing for this spec, in Mbit/s.
std::vector<double> segment_rates(const SyntheticTraceSpec& spec);

/// Emits evenly spaced opportunities realizing each segment's rate. The
/// cumulative capacity is tracked across segments so any window deviates
/// from the rate integral by less than one packet. Timestamps are 1-based
/// (ms index m carries the capacity of [m-1, m)), matching MahiMahi's
/// convention that a trace's period is its last timestamp.
LinkTrace gen_rapidly_changing(const SyntheticTraceSpec& spec);

}  // namespace mdi
