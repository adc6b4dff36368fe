#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdi/controllers.hpp"
#include "mdi/epoch.hpp"
#include "mdi/trace.hpp"

namespace mdi {

/// Bottleneck link configuration for one emulation run.
struct LinkParams {
  LinkTrace trace;
  std::int64_t one_way_prop_ms = 20;
  std::optional<std::uint64_t> queue_capacity_pkts{};  // nullopt: unbounded
  double loss_rate = 0.0;
  std::uint64_t seed = 1;
  std::int64_t duration_ms = 60'000;
  std::int64_t throughput_bin_ms = 500;

  void validate() const;
};

struct PacketEvent {
  std::uint64_t seq = 0;
  std::int64_t sent_ms = 0;
  std::optional<std::int64_t> delivered_ms;  // arrival at the receiver
  std::optional<std::int64_t> acked_ms;
  std::optional<std::int64_t> rtt_ms;
  bool dropped = false;

  friend bool operator==(const PacketEvent&, const PacketEvent&) = default;
};

struct Quartiles {
  double mean = 0.0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;

  friend bool operator==(const Quartiles&, const Quartiles&) = default;
};

/// Throughput is sampled in fixed bins of delivered bytes (Mbit/s); delay is
/// the per-packet RTT of every ACKed packet (ms).
struct SimSummary {
  Quartiles throughput_mbps;
  Quartiles delay_ms;

  friend bool operator==(const SimSummary&, const SimSummary&) = default;
};

struct SimCounters {
  std::uint64_t sent = 0;
  std::uint64_t served = 0;  // left the bottleneck queue
  std::uint64_t dropped = 0;
  std::uint64_t in_queue_at_end = 0;
  std::uint64_t window_clamps = 0;  // controller asked for window < 1

  friend bool operator==(const SimCounters&, const SimCounters&) = default;
};

struct SimResult {
  std::vector<EpochRecord> epochs;
  std::vector<PacketEvent> packets;
  SimSummary summary;
  SimCounters counters;
  bool no_deliveries = false;
  std::int64_t duration_ms = 0;
  std::int64_t throughput_bin_ms = 500;
  std::uint32_t mtu_bytes = LinkTrace::kDefaultMtu;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Runs one flow over the trace-driven bottleneck at 1 ms resolution.
///
/// Per millisecond t the loop (1) serves queued packets on each delivery
/// opportunity at t, (2) hands ACKs and loss notifications due at t to the
/// sender, (3) fires the controller's epoch hook when due, and (4) lets the
/// sender transmit while in-flight < floor(window). Served packets reach the
/// receiver one_way_prop_ms later and their ACK returns after another
/// one_way_prop_ms. Drops (random or overflow) are reported back to the
/// sender after one RTT of propagation.
///
/// An EpochRecord is logged only for epochs that received at least one ACK.
SimResult run_simulation(const LinkParams& params, Controller& controller);

/// Throughput samples (Mbit/s) in bins of bin_ms over [0, duration_ms),
/// counted at receiver arrival time.
std::vector<double> throughput_series(const std::vector<PacketEvent>& packets, std::int64_t duration_ms,
                                      std::int64_t bin_ms, std::uint32_t mtu_bytes);
std::vector<double> delay_series(const std::vector<PacketEvent>& packets);

Quartiles quartiles(const std::vector<double>& samples);
SimSummary summarize(const std::vector<PacketEvent>& packets, std::int64_t duration_ms, std::int64_t bin_ms,
                     std::uint32_t mtu_bytes);

/// CSV export. Epoch columns: epoch_index,t_ms,delay_ms,window_pkts,d_hat,
/// w_hat,d_idx,w_idx (derived cells left empty when absent). Packet columns:
/// seq,sent_ms,delivered_ms,acked_ms,rtt_ms,dropped.
void write_epoch_csv(const std::vector<EpochRecord>& epochs, std::ostream& out);
void write_packet_csv(const std::vector<PacketEvent>& packets, std::ostream& out);
std::vector<EpochRecord> read_epoch_csv(std::istream& in);
std::vector<PacketEvent> read_packet_csv(std::istream& in);

extern const char* const kEpochCsvHeader;
extern const char* const kPacketCsvHeader;

}  // namespace mdi
