#include "mdi/linksim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "text_util.hpp"

namespace mdi {

const char* const kEpochCsvHeader = "epoch_index,t_ms,delay_ms,window_pkts,d_hat,w_hat,d_idx,w_idx";
const char* const kPacketCsvHeader = "seq,sent_ms,delivered_ms,acked_ms,rtt_ms,dropped";

void LinkParams::validate() const {
  if (one_way_prop_ms < 0) throw std::invalid_argument("propagation delay must be >= 0");
  if (queue_capacity_pkts && *queue_capacity_pkts == 0) throw std::invalid_argument("queue capacity must be > 0");
  if (!(loss_rate >= 0.0 && loss_rate < 1.0)) throw std::invalid_argument("loss rate must be in [0,1)");
  if (duration_ms <= 0) throw std::invalid_argument("duration must be positive");
  if (throughput_bin_ms <= 0) throw std::invalid_argument("throughput bin must be positive");
}

namespace {

struct PendingAck {
  std::int64_t at_ms;
  std::uint64_t seq;
};

}  // namespace

SimResult run_simulation(const LinkParams& params, Controller& controller) {
  params.validate();

  SimResult result;
  result.duration_ms = params.duration_ms;
  result.throughput_bin_ms = params.throughput_bin_ms;
  result.mtu_bytes = params.trace.mtu_bytes();

  std::mt19937_64 rng(params.seed);
  std::bernoulli_distribution lose(params.loss_rate);
  const std::int64_t prop = params.one_way_prop_ms;
  const std::int64_t loss_notice_delay = std::max<std::int64_t>(1, 2 * prop);

  std::deque<std::uint64_t> queue;
  std::deque<PendingAck> acks;
  std::deque<std::int64_t> loss_notices;
  auto& packets = result.packets;
  auto& counters = result.counters;

  auto clamp_window = [&](double w) {
    if (!(w >= 1.0)) {
      ++counters.window_clamps;
      return 1.0;
    }
    return w;
  };

  ControllerDecision decision = controller.start();
  double window = clamp_window(decision.window_pkts);
  std::int64_t next_epoch = std::max<std::int64_t>(1, decision.epoch_len_ms);
  std::uint64_t inflight = 0;

  std::uint64_t epoch_index = 0;
  double epoch_rtt_sum = 0.0;
  std::uint64_t epoch_acks = 0;
  double min_rtt = 0.0;
  double last_mean = 0.0;

  for (std::int64_t t = 0; t < params.duration_ms; ++t) {
    // (1) bottleneck service
    for (std::uint32_t n = params.trace.opportunities_at(static_cast<std::uint64_t>(t)); n > 0 && !queue.empty(); --n) {
      const auto seq = queue.front();
      queue.pop_front();
      packets[seq].delivered_ms = t + prop;
      acks.push_back({t + 2 * prop, seq});
      ++counters.served;
    }

    // (2) feedback to the sender
    while (!acks.empty() && acks.front().at_ms <= t) {
      auto& p = packets[acks.front().seq];
      acks.pop_front();
      p.acked_ms = t;
      p.rtt_ms = t - p.sent_ms;
      const auto rtt = static_cast<double>(*p.rtt_ms);
      epoch_rtt_sum += rtt;
      ++epoch_acks;
      min_rtt = (min_rtt == 0.0) ? rtt : std::min(min_rtt, rtt);
      --inflight;
    }
    while (!loss_notices.empty() && loss_notices.front() <= t) {
      loss_notices.pop_front();
      --inflight;
    }

    // (3) epoch hook
    if (t >= next_epoch) {
      EpochFeedback fb;
      fb.epoch_index = epoch_index++;
      fb.acked_pkts = epoch_acks;
      fb.min_delay_ms = min_rtt;
      fb.now_ms = t;
      if (epoch_acks > 0) {
        last_mean = epoch_rtt_sum / static_cast<double>(epoch_acks);
      }
      fb.mean_delay_ms = last_mean;
      decision = controller.on_epoch(fb);
      window = clamp_window(decision.window_pkts);
      if (epoch_acks > 0) {
        result.epochs.push_back({t, fb.mean_delay_ms, window, std::nullopt});
      }
      epoch_rtt_sum = 0.0;
      epoch_acks = 0;
      next_epoch = t + std::max<std::int64_t>(1, decision.epoch_len_ms);
    }

    // (4) transmission
    const auto allowed = static_cast<std::uint64_t>(std::floor(window));
    while (inflight < allowed) {
      PacketEvent p;
      p.seq = packets.size();
      p.sent_ms = t;
      ++counters.sent;
      ++inflight;
      const bool overflow = params.queue_capacity_pkts && queue.size() >= *params.queue_capacity_pkts;
      if ((params.loss_rate > 0.0 && lose(rng)) || overflow) {
        p.dropped = true;
        ++counters.dropped;
        loss_notices.push_back(t + loss_notice_delay);
      } else {
        queue.push_back(p.seq);
      }
      packets.push_back(p);
    }
  }

  counters.in_queue_at_end = queue.size();
  result.no_deliveries = counters.served == 0;
  if (result.no_deliveries) result.epochs.clear();
  result.summary = summarize(packets, params.duration_ms, params.throughput_bin_ms, result.mtu_bytes);
  return result;
}

std::vector<double> throughput_series(const std::vector<PacketEvent>& packets, std::int64_t duration_ms,
                                      std::int64_t bin_ms, std::uint32_t mtu_bytes) {
  if (bin_ms <= 0 || duration_ms <= 0) throw std::invalid_argument("bin and duration must be positive");
  const auto bins = static_cast<std::size_t>(duration_ms / bin_ms);
  std::vector<double> counts(bins, 0.0);
  for (const auto& p : packets) {
    if (!p.delivered_ms || *p.delivered_ms >= duration_ms) continue;
    const auto b = static_cast<std::size_t>(*p.delivered_ms / bin_ms);
    if (b < bins) counts[b] += 1.0;
  }
  const double scale = 8.0 * mtu_bytes / (static_cast<double>(bin_ms) * 1000.0);
  for (auto& c : counts) c *= scale;
  return counts;
}

std::vector<double> delay_series(const std::vector<PacketEvent>& packets) {
  std::vector<double> out;
  out.reserve(packets.size());
  for (const auto& p : packets) {
    if (p.rtt_ms) out.push_back(static_cast<double>(*p.rtt_ms));
  }
  return out;
}

Quartiles quartiles(const std::vector<double>& samples) {
  if (samples.empty()) return {};
  Quartiles q;
  q.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  q.median = percentile(samples, 50.0);
  q.p25 = percentile(samples, 25.0);
  q.p75 = percentile(samples, 75.0);
  return q;
}

SimSummary summarize(const std::vector<PacketEvent>& packets, std::int64_t duration_ms, std::int64_t bin_ms,
                     std::uint32_t mtu_bytes) {
  return {quartiles(throughput_series(packets, duration_ms, bin_ms, mtu_bytes)), quartiles(delay_series(packets))};
}

void write_epoch_csv(const std::vector<EpochRecord>& epochs, std::ostream& out) {
  using detail::format_double;
  out << kEpochCsvHeader << '\n';
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto& e = epochs[i];
    out << i << ',' << e.t_ms << ',' << format_double(e.delay_ms) << ',' << format_double(e.window_pkts) << ',';
    if (e.derived) {
      out << format_double(e.derived->d_hat) << ',' << format_double(e.derived->w_hat) << ','
          << e.derived->state.d_idx << ',' << e.derived->state.w_idx;
    } else {
      out << ",,,";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing epoch CSV");
}

void write_packet_csv(const std::vector<PacketEvent>& packets, std::ostream& out) {
  out << kPacketCsvHeader << '\n';
  auto opt = [&](const std::optional<std::int64_t>& v) {
    if (v) out << *v;
  };
  for (const auto& p : packets) {
    out << p.seq << ',' << p.sent_ms << ',';
    opt(p.delivered_ms);
    out << ',';
    opt(p.acked_ms);
    out << ',';
    opt(p.rtt_ms);
    out << ',' << (p.dropped ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing packet CSV");
}

namespace {

std::string read_header(std::istream& in, const char* expected, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string(what) + " CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    throw std::runtime_error(std::string(what) + " CSV schema mismatch: expected '" + expected + "', got '" + line + "'");
  }
  return line;
}

template <typename T>
std::optional<T> optional_field(std::string_view cell, const std::string& ctx) {
  if (cell.empty()) return std::nullopt;
  return detail::parse_or_throw<T>(cell, ctx);
}

}  // namespace

std::vector<EpochRecord> read_epoch_csv(std::istream& in) {
  read_header(in, kEpochCsvHeader, "epoch");
  std::vector<EpochRecord> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    const std::string ctx = "epoch CSV line " + std::to_string(lineno);
    if (cells.size() != 8) throw std::runtime_error(ctx + ": expected 8 columns");
    EpochRecord e;
    e.t_ms = detail::parse_or_throw<std::int64_t>(cells[1], ctx);
    e.delay_ms = detail::parse_or_throw<double>(cells[2], ctx);
    e.window_pkts = detail::parse_or_throw<double>(cells[3], ctx);
    const auto d_hat = optional_field<double>(cells[4], ctx);
    const auto w_hat = optional_field<double>(cells[5], ctx);
    const auto d_idx = optional_field<std::size_t>(cells[6], ctx);
    const auto w_idx = optional_field<std::size_t>(cells[7], ctx);
    const bool any = d_hat || w_hat || d_idx || w_idx;
    const bool all = d_hat && w_hat && d_idx && w_idx;
    if (any && !all) throw std::runtime_error(ctx + ": derived columns must be all present or all empty");
    if (all) e.derived = DerivedState{*d_hat, *w_hat, {*d_idx, *w_idx}};
    out.push_back(e);
  }
  return out;
}

std::vector<PacketEvent> read_packet_csv(std::istream& in) {
  read_header(in, kPacketCsvHeader, "packet");
  std::vector<PacketEvent> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    const std::string ctx = "packet CSV line " + std::to_string(lineno);
    if (cells.size() != 6) throw std::runtime_error(ctx + ": expected 6 columns");
    PacketEvent p;
    p.seq = detail::parse_or_throw<std::uint64_t>(cells[0], ctx);
    p.sent_ms = detail::parse_or_throw<std::int64_t>(cells[1], ctx);
    p.delivered_ms = optional_field<std::int64_t>(cells[2], ctx);
    p.acked_ms = optional_field<std::int64_t>(cells[3], ctx);
    p.rtt_ms = optional_field<std::int64_t>(cells[4], ctx);
    p.dropped = detail::parse_or_throw<int>(cells[5], ctx) != 0;
    out.push_back(p);
  }
  return out;
}

}  // namespace mdi
