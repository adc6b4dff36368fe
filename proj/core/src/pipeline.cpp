#include "mdi/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdi {

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view trace_name, std::uint64_t run_index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : trace_name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master_seed ^ h) + run_index);
}

LinkParams NetworkParams::link_for(const LinkTrace& trace, std::uint64_t seed) const {
  LinkParams p{trace,
               one_way_prop_ms,
               queue_capacity_pkts,
               loss_rate,
               seed,
               duration_ms > 0 ? duration_ms : static_cast<std::int64_t>(trace.period_ms()),
               throughput_bin_ms};
  return p;
}

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec, std::uint64_t seed) {
  if (spec.name == "verus-like") return std::make_unique<VerusLikeController>(spec.verus);
  if (spec.name == "copa-like") return std::make_unique<CopaLikeController>(spec.copa);
  if (spec.name == "pinned") return std::make_unique<PinnedController>(spec.pinned_window, spec.pinned_epoch_ms);
  if (spec.name == "mdi") {
    if (!spec.model) throw std::invalid_argument("controller 'mdi' requires a model");
    MdiParams p = spec.mdi;
    p.seed = seed;
    return std::make_unique<MdiController>(spec.model, p);
  }
  throw std::invalid_argument("unknown controller '" + spec.name + "'");
}

RunOutput run_controller(const NamedTrace& trace, const ControllerSpec& spec, const NetworkParams& net,
                         std::uint64_t seed) {
  auto controller = make_controller(spec, seed);
  RunOutput out{run_simulation(net.link_for(trace.trace, seed), *controller), std::nullopt};
  if (const auto* m = dynamic_cast<const MdiController*>(controller.get())) out.mdi = m->diagnostics();
  return out;
}

TrainingOutput train_model(std::span<const NamedTrace> traces, const ControllerSpec& spec, const NetworkParams& net,
                           std::size_t runs_per_trace, std::uint64_t master_seed, std::size_t n_d, std::size_t n_w) {
  if (traces.empty()) throw std::invalid_argument("training needs at least one trace");
  if (runs_per_trace == 0) throw std::invalid_argument("training needs at least one run per trace");

  std::vector<std::vector<EpochRecord>> logs;
  for (const auto& t : traces) {
    for (std::size_t run = 0; run < runs_per_trace; ++run) {
      auto out = run_controller(t, spec, net, derive_seed(master_seed, t.name, run));
      logs.push_back(std::move(out.result.epochs));
    }
  }

  std::vector<CompositeObservation> pooled;
  for (const auto& log : logs) {
    auto obs = composite_observations(log);
    pooled.insert(pooled.end(), obs.begin(), obs.end());
  }
  TransitionModel model(fit_config(pooled, n_d, n_w));

  TrainingSummary summary;
  summary.runs = logs.size();
  for (const auto& log : logs) {
    summary.epochs += log.size();
    if (log.size() < 2) continue;
    count_transitions(derive_states(log, model.config()), model);
  }
  model.normalize();

  const auto totals = model.row_totals();
  std::size_t empty = 0;
  std::vector<std::uint8_t> visited(model.n_states(), 0);
  const std::size_t n = model.n_states();
  for (std::size_t i = 0; i < n; ++i) {
    if (totals[i] == 0) ++empty;
    for (std::size_t j = 0; j < n; ++j) {
      if (model.counts()[i * n + j] > 0) visited[i] = visited[j] = 1;
    }
  }
  summary.transitions = model.total_transitions();
  summary.distinct_states = static_cast<std::size_t>(std::count(visited.begin(), visited.end(), 1));
  summary.empty_row_fraction = static_cast<double>(empty) / static_cast<double>(n);
  return {std::move(model), summary};
}

Histogram histogram(std::span<const double> samples, double lo, double hi, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  Histogram h{lo, hi, std::vector<double>(bins, 0.0)};
  if (samples.empty()) return h;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  for (double s : samples) {
    auto b = hi > lo ? static_cast<std::size_t>(std::floor((s - lo) / width)) : 0;
    h.density[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = static_cast<double>(samples.size()) * width;
  for (auto& d : h.density) d /= norm;
  return h;
}

MetricComparison compare_series(std::span<const double> baseline, std::span<const double> candidate,
                                std::size_t bins) {
  MetricComparison c;
  c.baseline = quartiles(std::vector<double>(baseline.begin(), baseline.end()));
  c.candidate = quartiles(std::vector<double>(candidate.begin(), candidate.end()));
  if (c.baseline.median != 0.0) {
    c.relative_median_diff = std::abs(c.candidate.median - c.baseline.median) / std::abs(c.baseline.median);
  } else {
    c.relative_median_diff = c.candidate.median == 0.0 ? 0.0 : INFINITY;
  }
  double lo = INFINITY;
  double hi = -INFINITY;
  for (double v : baseline) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : candidate) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!std::isfinite(lo)) lo = hi = 0.0;
  c.baseline_pdf = histogram(baseline, lo, hi, bins);
  c.candidate_pdf = histogram(candidate, lo, hi, bins);
  return c;
}

}  // namespace mdi
