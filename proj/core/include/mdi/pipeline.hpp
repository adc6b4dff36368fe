#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdi/controllers.hpp"
#include "mdi/linksim.hpp"
#include "mdi/mdi_runtime.hpp"
#include "mdi/trace.hpp"
#include "mdi/trainer.hpp"

namespace mdi {

/// Stable per-run seed from (master seed, trace name, run index): FNV-1a over
/// the name, then a splitmix64 finalizer. Independent of platform and of the
/// order in which runs execute.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view trace_name, std::uint64_t run_index);

/// Network knobs shared by every run of an experiment.
struct NetworkParams {
  std::int64_t one_way_prop_ms = 20;
  std::optional<std::uint64_t> queue_capacity_pkts;
  double loss_rate = 0.0;
  std::int64_t duration_ms = 0;  // 0: one full trace period
  std::int64_t throughput_bin_ms = 500;

  LinkParams link_for(const LinkTrace& trace, std::uint64_t seed) const;
};

/// Named controller plus its parameters. `model` is required for "mdi".
struct ControllerSpec {
  std::string name = "verus-like";
  VerusLikeParams verus;
  CopaLikeParams copa;
  double pinned_window = 4.0;
  std::int64_t pinned_epoch_ms = 20;
  MdiParams mdi;
  std::shared_ptr<const TransitionModel> model;
};

/// Throws std::invalid_argument for an unknown name or a missing model.
/// For "mdi" the seed overrides spec.mdi.seed.
std::unique_ptr<Controller> make_controller(const ControllerSpec& spec, std::uint64_t seed);

struct NamedTrace {
  std::string name;
  LinkTrace trace;
};

struct RunOutput {
  SimResult result;
  std::optional<MdiDiagnostics> mdi;
};

RunOutput run_controller(const NamedTrace& trace, const ControllerSpec& spec, const NetworkParams& net,
                         std::uint64_t seed);

struct TrainingSummary {
  std::size_t runs = 0;
  std::size_t epochs = 0;
  std::uint64_t transitions = 0;
  std::size_t distinct_states = 0;
  double empty_row_fraction = 0.0;
};

struct TrainingOutput {
  TransitionModel model;
  TrainingSummary summary;
};

/// Runs the controller `runs_per_trace` times over every trace, fits the
/// quantizer to the pooled composite observations, then counts transitions
/// run by run. Throws std::invalid_argument on an empty trace list and
/// std::runtime_error when the runs produce too few epochs to fit.
TrainingOutput train_model(std::span<const NamedTrace> traces, const ControllerSpec& spec, const NetworkParams& net,
                           std::size_t runs_per_trace, std::uint64_t master_seed,
                           std::size_t n_d = QuantizerConfig::kDefaultDelayStates,
                           std::size_t n_w = QuantizerConfig::kDefaultWindowStates);

/// Fixed-bin probability density over [lo, hi].
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> density;
};

Histogram histogram(std::span<const double> samples, double lo, double hi, std::size_t bins);

struct MetricComparison {
  Quartiles baseline;
  Quartiles candidate;
  double relative_median_diff = 0.0;  // |cand - base| / base
  Histogram baseline_pdf;
  Histogram candidate_pdf;
};

/// Both PDFs share `bins` bins over the pooled min/max of the two series.
MetricComparison compare_series(std::span<const double> baseline, std::span<const double> candidate,
                                std::size_t bins = 50);

}  // namespace mdi
