#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdi {

/// Relative delay change scaled by the log-magnitude of the current delay:
/// ((d_curr / d_prev) - 1) * log10(d_curr).
/// Delays are in milliseconds. Throws std::domain_error on non-positive or
/// non-finite input.
double compute_d_hat(double d_curr_ms, double d_prev_ms);

/// Window analogue of compute_d_hat; windows are in packets.
double compute_w_hat(double w_curr_pkts, double w_prev_pkts);

/// One (d_hat, w_hat) point in the composite observation space. Both
/// coordinates are finite; construction rejects NaN and infinities.
class CompositeObservation {
 public:
  CompositeObservation(double d_hat, double w_hat);

  double d_hat() const noexcept { return d_hat_; }
  double w_hat() const noexcept { return w_hat_; }

  friend bool operator==(const CompositeObservation&, const CompositeObservation&) = default;

 private:
  double d_hat_;
  double w_hat_;
};

struct StateIndex {
  std::size_t d_idx = 0;
  std::size_t w_idx = 0;

  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

/// Bucket edges for both dimensions of the quantized state space. This is
/// the single source of truth for state indexing: flat = d_idx * n_w + w_idx.
class QuantizerConfig {
 public:
  static constexpr std::size_t kDefaultDelayStates = 11;
  static constexpr std::size_t kDefaultWindowStates = 21;

  /// Throws std::invalid_argument unless both edge lists are strictly
  /// increasing, finite, and have at least three entries (two buckets).
  QuantizerConfig(std::vector<double> d_hat_edges, std::vector<double> w_hat_edges);

  /// Uniform buckets over [d_lo, d_hi] x [w_lo, w_hi].
  static QuantizerConfig uniform(double d_lo, double d_hi, std::size_t n_d,
                                 double w_lo, double w_hi, std::size_t n_w);

  std::size_t n_d() const noexcept { return d_edges_.size() - 1; }
  std::size_t n_w() const noexcept { return w_edges_.size() - 1; }
  std::size_t n_states() const noexcept { return n_d() * n_w(); }

  const std::vector<double>& d_hat_edges() const noexcept { return d_edges_; }
  const std::vector<double>& w_hat_edges() const noexcept { return w_edges_; }

  double d_hat_min() const noexcept { return d_edges_.front(); }
  double d_hat_max() const noexcept { return d_edges_.back(); }

  std::size_t flat(StateIndex idx) const;
  StateIndex unflat(std::size_t flat_index) const;

  friend bool operator==(const QuantizerConfig&, const QuantizerConfig&) = default;

 private:
  std::vector<double> d_edges_;
  std::vector<double> w_edges_;
};

/// Bucket index of `value` under half-open intervals [e_i, e_{i+1}); values
/// outside the edge range clamp to the first or last bucket.
std::size_t bucket_of(double value, std::span<const double> edges);

/// Linear-interpolation percentile (q in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

/// Fits uniform buckets between the 1st and 99th percentile of the observed
/// d_hat and w_hat values. Throws std::runtime_error on fewer than 100
/// observations or when a dimension's percentile range collapses.
QuantizerConfig fit_config(std::span<const CompositeObservation> observations,
                           std::size_t n_d = QuantizerConfig::kDefaultDelayStates,
                           std::size_t n_w = QuantizerConfig::kDefaultWindowStates);

StateIndex quantize(const CompositeObservation& obs, const QuantizerConfig& cfg);

/// Bucket midpoints in both dimensions.
CompositeObservation representative(StateIndex idx, const QuantizerConfig& cfg);

double w_hat_midpoint(std::size_t w_idx, const QuantizerConfig& cfg);

}  // namespace mdi
