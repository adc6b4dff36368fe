#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdi/epoch.hpp"
#include "mdi/quantizer.hpp"

namespace mdi {

/// Transition counts over the quadrant-structured state space.
///
/// counts(k, l, r, v) is the number of observed transitions from state
/// (d_hat bucket k, w_hat bucket l) to (r, v). Two normalizations are derived
/// from the same tensor:
///   quadrant rows  p(v | k, l, r)  - one row per (current state, next delay
///                                    bucket); sampled by the MDI runtime;
///   full rows      p(r, v | k, l)  - one row per current state; a proper
///                                    stochastic matrix for chain analysis.
/// Rows with no observations are flagged empty rather than holding NaN.
class TransitionModel {
 public:
  explicit TransitionModel(QuantizerConfig cfg);

  const QuantizerConfig& config() const noexcept { return cfg_; }
  std::size_t n_states() const noexcept { return cfg_.n_states(); }
  std::uint64_t total_transitions() const noexcept { return total_; }

  std::uint64_t count(StateIndex from, StateIndex to) const;
  void add(StateIndex from, StateIndex to, std::uint64_t n = 1);
  /// Row-major flat view: index from_flat * n_states + to_flat.
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  /// Adds another model's counts. Throws std::invalid_argument on a
  /// configuration mismatch. Associative and commutative.
  void merge(const TransitionModel& other);

  /// Recomputes both probability views from the counts. Idempotent.
  void normalize();
  bool normalized() const noexcept { return normalized_; }

  /// p(v | k, l, r) over v; empty span when the (k, l, r) row was never seen.
  std::span<const double> quadrant_row(StateIndex from, std::size_t next_d_idx) const;
  /// p(r, v | k, l) over flat (r, v); empty span when state never left.
  std::span<const double> full_row(StateIndex from) const;
  bool full_row_empty(std::size_t from_flat) const;

  /// Dense probability views, same layout as counts(); zero in empty rows.
  const std::vector<double>& quadrant_probabilities() const;
  const std::vector<double>& full_probabilities() const;

  /// Number of transitions out of each state.
  std::vector<std::uint64_t> row_totals() const;

  friend bool operator==(const TransitionModel& a, const TransitionModel& b) {
    return a.cfg_ == b.cfg_ && a.counts_ == b.counts_;
  }

 private:
  void require_normalized() const;

  QuantizerConfig cfg_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  bool normalized_ = false;
  std::vector<double> quadrant_probs_;
  std::vector<double> full_probs_;
  std::vector<std::uint8_t> quadrant_empty_;  // per (k, l, r)
  std::vector<std::uint8_t> full_empty_;      // per (k, l)
};

/// Fills d_hat, w_hat and the quantized state for every record after the
/// first. Throws std::invalid_argument with fewer than two records or on
/// non-positive delays/windows.
std::vector<EpochRecord> derive_states(std::span<const EpochRecord> epochs, const QuantizerConfig& cfg);

/// Composite observations of a raw run (one per consecutive pair).
std::vector<CompositeObservation> composite_observations(std::span<const EpochRecord> epochs);

/// Counts transitions between consecutive derived states of one run. No
/// transition spans two calls, so each call is one independent run. Throws
/// std::invalid_argument if a derived index falls outside the model's
/// configuration.
void count_transitions(std::span<const EpochRecord> derived_epochs, TransitionModel& model);

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text model format:
///   MDIMODEL v1
///   <n_d> <n_w> <total_transitions>
///   <d_hat edges, space separated>
///   <w_hat edges, space separated>
///   <k> <l> <r> <v> <count>      (one line per nonzero count)
void save_model(const TransitionModel& model, std::ostream& out);
void save_model_file(const TransitionModel& model, const std::string& path);
/// Returns a normalized model. Throws ModelFormatError on any malformed,
/// inconsistent or truncated input; never returns a partial model.
TransitionModel load_model(std::istream& in);
TransitionModel load_model_file(const std::string& path);

}  // namespace mdi
