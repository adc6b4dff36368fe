#pragma once

#include <cstdint>
#include <optional>

#include "mdi/quantizer.hpp"

namespace mdi {

/// Quantities derived from two consecutive epochs.
struct DerivedState {
  double d_hat = 0.0;
  double w_hat = 0.0;
  StateIndex state;

  friend bool operator==(const DerivedState&, const DerivedState&) = default;
};

/// One controller decision epoch: the delay observed at the epoch boundary
/// and the window the controller chose in response.
struct EpochRecord {
  std::int64_t t_ms = 0;
  double delay_ms = 0.0;
  double window_pkts = 1.0;
  std::optional<DerivedState> derived;  // absent for the first epoch of a run

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

}  // namespace mdi
