#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mdi/controllers.hpp"
#include "mdi/trainer.hpp"

namespace mdi {

struct MdiParams {
  double c1 = 1.25;  // boundary increase multiplier (> 1)
  double c2 = 0.8;   // boundary decrease multiplier (in (0, 1))
  std::int64_t epoch_ms = 20;
  std::uint64_t seed = 1;
  double w_init = 2.0;

  void validate() const;
};

/// Smallest window w >= 1 on the increasing branch of
/// f(w) = ((w / w_prev) - 1) * log10(w). f falls below zero for
/// 1 < w < w_prev and bottoms out here, so this is also the largest decrease
/// the composite window coordinate can express.
double w_hat_argmin(double w_prev);

/// Raw window w such that compute_w_hat(w, w_prev) == target (within 1e-6),
/// searched by bisection on [w_hat_argmin(w_prev), w_prev * 1e3]. Targets
/// below the reachable minimum return w_hat_argmin(w_prev), which is 1 when
/// w_prev == 1. Targets above the bracket return its upper end.
double invert_w_hat(double w_hat_target, double w_prev);

/// Inverse-CDF draw over a probability row from one uniform u in [0, 1).
std::size_t sample_row(std::span<const double> row, double u);

struct MdiDiagnostics {
  std::uint64_t epochs = 0;
  std::uint64_t bootstrap = 0;     // held w_init before two delay samples
  std::uint64_t boundary_up = 0;   // c1 applied
  std::uint64_t boundary_down = 0; // c2 applied
  std::uint64_t zero_ack = 0;      // no ACKs in the epoch, window held
  std::uint64_t sampled = 0;       // normal guided-walk step
  std::uint64_t fallback = 0;      // empty quadrant row, window held

  double fallback_fraction() const noexcept {
    return epochs ? static_cast<double>(fallback) / static_cast<double>(epochs) : 0.0;
  }
};

/// Guided random walk over a trained TransitionModel.
///
/// Each epoch the observed mean delay gives d_hat for the next step. Outside
/// the trained d_hat range the window is scaled by c1 (below) or c2 (above).
/// Inside it, the quadrant row selected by the previous state (k, l) and the
/// new delay bucket r is sampled for the next window bucket v, whose
/// midpoint is inverted back to a raw window. A bootstrap or fallback step
/// holds the window and re-anchors the position to the nearest trained
/// window bucket within the observed delay bucket.
class MdiController final : public Controller {
 public:
  /// The model must be normalized. It is shared read-only between flows.
  MdiController(std::shared_ptr<const TransitionModel> model, MdiParams params = {});

  ControllerDecision start() override;
  ControllerDecision on_epoch(const EpochFeedback& feedback) override;
  std::string_view name() const noexcept override { return "mdi"; }

  const MdiDiagnostics& diagnostics() const noexcept { return diag_; }
  double window() const noexcept { return w_prev_; }
  std::optional<StateIndex> state() const noexcept { return state_; }

 private:
  std::shared_ptr<const TransitionModel> model_;
  MdiParams params_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};

  double w_prev_;
  std::optional<double> d_prev_;
  std::optional<StateIndex> state_;  // (k, l) of the current position
  std::vector<std::uint8_t> visited_;

  StateIndex anchor(StateIndex s) const;
  MdiDiagnostics diag_;
};

}  // namespace mdi
