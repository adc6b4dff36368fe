#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace mdi {

/// Per-epoch delay feedback handed to a controller by the emulator.
/// mean_delay_ms is the mean RTT of ACKs received during the epoch. When the
/// epoch saw no ACKs (acked_pkts == 0) it carries the last known mean, or 0
/// if no ACK has arrived yet; controllers must check acked_pkts first.
struct EpochFeedback {
  std::uint64_t epoch_index = 0;
  double mean_delay_ms = 0.0;
  double min_delay_ms = 0.0;
  std::uint64_t acked_pkts = 0;
  std::int64_t now_ms = 0;
};

struct ControllerDecision {
  double window_pkts = 1.0;
  std::int64_t epoch_len_ms = 20;
};

/// Epoch-driven window controller. Implementations must be total (never
/// throw on valid feedback) and deterministic given construction parameters
/// and the feedback history.
class Controller {
 public:
  virtual ~Controller() = default;

  /// Window and first epoch length before any feedback.
  virtual ControllerDecision start() = 0;
  virtual ControllerDecision on_epoch(const EpochFeedback& feedback) = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// Constant window, constant epoch. Used as a test fixture and for
/// stop-and-wait style calibration runs.
class PinnedController final : public Controller {
 public:
  explicit PinnedController(double window_pkts = 4.0, std::int64_t epoch_ms = 20);

  ControllerDecision start() override { return {window_, epoch_ms_}; }
  ControllerDecision on_epoch(const EpochFeedback&) override { return {window_, epoch_ms_}; }
  std::string_view name() const noexcept override { return "pinned"; }

 private:
  double window_;
  std::int64_t epoch_ms_;
};

struct VerusLikeParams {
  double lambda = 1.5;    // delay tolerance relative to the minimum RTT
  double inc = 1.0;       // additive increase, packets per epoch
  double dec_mult = 0.7;  // multiplicative back-off
  std::int64_t epoch_ms = 20;
  double w_init = 2.0;

  void validate() const;
};

/// Additive explore while the epoch delay stays within lambda * min RTT,
/// multiplicative back-off otherwise. Zero-ACK epochs hold the window.
class VerusLikeController final : public Controller {
 public:
  explicit VerusLikeController(VerusLikeParams params = {});

  ControllerDecision start() override;
  ControllerDecision on_epoch(const EpochFeedback& feedback) override;
  std::string_view name() const noexcept override { return "verus-like"; }

  double window() const noexcept { return window_; }
  void set_window(double w) noexcept;

 private:
  VerusLikeParams params_;
  double window_;
};

struct CopaLikeParams {
  double delta = 0.5;
  double velocity = 1.0;
  std::int64_t epoch_ms = 10;
  double w_init = 2.0;

  void validate() const;
};

/// Copa-style target tracking: target rate 1 / (delta * queuing delay),
/// window nudged toward the target by velocity / (delta * w) per ACK.
class CopaLikeController final : public Controller {
 public:
  explicit CopaLikeController(CopaLikeParams params = {});

  ControllerDecision start() override;
  ControllerDecision on_epoch(const EpochFeedback& feedback) override;
  std::string_view name() const noexcept override { return "copa-like"; }

  double window() const noexcept { return window_; }
  void set_window(double w) noexcept;
  /// Target window in packets for the given delays.
  double target_window(double mean_delay_ms, double min_delay_ms) const noexcept;

 private:
  CopaLikeParams params_;
  double window_;
};

/// Builds a baseline controller by CLI name ("verus-like", "copa-like",
/// "pinned"). Throws std::invalid_argument for unknown names; "mdi" needs a
/// model and is built via make_mdi_controller.
std::unique_ptr<Controller> make_baseline_controller(std::string_view name);

}  // namespace mdi
