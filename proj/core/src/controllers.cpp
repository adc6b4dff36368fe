#include "mdi/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdi {

PinnedController::PinnedController(double window_pkts, std::int64_t epoch_ms)
    : window_(std::max(1.0, window_pkts)), epoch_ms_(std::max<std::int64_t>(1, epoch_ms)) {}

void VerusLikeParams::validate() const {
  if (!(lambda > 1.0)) throw std::invalid_argument("verus-like lambda must exceed 1");
  if (!(inc > 0.0)) throw std::invalid_argument("verus-like inc must be positive");
  if (!(dec_mult > 0.0 && dec_mult < 1.0)) throw std::invalid_argument("verus-like dec_mult must be in (0,1)");
  if (epoch_ms < 1) throw std::invalid_argument("epoch must be at least 1 ms");
  if (!(w_init >= 1.0)) throw std::invalid_argument("initial window must be >= 1");
}

VerusLikeController::VerusLikeController(VerusLikeParams params) : params_(params), window_(params.w_init) {
  params_.validate();
}

ControllerDecision VerusLikeController::start() { return {window_, params_.epoch_ms}; }

void VerusLikeController::set_window(double w) noexcept { window_ = std::max(1.0, w); }

ControllerDecision VerusLikeController::on_epoch(const EpochFeedback& fb) {
  if (fb.acked_pkts > 0) {
    if (fb.mean_delay_ms <= params_.lambda * fb.min_delay_ms) {
      window_ += params_.inc;
    } else {
      window_ *= params_.dec_mult;
    }
    window_ = std::max(1.0, window_);
  }
  return {window_, params_.epoch_ms};
}

void CopaLikeParams::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("copa-like delta must be positive");
  if (!(velocity > 0.0)) throw std::invalid_argument("copa-like velocity must be positive");
  if (epoch_ms < 1) throw std::invalid_argument("epoch must be at least 1 ms");
  if (!(w_init >= 1.0)) throw std::invalid_argument("initial window must be >= 1");
}

CopaLikeController::CopaLikeController(CopaLikeParams params) : params_(params), window_(params.w_init) {
  params_.validate();
}

ControllerDecision CopaLikeController::start() { return {window_, params_.epoch_ms}; }

void CopaLikeController::set_window(double w) noexcept { window_ = std::max(1.0, w); }

double CopaLikeController::target_window(double mean_delay_ms, double min_delay_ms) const noexcept {
  const double dq_ms = std::max(0.1, mean_delay_ms - min_delay_ms);
  const double target_rate = 1.0 / (params_.delta * dq_ms / 1000.0);  // packets per second
  return target_rate * mean_delay_ms / 1000.0;
}

ControllerDecision CopaLikeController::on_epoch(const EpochFeedback& fb) {
  if (fb.acked_pkts > 0) {
    const double target_w = target_window(fb.mean_delay_ms, fb.min_delay_ms);
    const double step = params_.velocity * static_cast<double>(fb.acked_pkts) / (params_.delta * window_);
    if (window_ < target_w) {
      window_ += step;
    } else {
      window_ -= step;
    }
    window_ = std::max(1.0, window_);
  }
  return {window_, params_.epoch_ms};
}

std::unique_ptr<Controller> make_baseline_controller(std::string_view name) {
  if (name == "verus-like") return std::make_unique<VerusLikeController>();
  if (name == "copa-like") return std::make_unique<CopaLikeController>();
  if (name == "pinned") return std::make_unique<PinnedController>();
  throw std::invalid_argument("unknown controller '" + std::string(name) + "'");
}

}  // namespace mdi
