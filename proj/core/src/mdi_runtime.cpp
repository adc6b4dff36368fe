#include "mdi/mdi_runtime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdi {

void MdiParams::validate() const {
  if (!(c1 > 1.0)) throw std::invalid_argument("c1 must exceed 1");
  if (!(c2 > 0.0 && c2 < 1.0)) throw std::invalid_argument("c2 must lie in (0, 1)");
  if (epoch_ms < 1) throw std::invalid_argument("epoch must be at least 1 ms");
  if (!(w_init >= 1.0)) throw std::invalid_argument("initial window must be >= 1");
}

double w_hat_argmin(double w_prev) {
  if (!(w_prev >= 1.0) || !std::isfinite(w_prev)) throw std::domain_error("w_prev must be finite and >= 1");
  // f'(w) = 0  <=>  w * (ln w + 1) = w_prev, increasing in w on [1, w_prev].
  double lo = 1.0;
  double hi = w_prev;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid * (std::log(mid) + 1.0) < w_prev) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double invert_w_hat(double w_hat_target, double w_prev) {
  if (!std::isfinite(w_hat_target)) throw std::domain_error("w_hat target must be finite");
  const auto f = [w_prev](double w) { return (w / w_prev - 1.0) * std::log10(w); };
  double lo = w_hat_argmin(w_prev);
  double hi = w_prev * 1e3;
  if (w_hat_target <= f(lo)) return lo;
  if (w_hat_target >= f(hi)) return hi;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm - w_hat_target) <= 1e-12) return mid;
    if (fm < w_hat_target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

std::size_t sample_row(std::span<const double> row, double u) {
  if (row.empty()) throw std::invalid_argument("cannot sample an empty row");
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] <= 0.0) continue;
    cumulative += row[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // u landed in the rounding slack above the final cumulative sum.
  return last_positive;
}

MdiController::MdiController(std::shared_ptr<const TransitionModel> model, MdiParams params)
    : model_(std::move(model)), params_(params), rng_(params.seed), w_prev_(params.w_init) {
  if (!model_) throw std::invalid_argument("MDI controller needs a model");
  if (!model_->normalized()) throw std::invalid_argument("MDI controller needs a normalized model");
  params_.validate();
  const auto totals = model_->row_totals();
  visited_.resize(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) visited_[i] = totals[i] > 0;
}

StateIndex MdiController::anchor(StateIndex s) const {
  const auto n_w = model_->config().n_w();
  const auto base = s.d_idx * n_w;
  for (std::size_t dist = 0; dist < n_w; ++dist) {
    if (s.w_idx >= dist && visited_[base + s.w_idx - dist]) return {s.d_idx, s.w_idx - dist};
    if (s.w_idx + dist < n_w && visited_[base + s.w_idx + dist]) return {s.d_idx, s.w_idx + dist};
  }
  return s;
}

ControllerDecision MdiController::start() { return {w_prev_, params_.epoch_ms}; }

ControllerDecision MdiController::on_epoch(const EpochFeedback& fb) {
  const auto& cfg = model_->config();
  ++diag_.epochs;

  auto settle = [&](double w, double d_hat, double delay) {
    w = std::max(1.0, w);
    state_ = quantize(CompositeObservation(d_hat, compute_w_hat(w, w_prev_)), cfg);
    w_prev_ = w;
    d_prev_ = delay;
  };

  if (fb.acked_pkts == 0 || !(fb.mean_delay_ms > 0.0)) {
    if (!d_prev_) {
      ++diag_.bootstrap;
      return {w_prev_, params_.epoch_ms};
    }
    ++diag_.zero_ack;
    return {w_prev_, params_.epoch_ms};
  }

  const double delay = fb.mean_delay_ms;
  if (!d_prev_) {
    ++diag_.bootstrap;
    d_prev_ = delay;
    return {w_prev_, params_.epoch_ms};
  }

  const double d_hat = compute_d_hat(delay, *d_prev_);
  if (!state_) {
    ++diag_.bootstrap;
    settle(w_prev_, d_hat, delay);
    state_ = anchor(*state_);
    return {w_prev_, params_.epoch_ms};
  }

  if (d_hat < cfg.d_hat_min()) {
    ++diag_.boundary_up;
    settle(w_prev_ * params_.c1, d_hat, delay);
    return {w_prev_, params_.epoch_ms};
  }
  if (d_hat > cfg.d_hat_max()) {
    ++diag_.boundary_down;
    settle(w_prev_ * params_.c2, d_hat, delay);
    return {w_prev_, params_.epoch_ms};
  }

  const std::size_t r = bucket_of(d_hat, cfg.d_hat_edges());
  const auto row = model_->quadrant_row(*state_, r);
  if (row.empty()) {
    ++diag_.fallback;
    settle(w_prev_, d_hat, delay);
    state_ = anchor(*state_);
    return {w_prev_, params_.epoch_ms};
  }

  ++diag_.sampled;
  const std::size_t v = sample_row(row, uniform_(rng_));
  const double w = std::max(1.0, invert_w_hat(w_hat_midpoint(v, cfg), w_prev_));
  state_ = StateIndex{r, v};
  w_prev_ = w;
  d_prev_ = delay;
  return {w_prev_, params_.epoch_ms};
}

}  // namespace mdi
