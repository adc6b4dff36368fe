#include "mdi/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdi {

namespace {

double composite(double curr, double prev, const char* what) {
  if (!std::isfinite(curr) || !std::isfinite(prev) || curr <= 0.0 || prev <= 0.0) {
    throw std::domain_error(std::string(what) + " values must be finite and positive");
  }
  return (curr / prev - 1.0) * std::log10(curr);
}

void validate_edges(const std::vector<double>& edges, const char* dim) {
  if (edges.size() < 3) {
    throw std::invalid_argument(std::string(dim) + " needs at least two buckets");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) {
      throw std::invalid_argument(std::string(dim) + " edges must be finite");
    }
    if (i > 0 && !(edges[i] > edges[i - 1])) {
      throw std::invalid_argument(std::string(dim) + " edges must be strictly increasing");
    }
  }
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t n) {
  std::vector<double> edges(n + 1);
  const double width = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) edges[i] = lo + width * static_cast<double>(i);
  // Pin the outermost edge exactly; lo + n*width can round away from hi.
  edges[n] = hi;
  return edges;
}

}  // namespace

double compute_d_hat(double d_curr_ms, double d_prev_ms) {
  return composite(d_curr_ms, d_prev_ms, "delay");
}

double compute_w_hat(double w_curr_pkts, double w_prev_pkts) {
  return composite(w_curr_pkts, w_prev_pkts, "window");
}

CompositeObservation::CompositeObservation(double d_hat, double w_hat) : d_hat_(d_hat), w_hat_(w_hat) {
  if (!std::isfinite(d_hat) || !std::isfinite(w_hat)) {
    throw std::domain_error("composite observation must be finite");
  }
}

QuantizerConfig::QuantizerConfig(std::vector<double> d_hat_edges, std::vector<double> w_hat_edges)
    : d_edges_(std::move(d_hat_edges)), w_edges_(std::move(w_hat_edges)) {
  validate_edges(d_edges_, "d_hat");
  validate_edges(w_edges_, "w_hat");
}

QuantizerConfig QuantizerConfig::uniform(double d_lo, double d_hi, std::size_t n_d, double w_lo,
                                         double w_hi, std::size_t n_w) {
  if (n_d < 2 || n_w < 2) throw std::invalid_argument("need at least two states per dimension");
  return QuantizerConfig(uniform_edges(d_lo, d_hi, n_d), uniform_edges(w_lo, w_hi, n_w));
}

std::size_t QuantizerConfig::flat(StateIndex idx) const {
  if (idx.d_idx >= n_d() || idx.w_idx >= n_w()) throw std::out_of_range("state index out of range");
  return idx.d_idx * n_w() + idx.w_idx;
}

StateIndex QuantizerConfig::unflat(std::size_t flat_index) const {
  if (flat_index >= n_states()) throw std::out_of_range("flat state index out of range");
  return {flat_index / n_w(), flat_index % n_w()};
}

std::size_t bucket_of(double value, std::span<const double> edges) {
  const std::size_t buckets = edges.size() - 1;
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  if (it == edges.begin()) return 0;
  const auto idx = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
  return std::min(idx, buckets - 1);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = (q / 100.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

QuantizerConfig fit_config(std::span<const CompositeObservation> observations, std::size_t n_d,
                           std::size_t n_w) {
  if (n_d < 2 || n_w < 2) throw std::invalid_argument("need at least two states per dimension");
  if (observations.size() < 100) {
    throw std::runtime_error("fit_config needs at least 100 observations, got " +
                             std::to_string(observations.size()));
  }
  std::vector<double> ds;
  std::vector<double> ws;
  ds.reserve(observations.size());
  ws.reserve(observations.size());
  for (const auto& o : observations) {
    ds.push_back(o.d_hat());
    ws.push_back(o.w_hat());
  }
  const double d_lo = percentile(ds, 1.0);
  const double d_hi = percentile(ds, 99.0);
  const double w_lo = percentile(ws, 1.0);
  const double w_hi = percentile(std::move(ws), 99.0);
  if (!(d_hi > d_lo)) throw std::runtime_error("degenerate d_hat range: 1st and 99th percentile coincide");
  if (!(w_hi > w_lo)) throw std::runtime_error("degenerate w_hat range: 1st and 99th percentile coincide");
  return QuantizerConfig::uniform(d_lo, d_hi, n_d, w_lo, w_hi, n_w);
}

StateIndex quantize(const CompositeObservation& obs, const QuantizerConfig& cfg) {
  return {bucket_of(obs.d_hat(), cfg.d_hat_edges()), bucket_of(obs.w_hat(), cfg.w_hat_edges())};
}

double w_hat_midpoint(std::size_t w_idx, const QuantizerConfig& cfg) {
  const auto& e = cfg.w_hat_edges();
  if (w_idx + 1 >= e.size()) throw std::out_of_range("window index out of range");
  return 0.5 * (e[w_idx] + e[w_idx + 1]);
}

CompositeObservation representative(StateIndex idx, const QuantizerConfig& cfg) {
  const auto& d = cfg.d_hat_edges();
  if (idx.d_idx + 1 >= d.size()) throw std::out_of_range("delay index out of range");
  return {0.5 * (d[idx.d_idx] + d[idx.d_idx + 1]), w_hat_midpoint(idx.w_idx, cfg)};
}

}  // namespace mdi
