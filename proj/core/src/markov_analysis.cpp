#include "mdi/markov_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "text_util.hpp"

namespace mdi {

StochasticMatrix::StochasticMatrix(std::size_t n, std::vector<double> row_major) : n_(n), p_(std::move(row_major)) {
  if (n_ == 0) throw std::invalid_argument("stochastic matrix must be non-empty");
  if (p_.size() != n_ * n_) throw std::invalid_argument("stochastic matrix data has wrong size");
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = p_[i * n_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("stochastic matrix entries must be >= 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("row " + std::to_string(i) + " sums to " + detail::format_double(sum));
    }
  }
  build_sparse();
}

StochasticMatrix StochasticMatrix::identity(std::size_t n) {
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 1.0;
  return StochasticMatrix(n, std::move(p));
}

void StochasticMatrix::build_sparse() {
  row_start_.assign(n_ + 1, 0);
  col_.clear();
  val_.clear();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = p_[i * n_ + j];
      if (v != 0.0) {
        col_.push_back(j);
        val_.push_back(v);
      }
    }
    row_start_[i + 1] = col_.size();
  }
}

std::vector<double> StochasticMatrix::step(std::span<const double> mu) const {
  if (mu.size() != n_) throw std::invalid_argument("distribution size does not match matrix");
  std::vector<double> next(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double m = mu[i];
    if (m == 0.0) continue;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) next[col_[k]] += m * val_[k];
  }
  return next;
}

StochasticMatrix StochasticMatrix::lazy() const {
  std::vector<double> p(p_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) p[i * n_ + j] = 0.5 * p_[i * n_ + j] + (i == j ? 0.5 : 0.0);
  }
  return StochasticMatrix(n_, std::move(p));
}

bool StochasticMatrix::irreducible() const {
  auto reaches_all = [&](bool transpose) {
    std::vector<std::uint8_t> seen(n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = transpose ? p_[j * n_ + i] : p_[i * n_ + j];
        if (v > 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n_;
  };
  return reaches_all(false) && reaches_all(true);
}

StateDistribution::StateDistribution(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw std::invalid_argument("distribution must be non-empty");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("distribution entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("distribution sums to " + detail::format_double(sum));
}

StochasticMatrix to_stochastic(const TransitionModel& model, double smoothing) {
  if (!(smoothing >= 0.0 && smoothing <= 1.0)) throw std::invalid_argument("smoothing must lie in [0, 1]");
  const std::size_t n = model.n_states();
  const auto& full = model.full_probabilities();
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = p.data() + i * n;
    if (model.full_row_empty(i)) {
      row[i] = 1.0;
    } else {
      std::copy_n(full.data() + i * n, n, row);
    }
    if (smoothing > 0.0) {
      const double u = smoothing / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = (1.0 - smoothing) * row[j] + u;
    }
  }
  return StochasticMatrix(n, std::move(p));
}

StateDistribution occupancy(const TransitionModel& model) {
  const auto totals = model.row_totals();
  const double sum = static_cast<double>(std::accumulate(totals.begin(), totals.end(), std::uint64_t{0}));
  if (sum == 0.0) {
    return StateDistribution(std::vector<double>(totals.size(), 1.0 / static_cast<double>(totals.size())));
  }
  std::vector<double> p(totals.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(totals[i]) / sum;
  return StateDistribution(std::move(p));
}

namespace {

double linf_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void renormalize(std::vector<double>& v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0.0) {
    for (auto& x : v) x /= s;
  }
}

}  // namespace

StateDistribution stationary(const StochasticMatrix& p, const StationaryOptions& options) {
  const std::size_t n = p.size();
  std::vector<double> pi;
  if (options.start) {
    if (options.start->size() != n) throw std::invalid_argument("start distribution size does not match matrix");
    pi = options.start->probs();
  } else {
    pi.assign(n, 1.0 / static_cast<double>(n));
  }
  for (std::uint64_t it = 0; it < options.max_iterations; ++it) {
    auto next = p.step(pi);
    renormalize(next);
    const double change = linf_diff(next, pi);
    pi = std::move(next);
    if (change < options.tolerance) {
      const auto check = p.step(pi);
      const double residual = linf_diff(check, pi);
      if (residual >= options.residual_bound) {
        throw NonConvergenceError("stationary residual " + detail::format_double(residual) +
                                  " exceeds bound; try the lazy transform (P + I) / 2");
      }
      return StateDistribution(std::move(pi));
    }
  }
  throw NonConvergenceError("power iteration did not converge within " + std::to_string(options.max_iterations) +
                            " iterations (periodic or reducible chain?); try the lazy transform (P + I) / 2");
}

std::vector<MixingReport> mixing_times(const StochasticMatrix& p, std::span<const double> epsilons,
                                       std::uint64_t max_iterations) {
  const std::size_t n = p.size();
  std::vector<MixingReport> reports(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    if (!(epsilons[e] > 0.0)) throw std::invalid_argument("mixing threshold must be positive");
    reports[e].epsilon = epsilons[e];
    reports[e].per_start.assign(n, 0);
  }
  if (epsilons.empty()) return reports;

  std::vector<double> mu(n);
  for (std::size_t start = 0; start < n; ++start) {
    std::fill(mu.begin(), mu.end(), 0.0);
    mu[start] = 1.0;
    std::vector<std::uint8_t> done(epsilons.size(), 0);
    std::size_t remaining = epsilons.size();
    for (std::uint64_t t = 0;; ++t) {
      if (t >= max_iterations) {
        throw NonConvergenceError("mixing from state " + std::to_string(start) + " exceeded " +
                                  std::to_string(max_iterations) + " steps; try the lazy transform (P + I) / 2");
      }
      auto next = p.step(mu);
      const double diff = linf_diff(mu, next);
      for (std::size_t e = 0; e < epsilons.size(); ++e) {
        if (!done[e] && diff < epsilons[e]) {
          done[e] = 1;
          --remaining;
          reports[e].per_start[start] = t;
        }
      }
      if (remaining == 0) break;
      mu = std::move(next);
    }
  }
  for (auto& r : reports) r.t_mix = *std::max_element(r.per_start.begin(), r.per_start.end());
  return reports;
}

MixingReport mixing_time(const StochasticMatrix& p, double epsilon, std::uint64_t max_iterations) {
  const double eps[] = {epsilon};
  return std::move(mixing_times(p, eps, max_iterations).front());
}

double kl_divergence(const StateDistribution& p, const StateDistribution& q, double floor) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in size");
  if (!(floor > 0.0)) throw std::invalid_argument("KL floor must be positive");
  std::vector<double> qf = q.probs();
  bool raised = false;
  for (auto& v : qf) {
    if (v < floor) {
      v = floor;
      raised = true;
    }
  }
  if (raised) renormalize(qf);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * std::log(p[i] / qf[i]);
  }
  return std::max(0.0, d);
}

double max_abs_diff(const StateDistribution& p, const StateDistribution& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in size");
  return linf_diff(p.probs(), q.probs());
}

StateDistribution empirical_distribution(std::span<const EpochRecord> epochs, std::size_t discard,
                                         const QuantizerConfig& cfg) {
  std::vector<double> hist(cfg.n_states(), 0.0);
  std::size_t derived = 0;
  std::size_t used = 0;
  for (const auto& e : epochs) {
    if (!e.derived) continue;
    if (derived++ < discard) continue;
    hist[cfg.flat(e.derived->state)] += 1.0;
    ++used;
  }
  if (derived < discard + 10) {
    throw std::invalid_argument("empirical distribution needs at least discard + 10 derived epochs (have " +
                                std::to_string(derived) + ", discard " + std::to_string(discard) + ")");
  }
  for (auto& h : hist) h /= static_cast<double>(used);
  return StateDistribution(std::move(hist));
}

StateDistribution empirical_distribution(const SimResult& result, std::size_t discard, const QuantizerConfig& cfg) {
  return empirical_distribution(std::span<const EpochRecord>(result.epochs), discard, cfg);
}

namespace {

std::vector<double> midpoints(const std::vector<double>& edges) {
  std::vector<double> m(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) m[i] = 0.5 * (edges[i] + edges[i + 1]);
  return m;
}

// White to dark blue, linear in value / max.
std::string fill_for(double value, double max_value) {
  const double x = max_value > 0.0 ? std::clamp(value / max_value, 0.0, 1.0) : 0.0;
  const auto channel = [x](int lo) { return static_cast<int>(std::lround(255.0 - x * (255.0 - lo))); };
  return "rgb(" + std::to_string(channel(8)) + "," + std::to_string(channel(48)) + "," + std::to_string(channel(107)) +
         ")";
}

void svg_open(std::ostream& out, std::size_t width, std::size_t height) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"rgb(255,255,255)\"/>\n";
}

}  // namespace

void export_distribution_csv(const StateDistribution& dist, const QuantizerConfig& cfg, std::ostream& out) {
  using detail::format_double;
  if (dist.size() != cfg.n_states()) throw std::invalid_argument("distribution does not match quantizer config");
  const auto d_mid = midpoints(cfg.d_hat_edges());
  const auto w_mid = midpoints(cfg.w_hat_edges());
  out << "d_hat\\w_hat";
  for (double w : w_mid) out << ',' << format_double(w);
  out << '\n';
  for (std::size_t k = 0; k < cfg.n_d(); ++k) {
    out << format_double(d_mid[k]);
    for (std::size_t l = 0; l < cfg.n_w(); ++l) out << ',' << format_double(dist[k * cfg.n_w() + l]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing distribution CSV");
}

void export_distribution_svg(const StateDistribution& dist, const QuantizerConfig& cfg, std::ostream& out) {
  if (dist.size() != cfg.n_states()) throw std::invalid_argument("distribution does not match quantizer config");
  constexpr std::size_t cell = 16;
  const double max_value = *std::max_element(dist.probs().begin(), dist.probs().end());
  svg_open(out, cfg.n_w() * cell, cfg.n_d() * cell);
  for (std::size_t k = 0; k < cfg.n_d(); ++k) {
    for (std::size_t l = 0; l < cfg.n_w(); ++l) {
      out << "<rect class=\"cell\" x=\"" << l * cell << "\" y=\"" << k * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << fill_for(dist[k * cfg.n_w() + l], max_value) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("failed writing distribution SVG");
}

void export_matrix_csv(std::span<const double> probs, const QuantizerConfig& cfg, std::ostream& out) {
  using detail::format_double;
  const std::size_t n = cfg.n_states();
  if (probs.size() != n * n) throw std::invalid_argument("matrix does not match quantizer config");
  out << "from\\to";
  for (std::size_t j = 0; j < n; ++j) {
    const auto s = cfg.unflat(j);
    out << ",d" << s.d_idx << "w" << s.w_idx;
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = cfg.unflat(i);
    out << 'd' << s.d_idx << 'w' << s.w_idx;
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(probs[i * n + j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing matrix CSV");
}

void export_matrix_svg(std::span<const double> probs, const QuantizerConfig& cfg, std::ostream& out) {
  const std::size_t n = cfg.n_states();
  if (probs.size() != n * n) throw std::invalid_argument("matrix does not match quantizer config");
  constexpr std::size_t cell = 3;
  const double max_value = probs.empty() ? 0.0 : *std::max_element(probs.begin(), probs.end());
  svg_open(out, n * cell, n * cell);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = probs[i * n + j];
      if (v <= 0.0) continue;
      out << "<rect class=\"cell\" x=\"" << j * cell << "\" y=\"" << i * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << fill_for(v, max_value) << "\"/>\n";
    }
  }
  for (std::size_t q = 0; q <= cfg.n_d(); ++q) {
    const auto pos = q * cfg.n_w() * cell;
    out << "<line class=\"grid\" x1=\"" << pos << "\" y1=\"0\" x2=\"" << pos << "\" y2=\"" << n * cell
        << "\" stroke=\"rgb(200,160,0)\" stroke-width=\"1\"/>\n";
    out << "<line class=\"grid\" x1=\"0\" y1=\"" << pos << "\" x2=\"" << n * cell << "\" y2=\"" << pos
        << "\" stroke=\"rgb(200,160,0)\" stroke-width=\"1\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("failed writing matrix SVG");
}

FingerprintMass delay_increase_mass(const TransitionModel& model) {
  const auto& cfg = model.config();
  const auto& de = cfg.d_hat_edges();
  const auto& we = cfg.w_hat_edges();
  const std::size_t n = cfg.n_states();
  const auto& counts = model.counts();
  FingerprintMass m;
  for (std::size_t from = 0; from < n; ++from) {
    for (std::size_t to = 0; to < n; ++to) {
      const auto c = counts[from * n + to];
      if (c == 0) continue;
      const auto next = cfg.unflat(to);
      if (de[next.d_idx] < 0.0) continue;
      const double w_lo = we[next.w_idx];
      const double w_hi = we[next.w_idx + 1];
      if (w_hi <= 0.0) {
        m.decrease += static_cast<double>(c);
      } else if (w_lo >= 0.0) {
        m.increase += static_cast<double>(c);
      } else {
        m.hold += static_cast<double>(c);
      }
    }
  }
  const double total = m.decrease + m.hold + m.increase;
  if (total > 0.0) {
    m.decrease /= total;
    m.hold /= total;
    m.increase /= total;
  }
  return m;
}

}  // namespace mdi
