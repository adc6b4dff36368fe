#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mdi/linksim.hpp"
#include "mdi/trainer.hpp"

namespace mdi {

/// Dense row-stochastic matrix; rows sum to 1 within 1e-9.
class StochasticMatrix {
 public:
  StochasticMatrix(std::size_t n, std::vector<double> row_major);

  static StochasticMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return p_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {p_.data() + i * n_, n_}; }
  const std::vector<double>& data() const noexcept { return p_; }

  /// mu * P for a row vector mu.
  std::vector<double> step(std::span<const double> mu) const;

  /// (P + I) / 2: aperiodic, same stationary distribution.
  StochasticMatrix lazy() const;

  /// True when the directed graph of nonzero entries is strongly connected.
  bool irreducible() const;

 private:
  void build_sparse();

  std::size_t n_;
  std::vector<double> p_;
  // CSR copy of the nonzeros, used for the vector-matrix products.
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

/// Probability vector over flattened states, normalized within 1e-9.
class StateDistribution {
 public:
  explicit StateDistribution(std::vector<double> probs);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const noexcept { return p_[i]; }
  const std::vector<double>& probs() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assembles full rows into an n x n matrix. Empty rows become unit
/// self-loops; smoothing s > 0 mixes each row with the uniform distribution:
/// row <- (1 - s) * row + s / n.
StochasticMatrix to_stochastic(const TransitionModel& model, double smoothing = 0.0);

/// Fraction of training departures from each state; zero on never-visited
/// states. Used as the power-iteration start for trained chains.
StateDistribution occupancy(const TransitionModel& model);

struct StationaryOptions {
  double tolerance = 1e-12;          // L-inf change between iterates
  std::uint64_t max_iterations = 1'000'000;
  double residual_bound = 1e-8;      // required ||pi P - pi||_inf
  std::optional<StateDistribution> start;  // uniform when absent
};

/// Power iteration pi <- pi P. Throws NonConvergenceError at the iteration
/// cap or when the fixed-point residual check fails; for periodic chains use
/// StochasticMatrix::lazy(), which has the same stationary distribution.
StateDistribution stationary(const StochasticMatrix& p, const StationaryOptions& options = {});

struct MixingReport {
  double epsilon = 0.0;
  std::uint64_t t_mix = 0;                 // max over one-hot starts, in steps (RTTs)
  std::vector<std::uint64_t> per_start;    // indexed by flat start state
};

/// For each one-hot start, the smallest t with ||mu_t - mu_{t+1}||_inf <
/// epsilon. Throws NonConvergenceError when a start exceeds max_iterations.
MixingReport mixing_time(const StochasticMatrix& p, double epsilon, std::uint64_t max_iterations = 1'000'000);

/// Several thresholds in one pass per start; reports come back in the order
/// of `epsilons`.
std::vector<MixingReport> mixing_times(const StochasticMatrix& p, std::span<const double> epsilons,
                                       std::uint64_t max_iterations = 1'000'000);

/// D(P || Q) in nats. Q entries below `floor` are raised to it and Q is
/// renormalized first; terms with p_i == 0 contribute nothing.
double kl_divergence(const StateDistribution& p, const StateDistribution& q, double floor = 1e-9);

double max_abs_diff(const StateDistribution& p, const StateDistribution& q);

/// Histogram of derived states after skipping the first `discard` epochs.
/// Throws std::invalid_argument unless at least discard + 10 derived epochs
/// are available.
StateDistribution empirical_distribution(std::span<const EpochRecord> epochs, std::size_t discard,
                                         const QuantizerConfig& cfg);
StateDistribution empirical_distribution(const SimResult& result, std::size_t discard, const QuantizerConfig& cfg);

/// Distribution heatmap: n_d rows (d_hat) by n_w columns (w_hat). CSV has a
/// header of w_hat bucket midpoints and a leading d_hat midpoint column.
void export_distribution_csv(const StateDistribution& dist, const QuantizerConfig& cfg, std::ostream& out);
void export_distribution_svg(const StateDistribution& dist, const QuantizerConfig& cfg, std::ostream& out);

/// Transition-matrix heatmap in quadrant layout: rows are current states
/// (d_hat_i, w_hat_i), columns next states (d_hat_{i+1}, w_hat_{i+1}); every
/// n_w cells a quadrant gridline. `probs` is row-major n_states^2.
void export_matrix_csv(std::span<const double> probs, const QuantizerConfig& cfg, std::ostream& out);
void export_matrix_svg(std::span<const double> probs, const QuantizerConfig& cfg, std::ostream& out);

/// Transition mass in the delay-increase quadrants, split by the sign of the
/// next window bucket.
struct FingerprintMass {
  double decrease = 0.0;  // w_hat_{i+1} bucket entirely at or below 0
  double hold = 0.0;      // bucket straddles 0
  double increase = 0.0;  // bucket entirely at or above 0
  double decrease_fraction() const noexcept {
    const double total = decrease + hold + increase;
    return total > 0 ? decrease / total : 0.0;
  }
};

/// Sums transition counts over the delay-increase quadrants (next d_hat
/// bucket entirely at or above 0) and returns their shares.
FingerprintMass delay_increase_mass(const TransitionModel& model);

}  // namespace mdi
