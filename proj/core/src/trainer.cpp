#include "mdi/trainer.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "text_util.hpp"

namespace mdi {

TransitionModel::TransitionModel(QuantizerConfig cfg)
    : cfg_(std::move(cfg)), counts_(cfg_.n_states() * cfg_.n_states(), 0) {}

std::uint64_t TransitionModel::count(StateIndex from, StateIndex to) const {
  return counts_[cfg_.flat(from) * n_states() + cfg_.flat(to)];
}

void TransitionModel::add(StateIndex from, StateIndex to, std::uint64_t n) {
  counts_[cfg_.flat(from) * n_states() + cfg_.flat(to)] += n;
  total_ += n;
  normalized_ = false;
}

void TransitionModel::merge(const TransitionModel& other) {
  if (!(other.cfg_ == cfg_)) throw std::invalid_argument("cannot merge models with different quantizer configs");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  normalized_ = false;
}

void TransitionModel::normalize() {
  const std::size_t n = n_states();
  const std::size_t n_d = cfg_.n_d();
  const std::size_t n_w = cfg_.n_w();
  quadrant_probs_.assign(counts_.size(), 0.0);
  full_probs_.assign(counts_.size(), 0.0);
  quadrant_empty_.assign(n * n_d, 1);
  full_empty_.assign(n, 1);

  for (std::size_t from = 0; from < n; ++from) {
    const std::uint64_t* row = counts_.data() + from * n;
    std::uint64_t row_total = 0;
    for (std::size_t r = 0; r < n_d; ++r) {
      const std::uint64_t* band = row + r * n_w;
      std::uint64_t band_total = 0;
      for (std::size_t v = 0; v < n_w; ++v) band_total += band[v];
      row_total += band_total;
      if (band_total == 0) continue;
      quadrant_empty_[from * n_d + r] = 0;
      double* out = quadrant_probs_.data() + from * n + r * n_w;
      for (std::size_t v = 0; v < n_w; ++v) out[v] = static_cast<double>(band[v]) / static_cast<double>(band_total);
    }
    if (row_total == 0) continue;
    full_empty_[from] = 0;
    double* out = full_probs_.data() + from * n;
    for (std::size_t to = 0; to < n; ++to) out[to] = static_cast<double>(row[to]) / static_cast<double>(row_total);
  }
  normalized_ = true;
}

void TransitionModel::require_normalized() const {
  if (!normalized_) throw std::logic_error("transition model is not normalized");
}

std::span<const double> TransitionModel::quadrant_row(StateIndex from, std::size_t next_d_idx) const {
  require_normalized();
  if (next_d_idx >= cfg_.n_d()) throw std::out_of_range("next delay index out of range");
  const std::size_t f = cfg_.flat(from);
  if (quadrant_empty_[f * cfg_.n_d() + next_d_idx]) return {};
  return {quadrant_probs_.data() + f * n_states() + next_d_idx * cfg_.n_w(), cfg_.n_w()};
}

std::span<const double> TransitionModel::full_row(StateIndex from) const {
  require_normalized();
  const std::size_t f = cfg_.flat(from);
  if (full_empty_[f]) return {};
  return {full_probs_.data() + f * n_states(), n_states()};
}

bool TransitionModel::full_row_empty(std::size_t from_flat) const {
  require_normalized();
  return full_empty_.at(from_flat) != 0;
}

const std::vector<double>& TransitionModel::quadrant_probabilities() const {
  require_normalized();
  return quadrant_probs_;
}

const std::vector<double>& TransitionModel::full_probabilities() const {
  require_normalized();
  return full_probs_;
}

std::vector<std::uint64_t> TransitionModel::row_totals() const {
  const std::size_t n = n_states();
  std::vector<std::uint64_t> totals(n, 0);
  for (std::size_t from = 0; from < n; ++from) {
    for (std::size_t to = 0; to < n; ++to) totals[from] += counts_[from * n + to];
  }
  return totals;
}

std::vector<EpochRecord> derive_states(std::span<const EpochRecord> epochs, const QuantizerConfig& cfg) {
  if (epochs.size() < 2) throw std::invalid_argument("need at least two epochs to derive states");
  std::vector<EpochRecord> out(epochs.begin(), epochs.end());
  out.front().derived.reset();
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double d_hat = compute_d_hat(out[i].delay_ms, out[i - 1].delay_ms);
    const double w_hat = compute_w_hat(out[i].window_pkts, out[i - 1].window_pkts);
    const CompositeObservation obs(d_hat, w_hat);
    out[i].derived = DerivedState{d_hat, w_hat, quantize(obs, cfg)};
  }
  return out;
}

std::vector<CompositeObservation> composite_observations(std::span<const EpochRecord> epochs) {
  std::vector<CompositeObservation> out;
  if (epochs.size() < 2) return out;
  out.reserve(epochs.size() - 1);
  for (std::size_t i = 1; i < epochs.size(); ++i) {
    out.emplace_back(compute_d_hat(epochs[i].delay_ms, epochs[i - 1].delay_ms),
                     compute_w_hat(epochs[i].window_pkts, epochs[i - 1].window_pkts));
  }
  return out;
}

void count_transitions(std::span<const EpochRecord> derived_epochs, TransitionModel& model) {
  const auto& cfg = model.config();
  const EpochRecord* prev = nullptr;
  for (const auto& e : derived_epochs) {
    if (!e.derived) {
      prev = nullptr;
      continue;
    }
    if (e.derived->state.d_idx >= cfg.n_d() || e.derived->state.w_idx >= cfg.n_w()) {
      throw std::invalid_argument("derived state does not fit the model's quantizer config");
    }
    if (prev) model.add(prev->derived->state, e.derived->state);
    prev = &e;
  }
}

void save_model(const TransitionModel& model, std::ostream& out) {
  using detail::format_double;
  const auto& cfg = model.config();
  out << "MDIMODEL v1\n";
  out << cfg.n_d() << ' ' << cfg.n_w() << ' ' << model.total_transitions() << '\n';
  auto edges = [&](const std::vector<double>& e) {
    for (std::size_t i = 0; i < e.size(); ++i) out << (i ? " " : "") << format_double(e[i]);
    out << '\n';
  };
  edges(cfg.d_hat_edges());
  edges(cfg.w_hat_edges());
  const std::size_t n = model.n_states();
  const auto& counts = model.counts();
  for (std::size_t from = 0; from < n; ++from) {
    for (std::size_t to = 0; to < n; ++to) {
      const auto c = counts[from * n + to];
      if (c == 0) continue;
      const auto a = cfg.unflat(from);
      const auto b = cfg.unflat(to);
      out << a.d_idx << ' ' << a.w_idx << ' ' << b.d_idx << ' ' << b.w_idx << ' ' << c << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing model");
}

void save_model_file(const TransitionModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_model(model, out);
}

namespace {

std::vector<double> parse_edges(const std::string& line, std::size_t expected, const char* what) {
  const auto tokens = detail::split_ws(line);
  if (tokens.size() != expected) {
    throw ModelFormatError(std::string(what) + " edge count " + std::to_string(tokens.size()) +
                           " does not match declared " + std::to_string(expected));
  }
  std::vector<double> edges;
  for (auto t : tokens) {
    double v = 0.0;
    if (!detail::parse_number(t, v)) throw ModelFormatError(std::string("bad ") + what + " edge '" + std::string(t) + "'");
    edges.push_back(v);
  }
  return edges;
}

}  // namespace

TransitionModel load_model(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw ModelFormatError(std::string("truncated model: missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next_line("header");
  if (line != "MDIMODEL v1") throw ModelFormatError("unsupported model header '" + line + "'");

  next_line("dimensions");
  const auto dims = detail::split_ws(line);
  std::size_t n_d = 0;
  std::size_t n_w = 0;
  std::uint64_t declared_total = 0;
  if (dims.size() != 3 || !detail::parse_number(dims[0], n_d) || !detail::parse_number(dims[1], n_w) ||
      !detail::parse_number(dims[2], declared_total)) {
    throw ModelFormatError("malformed dimension line '" + line + "'");
  }
  if (n_d < 2 || n_w < 2 || n_d > 4096 || n_w > 4096) throw ModelFormatError("implausible state dimensions");

  next_line("d_hat edges");
  auto d_edges = parse_edges(line, n_d + 1, "d_hat");
  next_line("w_hat edges");
  auto w_edges = parse_edges(line, n_w + 1, "w_hat");

  std::optional<QuantizerConfig> cfg;
  try {
    cfg.emplace(std::move(d_edges), std::move(w_edges));
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("invalid edges: ") + e.what());
  }

  TransitionModel model(*cfg);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
  std::size_t lineno = 4;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_ws(line);
    std::size_t k = 0, l = 0, r = 0, v = 0;
    std::uint64_t c = 0;
    if (f.size() != 5 || !detail::parse_number(f[0], k) || !detail::parse_number(f[1], l) ||
        !detail::parse_number(f[2], r) || !detail::parse_number(f[3], v) || !detail::parse_number(f[4], c)) {
      throw ModelFormatError("malformed count at line " + std::to_string(lineno));
    }
    if (k >= n_d || r >= n_d || l >= n_w || v >= n_w) {
      throw ModelFormatError("state index out of range at line " + std::to_string(lineno));
    }
    if (c == 0) throw ModelFormatError("zero count at line " + std::to_string(lineno));
    if (!seen.emplace(k, l, r, v).second) throw ModelFormatError("duplicate count at line " + std::to_string(lineno));
    model.add({k, l}, {r, v}, c);
  }
  if (model.total_transitions() != declared_total) {
    throw ModelFormatError("count total " + std::to_string(model.total_transitions()) + " does not match declared " +
                           std::to_string(declared_total) + " (truncated or corrupted file)");
  }
  model.normalize();
  return model;
}

TransitionModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  return load_model(in);
}

}  // namespace mdi
