#include "mdi_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdi/linksim.hpp"
#include "mdi/markov_analysis.hpp"
#include "mdi/pipeline.hpp"
#include "mdi/trace.hpp"
#include "mdi/trainer.hpp"
#include "mdi_cli/atomic_output.hpp"

namespace mdi::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct NetworkOptions {
  std::int64_t prop_ms = 20;
  std::uint64_t queue_pkts = 0;  // 0: unbounded
  double loss = 0.0;
  double duration_s = 0.0;       // 0: one trace period
  std::uint32_t mtu = LinkTrace::kDefaultMtu;

  NetworkParams params() const {
    NetworkParams net;
    net.one_way_prop_ms = prop_ms;
    if (queue_pkts > 0) net.queue_capacity_pkts = queue_pkts;
    net.loss_rate = loss;
    net.duration_ms = static_cast<std::int64_t>(std::llround(duration_s * 1000.0));
    return net;
  }
};

void add_network_options(CLI::App* cmd, NetworkOptions& o) {
  cmd->add_option("--prop-ms", o.prop_ms, "One-way propagation delay (ms)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--queue-pkts", o.queue_pkts, "Drop-tail queue capacity in packets (0 = unbounded)");
  cmd->add_option("--loss", o.loss, "Random loss rate in [0, 1)")->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--duration", o.duration_s, "Run length in seconds (0 = one trace period)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--mtu", o.mtu, "Bytes per delivery opportunity")->check(CLI::PositiveNumber);
}

std::vector<EpochRecord> load_epochs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_epoch_csv(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<PacketEvent> load_packets(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_packet_csv(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

/// result.csv -> result.packets.csv
fs::path packets_path_for(const fs::path& epoch_csv) {
  fs::path p = epoch_csv;
  if (p.extension() == ".csv") p.replace_extension();
  p += ".packets.csv";
  return p;
}

void require_parent_dir(const fs::path& out) {
  const auto parent = out.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw std::runtime_error("output directory does not exist: " + parent.string());
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json quartiles_json(const Quartiles& q) {
  return {{"mean", q.mean}, {"median", q.median}, {"p25", q.p25}, {"p75", q.p75}};
}

std::string quartiles_line(const char* label, const Quartiles& q, const char* unit) {
  return std::string(label) + " mean " + fmt("%.3f", q.mean) + " median " + fmt("%.3f", q.median) + " p25 " +
         fmt("%.3f", q.p25) + " p75 " + fmt("%.3f", q.p75) + " " + unit;
}

StateDistribution model_stationary(const TransitionModel& model, const StochasticMatrix& p) {
  StationaryOptions opts;
  opts.start = occupancy(model);
  return stationary(p, opts);
}

std::vector<NamedTrace> load_trace_dir(const fs::path& dir, std::uint32_t mtu) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no traces found in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<NamedTrace> traces;
  traces.reserve(files.size());
  for (const auto& f : files) {
    try {
      traces.push_back({f.filename().string(), load_trace_file(f.string(), mtu)});
    } catch (const TraceParseError& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
  }
  return traces;
}

// ---------------------------------------------------------------- gen-trace

struct GenTraceOptions {
  std::string out;
  std::string out_dir;
  std::size_t count = 1;
  SyntheticTraceSpec spec;
};

int cmd_gen_trace(const GenTraceOptions& o, std::ostream& out) {
  if (o.out.empty() == o.out_dir.empty()) throw std::runtime_error("give exactly one of --out or --out-dir");
  o.spec.validate();
  std::vector<PendingFile> files;
  if (!o.out.empty()) {
    require_parent_dir(o.out);
    std::ostringstream ss;
    save_trace(gen_rapidly_changing(o.spec), ss);
    files.push_back({o.out, ss.str()});
  } else {
    if (!fs::is_directory(o.out_dir)) throw std::runtime_error("output directory does not exist: " + o.out_dir);
    if (o.count == 0) throw std::runtime_error("--count must be at least 1");
    for (std::size_t i = 0; i < o.count; ++i) {
      SyntheticTraceSpec s = o.spec;
      s.seed = o.spec.seed + i;
      char name[32];
      std::snprintf(name, sizeof name, "trace_%04zu.trace", i);
      std::ostringstream ss;
      save_trace(gen_rapidly_changing(s), ss);
      files.push_back({fs::path(o.out_dir) / name, ss.str()});
    }
  }
  commit_files(files);
  out << "wrote " << files.size() << " trace file(s)\n";
  return 0;
}

// -------------------------------------------------------------------- train

struct TrainOptions {
  std::string traces;
  std::string controller = "verus-like";
  std::string model;  // only for --controller mdi
  std::size_t runs = 1;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t n_d = QuantizerConfig::kDefaultDelayStates;
  std::size_t n_w = QuantizerConfig::kDefaultWindowStates;
  NetworkOptions net;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  require_parent_dir(o.out);
  if (o.runs == 0) throw std::runtime_error("--runs must be at least 1");
  ControllerSpec spec;
  spec.name = o.controller;
  if (o.controller == "mdi") {
    if (o.model.empty()) throw std::runtime_error("controller 'mdi' requires --model");
    spec.model = std::make_shared<const TransitionModel>(load_model_file(o.model));
  }
  make_controller(spec, 0);  // rejects unknown names before any simulation
  const auto traces = load_trace_dir(o.traces, o.net.mtu);

  const auto trained = train_model(traces, spec, o.net.params(), o.runs, o.seed, o.n_d, o.n_w);
  std::ostringstream ss;
  save_model(trained.model, ss);
  commit_files({{o.out, ss.str()}});

  const auto& s = trained.summary;
  out << "runs " << s.runs << " epochs " << s.epochs << " transitions " << s.transitions << " distinct_states "
      << s.distinct_states << " empty_row_fraction " << fmt("%.4f", s.empty_row_fraction) << '\n';
  return 0;
}

// ---------------------------------------------------------------------- run

struct RunOptions {
  std::string controller = "mdi";
  std::string model;
  std::string trace;
  std::string out;
  std::string packets_out;
  std::uint64_t seed = 1;
  std::optional<double> c1, c2, w_init;
  std::optional<std::int64_t> epoch_ms;
  NetworkOptions net;
};

int cmd_run(const RunOptions& o, std::ostream& out) {
  require_parent_dir(o.out);
  const fs::path packets_out = o.packets_out.empty() ? packets_path_for(o.out) : fs::path(o.packets_out);
  require_parent_dir(packets_out);
  if (packets_out == fs::path(o.out)) throw std::runtime_error("epoch and packet outputs must differ");

  ControllerSpec spec;
  spec.name = o.controller;
  std::shared_ptr<const TransitionModel> model;
  if (!o.model.empty()) model = std::make_shared<const TransitionModel>(load_model_file(o.model));
  if (o.controller == "mdi") {
    if (!model) throw std::runtime_error("controller 'mdi' requires --model");
    spec.model = model;
  }
  if (o.c1) spec.mdi.c1 = *o.c1;
  if (o.c2) spec.mdi.c2 = *o.c2;
  if (o.w_init) spec.mdi.w_init = *o.w_init;
  if (o.epoch_ms) {
    spec.mdi.epoch_ms = *o.epoch_ms;
    spec.verus.epoch_ms = *o.epoch_ms;
    spec.copa.epoch_ms = *o.epoch_ms;
    spec.pinned_epoch_ms = *o.epoch_ms;
  }
  spec.mdi.validate();
  make_controller(spec, o.seed);

  const NamedTrace trace{fs::path(o.trace).filename().string(), load_trace_file(o.trace, o.net.mtu)};
  const auto run = run_controller(trace, spec, o.net.params(), o.seed);
  auto epochs = run.result.epochs;
  if (model && epochs.size() >= 2) epochs = derive_states(epochs, model->config());

  std::ostringstream es, ps;
  write_epoch_csv(epochs, es);
  write_packet_csv(run.result.packets, ps);
  commit_files({{o.out, es.str()}, {packets_out, ps.str()}});

  const auto& sum = run.result.summary;
  out << quartiles_line("throughput", sum.throughput_mbps, "Mbit/s") << '\n';
  out << quartiles_line("delay", sum.delay_ms, "ms") << '\n';
  out << "epochs " << run.result.epochs.size() << " packets " << run.result.packets.size() << " dropped "
      << run.result.counters.dropped << '\n';
  if (run.mdi) {
    const auto& d = *run.mdi;
    out << "mdi sampled " << d.sampled << " fallback " << d.fallback << " boundary_up " << d.boundary_up
        << " boundary_down " << d.boundary_down << " zero_ack " << d.zero_ack << " fallback_fraction "
        << fmt("%.4f", d.fallback_fraction()) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeOptions {
  std::string model;
  double smoothing = 0.0;
  bool lazy = false;
  std::vector<double> eps{1e-3, 1e-5, 1e-7};
  std::uint64_t max_steps = 1'000'000;
  std::string out;
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  require_parent_dir(o.out);
  if (!(o.smoothing >= 0.0 && o.smoothing <= 1.0)) throw std::runtime_error("--smoothing must lie in [0, 1]");
  if (o.eps.empty()) throw std::runtime_error("--eps needs at least one threshold");
  for (double e : o.eps) {
    if (!(e > 0.0)) throw std::runtime_error("mixing thresholds must be positive");
  }
  const auto model = load_model_file(o.model);
  auto p = to_stochastic(model, o.smoothing);
  if (o.lazy) p = p.lazy();
  const auto pi = model_stationary(model, p);
  const auto reports = mixing_times(p, o.eps, o.max_steps);

  std::size_t empty_rows = 0;
  for (std::size_t i = 0; i < model.n_states(); ++i) empty_rows += model.full_row_empty(i) ? 1 : 0;
  const bool irreducible = p.irreducible();

  json mixing = json::array();
  for (const auto& r : reports) {
    mixing.push_back({{"epsilon", r.epsilon}, {"t_mix", r.t_mix}, {"per_start", r.per_start}});
  }
  json report = {
      {"n_d", model.config().n_d()},
      {"n_w", model.config().n_w()},
      {"n_states", model.n_states()},
      {"total_transitions", model.total_transitions()},
      {"smoothing", o.smoothing},
      {"lazy", o.lazy},
      {"stationary_start", "occupancy"},
      {"stationary", pi.probs()},
      {"mixing", mixing},
      {"diagnostics", {{"empty_rows", empty_rows}, {"irreducible", irreducible}}},
  };
  commit_files({{o.out, report.dump(2) + "\n"}});

  out << "states " << model.n_states() << " empty_rows " << empty_rows << " irreducible "
      << (irreducible ? "yes" : "no") << '\n';
  for (const auto& r : reports) out << "t_mix(" << r.epsilon << ") " << r.t_mix << '\n';
  return 0;
}

// ------------------------------------------------------------------ compare

struct CompareOptions {
  std::string model;
  std::string result;
  std::string baseline;
  std::string candidate;
  std::size_t discard = 0;
  std::size_t bins = 50;
  double smoothing = 0.0;
  std::int64_t bin_ms = 500;
  std::uint32_t mtu = LinkTrace::kDefaultMtu;
  std::string out;
  std::string pdf_out;
};

json histogram_json(const Histogram& h) { return {{"lo", h.lo}, {"hi", h.hi}, {"density", h.density}}; }

json metric_json(const MetricComparison& c) {
  return {{"baseline", quartiles_json(c.baseline)},
          {"candidate", quartiles_json(c.candidate)},
          {"relative_median_diff", c.relative_median_diff},
          {"baseline_pdf", histogram_json(c.baseline_pdf)},
          {"candidate_pdf", histogram_json(c.candidate_pdf)}};
}

void append_pdf_rows(std::ostream& os, const char* metric, const MetricComparison& c) {
  const auto& b = c.baseline_pdf;
  const std::size_t n = b.density.size();
  const double width = n ? (b.hi - b.lo) / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    os << metric << ',' << i << ',' << b.lo + width * static_cast<double>(i) << ','
       << b.lo + width * static_cast<double>(i + 1) << ',' << b.density[i] << ',' << c.candidate_pdf.density[i]
       << '\n';
  }
}

std::int64_t packet_horizon_ms(const std::vector<PacketEvent>& a, const std::vector<PacketEvent>& b) {
  std::int64_t t = 0;
  for (const auto* v : {&a, &b}) {
    for (const auto& p : *v) t = std::max(t, p.sent_ms + 1);
  }
  return std::max<std::int64_t>(t, 1);
}

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  const bool pair_mode = !o.baseline.empty() || !o.candidate.empty();
  if (pair_mode && (o.baseline.empty() || o.candidate.empty())) {
    throw std::runtime_error("--baseline and --candidate must be given together");
  }
  if (pair_mode && !o.result.empty()) throw std::runtime_error("--result cannot be combined with --baseline/--candidate");
  if (!pair_mode && (o.result.empty() || o.model.empty())) {
    throw std::runtime_error("give --model with --result, or --baseline with --candidate");
  }
  if (o.bins == 0) throw std::runtime_error("--bins must be at least 1");
  if (!o.out.empty()) require_parent_dir(o.out);
  if (!o.pdf_out.empty()) require_parent_dir(o.pdf_out);

  std::optional<TransitionModel> model;
  if (!o.model.empty()) model = load_model_file(o.model);

  json report;
  auto state_histogram = [&](const std::vector<EpochRecord>& epochs, const std::string& what) {
    if (epochs.size() < 2) throw std::runtime_error(what + " has fewer than two epochs");
    return empirical_distribution(derive_states(epochs, model->config()), o.discard, model->config());
  };
  auto vs_stationary = [&](const StateDistribution& q) {
    const auto p = model_stationary(*model, to_stochastic(*model, o.smoothing));
    const double kl = kl_divergence(p, q);
    const double diff = max_abs_diff(p, q);
    report["stationary_vs_result"] = {
        {"discard", o.discard}, {"kl_nats", kl}, {"max_abs_diff", diff}, {"smoothing", o.smoothing}};
    out << "stationary vs result: kl " << fmt("%.6f", kl) << " max_abs_diff " << fmt("%.6f", diff) << '\n';
  };

  if (!pair_mode) {
    vs_stationary(state_histogram(load_epochs(o.result), o.result));
  } else {
    const auto base_epochs = load_epochs(o.baseline);
    const auto cand_epochs = load_epochs(o.candidate);
    const auto base_pk = load_packets(packets_path_for(o.baseline));
    const auto cand_pk = load_packets(packets_path_for(o.candidate));

    const std::int64_t horizon = packet_horizon_ms(base_pk, cand_pk);
    const auto thr =
        compare_series(throughput_series(base_pk, horizon, o.bin_ms, o.mtu),
                       throughput_series(cand_pk, horizon, o.bin_ms, o.mtu), o.bins);
    const auto del = compare_series(delay_series(base_pk), delay_series(cand_pk), o.bins);
    report["throughput_mbps"] = metric_json(thr);
    report["delay_ms"] = metric_json(del);
    out << quartiles_line("baseline throughput", thr.baseline, "Mbit/s") << '\n';
    out << quartiles_line("candidate throughput", thr.candidate, "Mbit/s") << '\n';
    out << quartiles_line("baseline delay", del.baseline, "ms") << '\n';
    out << quartiles_line("candidate delay", del.candidate, "ms") << '\n';
    out << "relative_median_diff throughput " << fmt("%.4f", thr.relative_median_diff) << " delay "
        << fmt("%.4f", del.relative_median_diff) << '\n';
    if (model) {
      const auto p = state_histogram(base_epochs, o.baseline);
      const auto q = state_histogram(cand_epochs, o.candidate);
      const double kl = kl_divergence(p, q);
      const double diff = max_abs_diff(p, q);
      report["baseline_vs_candidate"] = {{"discard", o.discard}, {"kl_nats", kl}, {"max_abs_diff", diff}};
      out << "baseline vs candidate states: kl " << fmt("%.6f", kl) << " max_abs_diff " << fmt("%.6f", diff) << '\n';
      vs_stationary(q);
    }

    if (!o.pdf_out.empty()) {
      std::ostringstream pdf;
      pdf.precision(17);
      pdf << "metric,bin,lo,hi,baseline_density,candidate_density\n";
      append_pdf_rows(pdf, "throughput_mbps", thr);
      append_pdf_rows(pdf, "delay_ms", del);
      std::vector<PendingFile> files{{o.pdf_out, pdf.str()}};
      if (!o.out.empty()) files.push_back({o.out, report.dump(2) + "\n"});
      commit_files(files);
      return 0;
    }
  }
  if (!o.out.empty()) commit_files({{o.out, report.dump(2) + "\n"}});
  return 0;
}

// -------------------------------------------------------------- fingerprint

struct FingerprintOptions {
  std::string model;
  std::string out;
};

int cmd_fingerprint(const FingerprintOptions& o, std::ostream& out, std::ostream& err) {
  fs::path base = o.out;
  if (base.extension() == ".svg" || base.extension() == ".csv") base.replace_extension();
  require_parent_dir(base);
  const auto model = load_model_file(o.model);
  if (model.total_transitions() == 0) err << "warning: model has no transitions; rendering an empty matrix\n";

  std::ostringstream svg, csv;
  export_matrix_svg(model.quadrant_probabilities(), model.config(), svg);
  export_matrix_csv(model.quadrant_probabilities(), model.config(), csv);
  fs::path svg_path = base, csv_path = base;
  svg_path += ".svg";
  csv_path += ".csv";
  commit_files({{svg_path, svg.str()}, {csv_path, csv.str()}});

  const auto mass = delay_increase_mass(model);
  out << "delay-increase quadrants: decrease " << fmt("%.4f", mass.decrease) << " hold " << fmt("%.4f", mass.hold)
      << " increase " << fmt("%.4f", mass.increase) << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov-model congestion control toolkit", "mdi"};
  app.require_subcommand(1);

  GenTraceOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-trace", "Synthesize rapidly changing capacity traces");
  gen_cmd->add_option("--out", gen.out, "Output trace file");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory for --count traces");
  gen_cmd->add_option("--count", gen.count, "Number of traces with --out-dir (seeds seed..seed+count-1)");
  gen_cmd->add_option("--duration", gen.spec.duration_s, "Trace length (s)");
  gen_cmd->add_option("--segment", gen.spec.segment_s, "Capacity hold interval (s)");
  gen_cmd->add_option("--rate-min", gen.spec.rate_min_mbps, "Minimum capacity (Mbit/s)");
  gen_cmd->add_option("--rate-max", gen.spec.rate_max_mbps, "Maximum capacity (Mbit/s)");
  gen_cmd->add_option("--seed", gen.spec.seed, "RNG seed");
  gen_cmd->add_option("--mtu", gen.spec.mtu_bytes, "Bytes per delivery opportunity");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a transition model from controller runs");
  train_cmd->add_option("--traces", train.traces, "Directory of trace files")->required();
  train_cmd->add_option("--controller", train.controller, "verus-like|copa-like|mdi|pinned");
  train_cmd->add_option("--model", train.model, "Model driving --controller mdi")->check(CLI::ExistingFile);
  train_cmd->add_option("--runs", train.runs, "Runs per trace");
  train_cmd->add_option("--out", train.out, "Output model file")->required();
  train_cmd->add_option("--seed", train.seed, "Master seed");
  train_cmd->add_option("--n-d", train.n_d, "Delay buckets")->check(CLI::Range(2, 4096));
  train_cmd->add_option("--n-w", train.n_w, "Window buckets")->check(CLI::Range(2, 4096));
  add_network_options(train_cmd, train.net);

  RunOptions runo;
  auto* run_cmd = app.add_subcommand("run", "Run one controller over a trace");
  run_cmd->add_option("--controller", runo.controller, "verus-like|copa-like|mdi|pinned");
  run_cmd->add_option("--model", runo.model, "Model file")->check(CLI::ExistingFile);
  run_cmd->add_option("--trace", runo.trace, "Trace file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", runo.out, "Epoch CSV output")->required();
  run_cmd->add_option("--packets-out", runo.packets_out, "Packet CSV output (default <out>.packets.csv)");
  run_cmd->add_option("--seed", runo.seed, "Run seed");
  run_cmd->add_option("--c1", runo.c1, "MDI boundary increase multiplier");
  run_cmd->add_option("--c2", runo.c2, "MDI boundary decrease multiplier");
  run_cmd->add_option("--w-init", runo.w_init, "MDI initial window (packets)");
  run_cmd->add_option("--epoch-ms", runo.epoch_ms, "Controller epoch (ms)");
  add_network_options(run_cmd, runo.net);

  AnalyzeOptions an;
  auto* an_cmd = app.add_subcommand("analyze", "Stationary distribution and mixing times of a model");
  an_cmd->add_option("--model", an.model, "Model file")->required()->check(CLI::ExistingFile);
  an_cmd->add_option("--smoothing", an.smoothing, "Uniform smoothing weight");
  an_cmd->add_flag("--lazy", an.lazy, "Analyze (P + I) / 2");
  an_cmd->add_option("--eps", an.eps, "Mixing thresholds")->delimiter(',');
  an_cmd->add_option("--max-steps", an.max_steps, "Iteration cap per start state");
  an_cmd->add_option("--out", an.out, "JSON report")->required();

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare results with each other or with a model");
  cmp_cmd->add_option("--model", cmp.model, "Model file")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--result", cmp.result, "Epoch CSV to compare with the model")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--baseline", cmp.baseline, "Baseline epoch CSV")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--candidate", cmp.candidate, "Candidate epoch CSV")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--discard", cmp.discard, "Epochs to skip before the state histogram");
  cmp_cmd->add_option("--bins", cmp.bins, "PDF bins");
  cmp_cmd->add_option("--smoothing", cmp.smoothing, "Uniform smoothing weight for the model chain");
  cmp_cmd->add_option("--bin-ms", cmp.bin_ms, "Throughput bin (ms)")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--mtu", cmp.mtu, "Bytes per packet for throughput")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--out", cmp.out, "JSON report");
  cmp_cmd->add_option("--pdf-out", cmp.pdf_out, "PDF table CSV");

  FingerprintOptions fp;
  auto* fp_cmd = app.add_subcommand("fingerprint", "Render a model's transition matrix");
  fp_cmd->add_option("--model", fp.model, "Model file")->required()->check(CLI::ExistingFile);
  fp_cmd->add_option("--out", fp.out, "Output path without extension (.svg and .csv are written)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_trace(gen, out);
    if (train_cmd->parsed()) return cmd_train(train, out);
    if (run_cmd->parsed()) return cmd_run(runo, out);
    if (an_cmd->parsed()) return cmd_analyze(an, out);
    if (cmp_cmd->parsed()) return cmd_compare(cmp, out);
    if (fp_cmd->parsed()) return cmd_fingerprint(fp, out, err);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return 1;
  }
  return 1;
}

}  // namespace mdi::cli
