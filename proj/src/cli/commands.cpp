// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bitwave/cli/config.hpp"
#include "bitwave/core/error.hpp"
#include "bitwave/eval/bench.hpp"
#include "bitwave/eval/enhance.hpp"
#include "bitwave/eval/metrics.hpp"
#include "bitwave/nn/model_io.hpp"

namespace bitwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Flags shared by every subcommand. Empty strings and unset options leave
/// the config value alone.
struct CommonFlags {
  std::string config;
  std::string task;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out;
};

struct TrainFlags {
  std::string bits;
  int epochs = 0;
  CLI::Option* epochs_opt = nullptr;
  double lr = 0.0;
  CLI::Option* lr_opt = nullptr;
  std::size_t batch = 0;
  CLI::Option* batch_opt = nullptr;
  std::string hidden;
  bool no_qat = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--task", f.task, "vad | enhance");
  f.seed_opt = sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--out", f.out, "Output directory");
}

void add_train_flags(CLI::App* sub, TrainFlags& f, bool with_bits) {
  if (with_bits) sub->add_option("--bits", f.bits, "Weight and neuron bits, WxN");
  f.epochs_opt = sub->add_option("--epochs", f.epochs, "Training epochs");
  f.lr_opt = sub->add_option("--lr", f.lr, "Learning rate");
  f.batch_opt = sub->add_option("--batch", f.batch, "Mini-batch size");
  sub->add_option("--hidden", f.hidden, "Hidden layer widths, comma separated");
  sub->add_flag("--no-qat", f.no_qat, "Train in full precision regardless of the bit widths");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.task.empty()) {
    try {
      c.task = nn::parse_task(f.task);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (f.seed_opt->count() > 0) c.seed = f.seed;
  if (!f.out.empty()) c.out = f.out;
  return c;
}

void apply(const TrainFlags& f, RunConfig& c) {
  if (!f.bits.empty()) std::tie(c.weight_bits, c.neuron_bits) = parse_bits(f.bits);
  if (f.epochs_opt->count() > 0) c.epochs = f.epochs;
  if (f.lr_opt->count() > 0) c.learning_rate = f.lr;
  if (f.batch_opt->count() > 0) c.batch = f.batch;
  if (!f.hidden.empty()) {
    c.hidden.clear();
    for (double h : parse_number_list(f.hidden)) c.hidden.push_back(static_cast<int>(h));
  }
  if (f.no_qat) c.qat = false;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string format(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

dsp::DatasetManifest open_manifest(const RunConfig& c) {
  if (c.manifest.empty()) throw UsageError("--manifest is required");
  if (!fs::exists(c.manifest)) throw UsageError("manifest not found: " + c.manifest);
  return dsp::read_manifest(c.manifest);
}

eval::TaskSets load_sets(const dsp::DatasetManifest& manifest, const RunConfig& c, std::ostream& err) {
  err << "loading " << nn::to_string(c.task) << " features\n";
  return eval::load_task_sets(manifest, c.task, c.stft, c.context);
}

void log_epochs(eval::TrainSetup& setup, std::ostream& err) {
  setup.options.on_epoch = [&err](int epoch, double train, double valid) {
    err << "epoch " << epoch << " train " << train << " valid " << valid << "\n";
  };
}

std::string loss_log_csv(const nn::TrainingLog& log) {
  std::string csv = "epoch,train_loss,valid_loss\n";
  for (std::size_t i = 0; i < log.train_loss.size(); ++i)
    csv += std::to_string(i + 1) + "," + format(log.train_loss[i]) + "," + format(log.valid_loss[i]) + "\n";
  return csv;
}

// synth ----------------------------------------------------------------------

struct SynthFlags {
  CommonFlags common;
  std::string counts, snr_list, noise_kinds, clean_dir, noise_dir;
  double seconds = 0.0;
  CLI::Option* seconds_opt = nullptr;
  bool self_contained = false;
  bool no_reverb = false;
};

int cmd_synth(const SynthFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig c = resolve(f.common);
  if (!f.counts.empty()) c.counts = parse_counts(f.counts);
  if (!f.snr_list.empty()) c.snr_db = parse_number_list(f.snr_list);
  if (!f.noise_kinds.empty()) {
    c.noise_kinds.clear();
    std::stringstream in(f.noise_kinds);
    std::string name;
    try {
      while (std::getline(in, name, ',')) c.noise_kinds.push_back(dsp::parse_noise_kind(name));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (f.seconds_opt->count() > 0) c.seconds = f.seconds;
  if (f.self_contained) c.self_contained = true;
  if (!f.clean_dir.empty()) c.clean_dir = f.clean_dir;
  if (!f.noise_dir.empty()) c.noise_dir = f.noise_dir;
  if (f.no_reverb) c.rt60_min_ms = c.rt60_max_ms = 0.0;
  validate(c);
  if (!c.self_contained && (c.clean_dir.empty() || c.noise_dir.empty()))
    throw UsageError("synth needs --clean-dir and --noise-dir, or --self-contained");

  dsp::SynthOptions options = synth_options(c);
  if (!c.clean_dir.empty()) options.clean_sources = dsp::list_wav_files(c.clean_dir);
  if (!c.noise_dir.empty()) options.noise_sources = dsp::list_wav_files(c.noise_dir);
  err << "synthesizing " << c.counts[0] << "/" << c.counts[1] << "/" << c.counts[2] << " files\n";
  const auto manifest = dsp::synthesize_dataset(options, c.out);
  out << "wrote " << manifest.entries.size() << " entries to " << (fs::path(c.out) / "manifest.jsonl").string()
      << "\n";
  return kExitOk;
}

// train ----------------------------------------------------------------------

struct TrainCmdFlags {
  CommonFlags common;
  TrainFlags train;
  std::string manifest, model;
};

int cmd_train(const TrainCmdFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig c = resolve(f.common);
  apply(f.train, c);
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.model.empty()) c.model = f.model;
  validate(c);
  const auto manifest = open_manifest(c);
  const auto sets = load_sets(manifest, c, err);
  eval::TrainSetup setup = train_setup(c);
  log_epochs(setup, err);
  const nn::Model model = eval::train_task_model(sets, setup);

  const fs::path model_path = c.model.empty() ? fs::path(c.out) / "model.bwnn" : fs::path(c.model);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  nn::save_model(model, model_path);
  write_text(fs::path(c.out) / "train_log.csv", loss_log_csv(model.log));

  const auto& log = model.log;
  out << "model " << model_path.string() << "\n";
  out << "final train loss " << format(log.train_loss.back()) << " valid loss " << format(log.valid_loss.back())
      << " best epoch " << log.best_epoch << "\n";
  return kExitOk;
}

// eval -----------------------------------------------------------------------

struct EvalFlags {
  CommonFlags common;
  std::string manifest, model, predictions, split = "test";
};

std::vector<int> decisions(const json& values, const std::string& id) {
  if (!values.is_array()) throw DataError("predictions for " + id + " must be an array");
  std::vector<int> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) throw DataError("predictions for " + id + " must be numbers");
    out.push_back(v.get<double>() >= 0.5 ? 1 : 0);
  }
  return out;
}

int cmd_eval(const EvalFlags& f, std::istream& in, std::ostream& out, std::ostream& err) {
  RunConfig c = resolve(f.common);
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.model.empty()) c.model = f.model;
  validate(c);
  dsp::Split split;
  try {
    split = dsp::parse_split(f.split);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto manifest = open_manifest(c);
  const auto entries = manifest.split(split);
  if (entries.empty()) throw DataError("manifest has no " + f.split + " entries");

  ordered_json report;
  report["split"] = f.split;
  if (!f.predictions.empty()) {
    if (c.task != nn::Task::vad)
      throw UsageError("--predictions is supported for the vad task only");
    json predictions;
    try {
      if (f.predictions == "-") {
        predictions = json::parse(in);
      } else {
        std::ifstream file(f.predictions);
        if (!file) throw DataError("cannot open predictions " + f.predictions);
        predictions = json::parse(file);
      }
    } catch (const json::parse_error& e) {
      throw DataError(std::string("predictions: ") + e.what());
    }
    if (!predictions.is_object()) throw DataError("predictions must map entry ids to label arrays");
    std::vector<int> all_pred, all_labels;
    ordered_json files = ordered_json::array();
    for (const auto* e : entries) {
      if (!predictions.contains(e->id)) throw DataError("no predictions for entry " + e->id);
      const auto pred = decisions(predictions[e->id], e->id);
      const auto labels = dsp::read_labels(manifest.resolve(e->label_path));
      if (pred.size() != labels.size())
        throw DataError("entry " + e->id + ": " + std::to_string(pred.size()) + " predictions for " +
                        std::to_string(labels.size()) + " frames");
      files.push_back({{"id", e->id}, {"frame_error", eval::frame_error(pred, labels)}});
      all_pred.insert(all_pred.end(), pred.begin(), pred.end());
      all_labels.insert(all_labels.end(), labels.begin(), labels.end());
    }
    report["task"] = "vad";
    report["source"] = "predictions";
    report["metric"] = "frame_error";
    report["value"] = eval::frame_error(all_pred, all_labels);
    report["frames"] = all_labels.size();
    report["files"] = files;
  } else {
    if (c.model.empty()) throw UsageError("--model or --predictions is required");
    if (!fs::exists(c.model)) throw UsageError("model not found: " + c.model);
    const nn::Model model = nn::load_model(c.model);
    if (!f.common.task.empty() && model.spec.task != c.task)
      throw UsageError("model task is " + nn::to_string(model.spec.task) + ", requested " + nn::to_string(c.task));
    const int expected = c.stft.bins() * model.spec.context_frames;
    if (model.spec.input_dim() != expected)
      throw UsageError("model input dimension " + std::to_string(model.spec.input_dim()) + " does not match " +
                       std::to_string(c.stft.bins()) + " bins x " + std::to_string(model.spec.context_frames) +
                       " frames");
    report["task"] = nn::to_string(model.spec.task);
    report["source"] = c.model;
    report["bits"] = eval::format_pair({model.spec.weight_bits, model.spec.neuron_bits});
    if (model.spec.task == nn::Task::vad) {
      dsp::TaskData data =
          dsp::load_task_data(manifest, split, dsp::TargetKind::vad_labels, c.stft, model.spec.context_frames);
      apply_normalization(data.features, model.input_norm);
      const RowMatrix<float> scores = nn::forward(model, data.features, nn::Mode::quantized).output;
      const auto pred = eval::threshold_decisions(scores);
      const auto labels = eval::threshold_decisions(data.targets);
      ordered_json files = ordered_json::array();
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto lo = static_cast<std::size_t>(data.offsets[i]), hi = static_cast<std::size_t>(data.offsets[i + 1]);
        files.push_back({{"id", entries[i]->id},
                         {"frame_error", eval::frame_error(std::span(pred).subspan(lo, hi - lo),
                                                           std::span(labels).subspan(lo, hi - lo))}});
      }
      report["metric"] = "frame_error";
      report["value"] = eval::frame_error(pred, labels);
      report["frames"] = labels.size();
      report["files"] = files;
    } else {
      const auto r = eval::enhancement_eval(manifest, split, c.stft, eval::model_estimator(model));
      ordered_json files = ordered_json::array();
      for (const auto& file : r.files)
        files.push_back({{"id", file.id}, {"input_snr_db", file.input_snr_db}, {"output_snr_db", file.output_snr_db}});
      report["metric"] = "snr_improvement_db";
      report["value"] = r.improvement_db;
      report["mean_input_snr_db"] = r.mean_input_snr_db;
      report["mean_output_snr_db"] = r.mean_output_snr_db;
      report["files"] = files;
    }
  }
  write_text(fs::path(c.out) / "eval.json", report.dump(2) + "\n");
  out << report["metric"].get<std::string>() << " " << format(report["value"].get<double>()) << "\n";
  err << "wrote " << (fs::path(c.out) / "eval.json").string() << "\n";
  return kExitOk;
}

// bench ----------------------------------------------------------------------

struct BenchFlags {
  CommonFlags common;
  std::string grid, dims;
  int reps = 0;
  CLI::Option* reps_opt = nullptr;
};

std::vector<eval::BitPair> grid_or(const std::string& text, const std::vector<eval::BitPair>& fallback) {
  if (text.empty()) return fallback;
  try {
    return eval::parse_grid(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("grid: ") + e.what());
  }
}

int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig c = resolve(f.common);
  c.grid = grid_or(f.grid, c.grid);
  if (!f.dims.empty()) c.bench_dims = parse_dims(f.dims);
  if (f.reps_opt->count() > 0) c.bench_repetitions = f.reps;
  validate(c);
  const auto [m, n, p] = c.bench_dims;
  ordered_json rows = ordered_json::array();
  std::string csv = "weight_bits,neuron_bits,m,n,p,repetitions,dense_seconds,quantized_seconds,speedup,ideal_speedup,"
                    "dense_iqr,quantized_iqr\n";
  out << "  W   N   dense ms  quant ms  speedup  ideal\n";
  for (const auto& [w, nb] : c.grid) {
    err << "bench " << eval::format_pair({w, nb}) << "\n";
    const auto r = eval::bench_gemm(m, n, p, w, nb, c.bench_repetitions, c.seed);
    rows.push_back({{"weight_bits", w},
                    {"neuron_bits", nb},
                    {"m", m},
                    {"n", n},
                    {"p", p},
                    {"repetitions", r.repetitions},
                    {"dense_seconds", r.dense_seconds},
                    {"quantized_seconds", r.quantized_seconds},
                    {"speedup", r.speedup},
                    {"ideal_speedup", r.ideal_speedup},
                    {"dense_iqr", r.dense_spread},
                    {"quantized_iqr", r.quantized_spread}});
    csv += std::to_string(w) + "," + std::to_string(nb) + "," + std::to_string(m) + "," + std::to_string(n) + "," +
           std::to_string(p) + "," + std::to_string(r.repetitions) + "," + format(r.dense_seconds) + "," +
           format(r.quantized_seconds) + "," + format(r.speedup) + "," + format(r.ideal_speedup) + "," +
           format(r.dense_spread) + "," + format(r.quantized_spread) + "\n";
    char line[96];
    std::snprintf(line, sizeof line, "%3d %3d %10.3f %9.3f %8.2f %6.2f\n", w, nb, r.dense_seconds * 1e3,
                  r.quantized_seconds * 1e3, r.speedup, r.ideal_speedup);
    out << line;
  }
  write_text(fs::path(c.out) / "bench.json", rows.dump(2) + "\n");
  write_text(fs::path(c.out) / "bench.csv", csv);
  return kExitOk;
}

// explore --------------------------------------------------------------------

struct ExploreFlags {
  CommonFlags common;
  TrainFlags train;
  std::string manifest, grid, dims, basis;
  bool measure = false;
};

int cmd_explore(const ExploreFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig c = resolve(f.common);
  apply(f.train, c);
  if (!f.manifest.empty()) c.manifest = f.manifest;
  c.grid = grid_or(f.grid, c.grid);
  if (!f.dims.empty()) c.bench_dims = parse_dims(f.dims);
  if (f.measure) c.measure_speedup = true;
  if (!f.basis.empty()) {
    if (f.basis != "ideal" && f.basis != "measured") throw UsageError("--basis must be ideal or measured");
    c.speedup_basis = f.basis == "ideal" ? eval::SpeedupBasis::ideal : eval::SpeedupBasis::measured;
  }
  if (c.speedup_basis == eval::SpeedupBasis::measured) c.measure_speedup = true;
  validate(c);
  const auto manifest = open_manifest(c);
  const auto sets = load_sets(manifest, c, err);
  eval::TrainSetup setup = train_setup(c);
  log_epochs(setup, err);

  eval::ExploreOptions options;
  options.measure_speedup = c.measure_speedup;
  options.bench_m = c.bench_dims[0];
  options.bench_n = c.bench_dims[1];
  options.bench_p = c.bench_dims[2];
  options.bench_repetitions = c.bench_repetitions;
  options.basis = c.speedup_basis;
  options.on_cell = [&err](int w, int n, const nn::Model&) { err << "cell " << eval::format_pair({w, n}) << " done\n"; };
  const auto report = eval::explore_grid(manifest, sets, c.stft, c.grid, setup, options);

  write_text(fs::path(c.out) / "dse.json", eval::to_json(report).dump(2) + "\n");
  write_text(fs::path(c.out) / "dse.csv", eval::to_csv(report));
  out << eval::to_csv(report);
  if (report.selected) {
    const auto& cell = report.cells[*report.selected];
    out << "selected " << eval::format_pair({cell.weight_bits, cell.neuron_bits}) << "\n";
  }
  if (report.partial) {
    err << "partial report: " << report.failure << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-precision neural network inference and design-space exploration"};
  app.name("bitwave");
  app.require_subcommand(1);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a mixture dataset");
  add_common(synth_cmd, synth.common);
  synth_cmd->add_option("--counts", synth.counts, "train/valid/test file counts");
  synth_cmd->add_option("--snr-list", synth.snr_list, "Comma-separated SNRs in dB");
  synth_cmd->add_option("--noise-kinds", synth.noise_kinds, "Comma-separated generated noise kinds");
  synth.seconds_opt = synth_cmd->add_option("--seconds", synth.seconds, "Utterance length of generated speech");
  synth_cmd->add_option("--clean-dir", synth.clean_dir, "Directory of clean speech WAV files");
  synth_cmd->add_option("--noise-dir", synth.noise_dir, "Directory of noise WAV files");
  synth_cmd->add_flag("--self-contained", synth.self_contained, "Use the built-in speech and noise generators");
  synth_cmd->add_flag("--no-reverb", synth.no_reverb, "Skip room impulse responses");

  TrainCmdFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train, calibrate and save a model");
  add_common(train_cmd, train.common);
  add_train_flags(train_cmd, train.train, true);
  train_cmd->add_option("--manifest", train.manifest, "Dataset manifest");
  train_cmd->add_option("--model", train.model, "Output model file (default OUT/model.bwnn)");

  EvalFlags evalf;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model or predictions on one split");
  add_common(eval_cmd, evalf.common);
  eval_cmd->add_option("--manifest", evalf.manifest, "Dataset manifest");
  eval_cmd->add_option("--model", evalf.model, "Model file");
  eval_cmd->add_option("--predictions", evalf.predictions, "JSON object of entry id to frame labels, - for stdin");
  eval_cmd->add_option("--split", evalf.split, "train | valid | test");

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time quantized against dense products");
  add_common(bench_cmd, bench.common);
  bench_cmd->add_option("--grid", bench.grid, "Bit pairs, W1xN1,W2xN2,...");
  bench_cmd->add_option("--dims", bench.dims, "Product dimensions MxNxP");
  bench.reps_opt = bench_cmd->add_option("--reps", bench.reps, "Timed repetitions (>= 10)");

  ExploreFlags explore;
  auto* explore_cmd = app.add_subcommand("explore", "Train one model per bit pair and rank the pairs");
  add_common(explore_cmd, explore.common);
  add_train_flags(explore_cmd, explore.train, false);
  explore_cmd->add_option("--manifest", explore.manifest, "Dataset manifest");
  explore_cmd->add_option("--grid", explore.grid, "Bit pairs, W1xN1,W2xN2,...");
  explore_cmd->add_flag("--measure-speedup", explore.measure, "Time the kernel of each cell");
  explore_cmd->add_option("--dims", explore.dims, "Benchmark dimensions MxNxP");
  explore_cmd->add_option("--basis", explore.basis, "Speedup used for scoring: ideal | measured");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out, err);
    if (*train_cmd) return cmd_train(train, out, err);
    if (*eval_cmd) return cmd_eval(evalf, in, out, err);
    if (*bench_cmd) return cmd_bench(bench, out, err);
    if (*explore_cmd) return cmd_explore(explore, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cin, std::cout, std::cerr);
}

}  // namespace bitwave::cli
