// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "bitwave/core/error.hpp"

namespace bitwave::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw UsageError("invalid " + what + " '" + text + "'");
  return value;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + ": expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!known.contains(item.key())) throw UsageError(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + "." + key + ": wrong type");
  }
}

std::string join_path(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

}  // namespace

RunConfig::RunConfig() : grid(eval::parse_grid("1x1,1x2,1x4,1x8,2x1,2x2,2x4,2x8,4x1,4x2,4x4,4x8,8x1,8x2,8x4,8x8")) {}

eval::BitPair parse_bits(const std::string& text) {
  std::vector<eval::BitPair> pairs;
  try {
    pairs = eval::parse_grid(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bits: ") + e.what());
  }
  if (pairs.size() != 1) throw UsageError("bits: expected a single WxN pair, got '" + text + "'");
  return pairs.front();
}

std::array<int, 3> parse_counts(const std::string& text) {
  const auto parts = split(text, '/');
  if (parts.size() != 3) throw UsageError("counts: expected train/valid/test, got '" + text + "'");
  std::array<int, 3> counts{};
  for (std::size_t i = 0; i < 3; ++i) counts[i] = parse_number<int>(parts[i], "count");
  return counts;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_number<double>(part, "number"));
  if (values.empty()) throw UsageError("empty number list");
  return values;
}

std::array<Index, 3> parse_dims(const std::string& text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 3) throw UsageError("dims: expected MxNxP, got '" + text + "'");
  std::array<Index, 3> dims{};
  for (std::size_t i = 0; i < 3; ++i) dims[i] = parse_number<Index>(parts[i], "dimension");
  return dims;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  check_keys(j, {"task", "seed", "stft", "model", "train", "data", "grid", "bench", "paths"}, "config");

  std::string task = nn::to_string(c.task);
  read(j, "task", task, "config");
  try {
    c.task = nn::parse_task(task);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config.task: ") + e.what());
  }
  read(j, "seed", c.seed, "config");

  if (const auto it = j.find("stft"); it != j.end()) {
    const std::string where = join_path("config", "stft");
    check_keys(*it, {"sample_rate", "frame", "hop", "fft_size"}, where);
    read(*it, "sample_rate", c.stft.sample_rate, where);
    read(*it, "frame", c.stft.frame, where);
    read(*it, "hop", c.stft.hop, where);
    read(*it, "fft_size", c.stft.fft_size, where);
  }

  if (const auto it = j.find("model"); it != j.end()) {
    const std::string where = "config.model";
    check_keys(*it, {"hidden", "context", "bits", "quantize_input"}, where);
    read(*it, "hidden", c.hidden, where);
    read(*it, "context", c.context, where);
    std::string bits;
    read(*it, "bits", bits, where);
    if (!bits.empty()) std::tie(c.weight_bits, c.neuron_bits) = parse_bits(bits);
    read(*it, "quantize_input", c.quantize_input, where);
  }

  if (const auto it = j.find("train"); it != j.end()) {
    const std::string where = "config.train";
    check_keys(*it, {"epochs", "batch", "learning_rate", "momentum", "qat", "calibration_frames"}, where);
    read(*it, "epochs", c.epochs, where);
    read(*it, "batch", c.batch, where);
    if (it->contains("learning_rate")) {
      double lr = 0.0;
      read(*it, "learning_rate", lr, where);
      c.learning_rate = lr;
    }
    read(*it, "momentum", c.momentum, where);
    read(*it, "qat", c.qat, where);
    read(*it, "calibration_frames", c.calibration_frames, where);
  }

  if (const auto it = j.find("data"); it != j.end()) {
    const std::string where = "config.data";
    check_keys(*it,
               {"counts", "snr_db", "seconds", "noise_kinds", "rt60_ms", "label_threshold_db", "self_contained",
                "clean_dir", "noise_dir"},
               where);
    read(*it, "counts", c.counts, where);
    read(*it, "snr_db", c.snr_db, where);
    read(*it, "seconds", c.seconds, where);
    if (it->contains("noise_kinds")) {
      std::vector<std::string> names;
      read(*it, "noise_kinds", names, where);
      c.noise_kinds.clear();
      try {
        for (const auto& name : names) c.noise_kinds.push_back(dsp::parse_noise_kind(name));
      } catch (const std::invalid_argument& e) {
        throw UsageError(where + ".noise_kinds: " + e.what());
      }
    }
    if (it->contains("rt60_ms")) {
      std::array<double, 2> range{};
      read(*it, "rt60_ms", range, where);
      c.rt60_min_ms = range[0];
      c.rt60_max_ms = range[1];
    }
    read(*it, "label_threshold_db", c.label_threshold_db, where);
    read(*it, "self_contained", c.self_contained, where);
    read(*it, "clean_dir", c.clean_dir, where);
    read(*it, "noise_dir", c.noise_dir, where);
  }

  if (const auto it = j.find("grid"); it != j.end()) {
    std::string grid;
    read(j, "grid", grid, "config");
    try {
      c.grid = eval::parse_grid(grid);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("config.grid: ") + e.what());
    }
  }

  if (const auto it = j.find("bench"); it != j.end()) {
    const std::string where = "config.bench";
    check_keys(*it, {"dims", "repetitions", "measure_speedup", "speedup_basis"}, where);
    read(*it, "dims", c.bench_dims, where);
    read(*it, "repetitions", c.bench_repetitions, where);
    read(*it, "measure_speedup", c.measure_speedup, where);
    std::string basis = "ideal";
    read(*it, "speedup_basis", basis, where);
    if (basis != "ideal" && basis != "measured")
      throw UsageError(where + ".speedup_basis: expected ideal or measured, got '" + basis + "'");
    c.speedup_basis = basis == "ideal" ? eval::SpeedupBasis::ideal : eval::SpeedupBasis::measured;
  }

  if (const auto it = j.find("paths"); it != j.end()) {
    const std::string where = "config.paths";
    check_keys(*it, {"manifest", "model", "out"}, where);
    read(*it, "manifest", c.manifest, where);
    read(*it, "model", c.model, where);
    read(*it, "out", c.out, where);
  }

  validate(c);
  return c;
}

json to_json(const RunConfig& c) {
  std::vector<std::string> kinds;
  for (auto k : c.noise_kinds) kinds.push_back(dsp::to_string(k));
  std::string grid;
  for (const auto& pair : c.grid) grid += (grid.empty() ? "" : ",") + eval::format_pair(pair);
  json train{{"epochs", c.epochs},
             {"batch", c.batch},
             {"momentum", c.momentum},
             {"qat", c.qat},
             {"calibration_frames", c.calibration_frames}};
  if (c.learning_rate) train["learning_rate"] = *c.learning_rate;
  return json{
      {"task", nn::to_string(c.task)},
      {"seed", c.seed},
      {"stft",
       {{"sample_rate", c.stft.sample_rate}, {"frame", c.stft.frame}, {"hop", c.stft.hop}, {"fft_size", c.stft.fft_size}}},
      {"model",
       {{"hidden", c.hidden},
        {"context", c.context},
        {"bits", eval::format_pair({c.weight_bits, c.neuron_bits})},
        {"quantize_input", c.quantize_input}}},
      {"train", train},
      {"data",
       {{"counts", c.counts},
        {"snr_db", c.snr_db},
        {"seconds", c.seconds},
        {"noise_kinds", kinds},
        {"rt60_ms", {c.rt60_min_ms, c.rt60_max_ms}},
        {"label_threshold_db", c.label_threshold_db},
        {"self_contained", c.self_contained},
        {"clean_dir", c.clean_dir},
        {"noise_dir", c.noise_dir}}},
      {"grid", grid},
      {"bench",
       {{"dims", c.bench_dims},
        {"repetitions", c.bench_repetitions},
        {"measure_speedup", c.measure_speedup},
        {"speedup_basis", c.speedup_basis == eval::SpeedupBasis::ideal ? "ideal" : "measured"}}},
      {"paths", {{"manifest", c.manifest}, {"model", c.model}, {"out", c.out}}},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& c) {
  try {
    c.stft.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("stft: ") + e.what());
  }
  if (c.hidden.empty()) throw UsageError("model.hidden: at least one hidden layer is required");
  for (int h : c.hidden)
    if (h < 1) throw UsageError("model.hidden: layer widths must be >= 1");
  if (c.context < 1 || c.context % 2 == 0) throw UsageError("model.context: must be a positive odd number");
  if (!nn::valid_bit_width(c.weight_bits) || !nn::valid_bit_width(c.neuron_bits))
    throw UsageError("model.bits: widths must be in {1, 2, 4, 8, 32}");
  if (c.epochs < 1) throw UsageError("train.epochs: must be >= 1");
  if (c.batch < 1) throw UsageError("train.batch: must be >= 1");
  if (c.learning_rate && !(*c.learning_rate > 0.0)) throw UsageError("train.learning_rate: must be positive");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw UsageError("train.momentum: must be in [0, 1)");
  if (c.calibration_frames < 1) throw UsageError("train.calibration_frames: must be >= 1");
  for (int n : c.counts)
    if (n < 0) throw UsageError("data.counts: must be non-negative");
  if (c.counts[0] + c.counts[1] + c.counts[2] == 0) throw UsageError("data.counts: dataset would be empty");
  if (c.snr_db.empty()) throw UsageError("data.snr_db: empty list");
  if (!(c.seconds * c.stft.sample_rate >= c.stft.frame)) throw UsageError("data.seconds: shorter than one frame");
  if (c.noise_kinds.empty()) throw UsageError("data.noise_kinds: empty list");
  if (c.rt60_max_ms > 0.0 && (c.rt60_min_ms < 50.0 || c.rt60_max_ms > 1000.0 || c.rt60_min_ms > c.rt60_max_ms))
    throw UsageError("data.rt60_ms: range must lie in [50, 1000] ms, or set the maximum to 0");
  if (c.grid.empty()) throw UsageError("grid: empty");
  for (Index d : c.bench_dims)
    if (d < 1) throw UsageError("bench.dims: must be >= 1");
  if (c.bench_repetitions < 10) throw UsageError("bench.repetitions: at least 10 are required");
}

eval::TrainSetup train_setup(const RunConfig& c) {
  eval::TrainSetup setup = eval::default_setup(c.task);
  setup.hidden = c.hidden;
  setup.weight_bits = c.weight_bits;
  setup.neuron_bits = c.neuron_bits;
  setup.quantize_input = c.quantize_input;
  setup.calibration_frames = c.calibration_frames;
  setup.init_seed = c.seed;
  setup.options.epochs = c.epochs;
  setup.options.batch = c.batch;
  if (c.learning_rate) setup.options.learning_rate = *c.learning_rate;
  setup.options.momentum = c.momentum;
  setup.options.quantization_aware = c.qat;
  setup.options.seed = c.seed;
  return setup;
}

dsp::SynthOptions synth_options(const RunConfig& c) {
  dsp::SynthOptions o;
  o.counts = c.counts;
  o.snr_db = c.snr_db;
  o.noise_kinds = c.noise_kinds;
  o.seed = c.seed;
  o.seconds = c.seconds;
  o.rt60_min_ms = c.rt60_min_ms;
  o.rt60_max_ms = c.rt60_max_ms;
  o.stft = c.stft;
  o.label_threshold_db = c.label_threshold_db;
  return o;
}

}  // namespace bitwave::cli
