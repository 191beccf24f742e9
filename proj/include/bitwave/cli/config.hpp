// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration shared by all subcommands. A JSON file sets any subset
// of the fields below; command-line flags override it.
//
//   {
//     "task": "vad",                      // vad | enhance
//     "seed": 1,
//     "stft":  {"sample_rate": 16000, "frame": 256, "hop": 128, "fft_size": 256},
//     "model": {"hidden": [512, 512, 512], "context": 7, "bits": "32x32", "quantize_input": true},
//     "train": {"epochs": 10, "batch": 256, "learning_rate": 0.01, "momentum": 0.9,
//               "qat": true, "calibration_frames": 4096},
//     "data":  {"counts": [75, 15, 15], "snr_db": [0, 5, 10], "seconds": 3,
//               "noise_kinds": ["white", ...], "rt60_ms": [50, 300], "label_threshold_db": 40,
//               "self_contained": false, "clean_dir": "", "noise_dir": ""},
//     "grid":  "1x1,1x2,...",
//     "bench": {"dims": [512, 903, 512], "repetitions": 10, "measure_speedup": false,
//               "speedup_basis": "ideal"},
//     "paths": {"manifest": "", "model": "", "out": "."}
//   }
//
// Unknown keys and values of the wrong type are rejected with UsageError.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bitwave/dsp/dataset.hpp"
#include "bitwave/eval/dse.hpp"
#include "bitwave/eval/pipeline.hpp"
#include "bitwave/nn/model.hpp"
#include "json.hpp"

namespace bitwave::cli {

struct RunConfig {
  nn::Task task = nn::Task::vad;
  std::uint64_t seed = 1;
  dsp::StftParams stft;

  std::vector<int> hidden{512, 512, 512};
  int context = dsp::kDefaultContext;
  int weight_bits = nn::kFullPrecision;
  int neuron_bits = nn::kFullPrecision;
  bool quantize_input = true;

  int epochs = 10;
  std::size_t batch = 256;
  /// Unset means the task default.
  std::optional<double> learning_rate;
  double momentum = 0.9;
  bool qat = true;
  Index calibration_frames = 4096;

  std::array<int, 3> counts{75, 15, 15};
  std::vector<double> snr_db{0.0, 5.0, 10.0};
  double seconds = 3.0;
  std::vector<dsp::NoiseKind> noise_kinds = dsp::all_noise_kinds();
  double rt60_min_ms = 50.0;
  double rt60_max_ms = 300.0;
  double label_threshold_db = 40.0;
  bool self_contained = false;
  std::string clean_dir;
  std::string noise_dir;

  std::vector<eval::BitPair> grid;
  std::array<Index, 3> bench_dims{512, 903, 512};
  int bench_repetitions = 10;
  bool measure_speedup = false;
  eval::SpeedupBasis speedup_basis = eval::SpeedupBasis::ideal;

  std::string manifest;
  std::string model;
  std::string out = ".";

  RunConfig();
};

/// Throws UsageError on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Reads a JSON config file; a missing or unparsable file is a UsageError.
RunConfig load_config(const std::filesystem::path& path);

/// Throws UsageError on invalid values.
void validate(const RunConfig& config);

/// Parses "WxN" with W, N in {1, 2, 4, 8, 32}; throws UsageError.
eval::BitPair parse_bits(const std::string& text);
/// Parses "a/b/c" train/valid/test counts; throws UsageError.
std::array<int, 3> parse_counts(const std::string& text);
/// Parses a comma-separated list of numbers; throws UsageError.
std::vector<double> parse_number_list(const std::string& text);
/// Parses "MxNxP"; throws UsageError.
std::array<Index, 3> parse_dims(const std::string& text);

eval::TrainSetup train_setup(const RunConfig& config);
dsp::SynthOptions synth_options(const RunConfig& config);

}  // namespace bitwave::cli
