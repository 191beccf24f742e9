// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic noisy-speech datasets and their JSON-lines manifests.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bitwave/core/types.hpp"
#include "bitwave/dsp/features.hpp"
#include "bitwave/dsp/stft.hpp"
#include "bitwave/dsp/synth.hpp"

namespace bitwave::dsp {

enum class Split { train, valid, test };

std::string to_string(Split split);
Split parse_split(const std::string& name);

/// One mixture. Paths are relative to the manifest's directory.
struct ManifestEntry {
  std::string id;
  Split split = Split::train;
  /// Dry clean utterance.
  std::string clean_path;
  std::string noise_path;
  /// Mixture as presented to the model.
  std::string noisy_path;
  /// Reverberant clean component of the mixture; the enhancement target.
  std::string reference_path;
  /// Frame labels of the dry clean utterance, JSON array of 0/1.
  std::string label_path;
  /// "rt60-<ms>-<seed>" or "none".
  std::string rir_id;
  std::string noise_kind;
  double snr_db = 0.0;
  double noise_gain = 0.0;
  double peak_gain = 1.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  /// Directory the entry paths are relative to.
  std::filesystem::path root;

  std::vector<const ManifestEntry*> split(Split s) const;
  std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
};

/// One JSON object per line, in entry order.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
/// Throws DataError if the file is missing or a line is malformed.
DatasetManifest read_manifest(const std::filesystem::path& path);

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

struct SynthOptions {
  /// train / valid / test file counts.
  std::array<int, 3> counts{75, 15, 15};
  /// Within a split, entry k gets noise kind k mod K and SNR (k / K) mod S.
  std::vector<double> snr_db{0.0, 5.0, 10.0};
  std::vector<NoiseKind> noise_kinds{NoiseKind::white, NoiseKind::pink,   NoiseKind::brown,
                                     NoiseKind::babble, NoiseKind::hum, NoiseKind::modulated};
  std::uint64_t seed = 1;
  double seconds = 3.0;
  /// Reverberation time drawn uniformly from this range; max 0 disables reverberation.
  double rt60_min_ms = 50.0;
  double rt60_max_ms = 300.0;
  StftParams stft;
  double label_threshold_db = 40.0;
  /// Recorded WAV files used instead of the generators when non-empty. Each
  /// entry draws one clean file at random; noise files cycle like noise kinds
  /// and are read circularly from a random offset.
  std::vector<std::filesystem::path> clean_sources;
  std::vector<std::filesystem::path> noise_sources;
};

/// Sorted *.wav files directly inside `dir`. Throws DataError if `dir` is
/// missing or holds no WAV file.
std::vector<std::filesystem::path> list_wav_files(const std::filesystem::path& dir);

/// Writes WAV and label files under `out_dir` plus `out_dir/manifest.jsonl`.
/// Entry i depends only on (seed, i); the output is byte-identical for a
/// fixed seed.
DatasetManifest synthesize_dataset(const SynthOptions& options, const std::filesystem::path& out_dir);

/// Features and targets of every frame in one split, concatenated in manifest order.
struct TaskData {
  /// Unnormalized stacked log-power features of the noisy mixture.
  RowMatrix<float> features;
  /// VAD: one 0/1 column. Enhancement: log-power of the reference, bins columns.
  RowMatrix<float> targets;
  /// Index of the first frame of each file; the last element is the total.
  std::vector<Index> offsets;
};

enum class TargetKind { vad_labels, clean_log_power };

/// Throws DataError on missing files or label/frame misalignment.
TaskData load_task_data(const DatasetManifest& manifest, Split split, TargetKind kind, const StftParams& params,
                        int context = kDefaultContext);

}  // namespace bitwave::dsp
