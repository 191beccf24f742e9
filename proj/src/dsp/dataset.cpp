// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/dsp/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bitwave/core/error.hpp"
#include "bitwave/core/parallel.hpp"

namespace bitwave::dsp {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<Split, 3> kSplits{Split::train, Split::valid, Split::test};

ordered_json entry_to_json(const ManifestEntry& e) {
  ordered_json j;
  j["id"] = e.id;
  j["split"] = to_string(e.split);
  j["clean_path"] = e.clean_path;
  j["noise_path"] = e.noise_path;
  j["noisy_path"] = e.noisy_path;
  j["reference_path"] = e.reference_path;
  j["label_path"] = e.label_path;
  j["rir_id"] = e.rir_id;
  j["noise_kind"] = e.noise_kind;
  j["snr_db"] = e.snr_db;
  j["noise_gain"] = e.noise_gain;
  j["peak_gain"] = e.peak_gain;
  j["seed"] = e.seed;
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  e.id = j.at("id").get<std::string>();
  e.split = parse_split(j.at("split").get<std::string>());
  e.clean_path = j.at("clean_path").get<std::string>();
  e.noise_path = j.at("noise_path").get<std::string>();
  e.noisy_path = j.at("noisy_path").get<std::string>();
  e.reference_path = j.at("reference_path").get<std::string>();
  e.label_path = j.at("label_path").get<std::string>();
  e.rir_id = j.at("rir_id").get<std::string>();
  e.noise_kind = j.value("noise_kind", "");
  e.snr_db = j.at("snr_db").get<double>();
  e.noise_gain = j.value("noise_gain", 0.0);
  e.peak_gain = j.value("peak_gain", 1.0);
  e.seed = j.value("seed", std::uint64_t{0});
  return e;
}

std::string entry_name(Split split, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu", to_string(split).c_str(), index);
  return buf;
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "unknown";
}

Split parse_split(const std::string& name) {
  for (Split s : kSplits)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown split '" + name + "'");
}

std::vector<const ManifestEntry*> DatasetManifest::split(Split s) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.split == s) out.push_back(&e);
  return out;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + path.string());
  for (const auto& e : manifest.entries) out << entry_to_json(e).dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("manifest not found: " + path.string());
  DatasetManifest manifest;
  manifest.root = path.parent_path();
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      manifest.entries.push_back(entry_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError("manifest " + path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (manifest.entries.empty()) throw DataError("manifest " + path.string() + " has no entries");
  return manifest;
}

std::vector<int> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("label file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("label file " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw DataError("label file " + path.string() + ": expected a JSON array");
  std::vector<int> labels;
  labels.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
      throw DataError("label file " + path.string() + ": labels must be 0 or 1");
    labels.push_back(v.get<int>());
  }
  return labels;
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << json(labels).dump() << '\n';
}

std::vector<fs::path> list_wav_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    std::string ext = item.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (item.is_regular_file() && ext == ".wav") files.push_back(item.path());
  }
  if (files.empty()) throw DataError(dir.string() + ": no .wav files");
  std::sort(files.begin(), files.end());
  return files;
}

DatasetManifest synthesize_dataset(const SynthOptions& options, const fs::path& out_dir) {
  options.stft.validate();
  for (int c : options.counts)
    if (c < 0) throw std::invalid_argument("split counts must be non-negative");
  if (options.counts[0] + options.counts[1] + options.counts[2] == 0) throw std::invalid_argument("empty dataset");
  if (options.snr_db.empty()) throw std::invalid_argument("empty SNR list");
  if (options.noise_kinds.empty()) throw std::invalid_argument("empty noise kind list");
  if (options.seconds * options.stft.sample_rate < options.stft.frame)
    throw std::invalid_argument("utterances shorter than one frame");
  const bool reverb = options.rt60_max_ms > 0.0;
  if (reverb && (options.rt60_min_ms < 50.0 || options.rt60_max_ms > 1000.0 || options.rt60_min_ms > options.rt60_max_ms))
    throw std::invalid_argument("rt60 range must lie in [50, 1000] ms");

  for (const char* sub : {"clean", "noise", "noisy", "reference", "labels"}) fs::create_directories(out_dir / sub);

  DatasetManifest manifest;
  manifest.root = out_dir;
  for (Split s : kSplits)
    for (int i = 0; i < options.counts[static_cast<std::size_t>(s)]; ++i) {
      ManifestEntry e;
      e.split = s;
      e.id = entry_name(s, static_cast<std::size_t>(i));
      manifest.entries.push_back(std::move(e));
    }

  const std::array<Index, 3> first_of_split{0, options.counts[0], options.counts[0] + options.counts[1]};
  parallel_for(0, static_cast<Index>(manifest.entries.size()), [&](Index lo, Index hi) {
    for (Index index = lo; index < hi; ++index) {
      ManifestEntry& e = manifest.entries[static_cast<std::size_t>(index)];
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(index)};
      std::mt19937_64 rng(seq);
      e.seed = rng();
      SpeechOptions speech_options;
      speech_options.seconds = options.seconds;
      speech_options.sample_rate = options.stft.sample_rate;
      AudioClip dry;
      if (options.clean_sources.empty()) {
        dry = synth_speech(speech_options, rng());
      } else {
        const std::size_t pick = static_cast<std::size_t>(rng() % options.clean_sources.size());
        dry = read_wav(options.clean_sources[pick], options.stft.sample_rate);
        if (dry.size() < options.stft.frame)
          throw DataError(options.clean_sources[pick].string() + ": shorter than one frame");
      }
      // Noise kind and SNR cycle through all combinations within each split.
      const std::size_t cell = static_cast<std::size_t>(index - first_of_split[static_cast<std::size_t>(e.split)]);
      AudioClip noise;
      std::size_t kinds = options.noise_kinds.size();
      if (options.noise_sources.empty()) {
        const NoiseKind kind = options.noise_kinds[cell % kinds];
        e.noise_kind = to_string(kind);
        noise = synth_noise(kind, dry.size(), rng(), dry.sample_rate);
      } else {
        kinds = options.noise_sources.size();
        const fs::path& source = options.noise_sources[cell % kinds];
        e.noise_kind = source.stem().string();
        const AudioClip recorded = read_wav(source, options.stft.sample_rate);
        if (recorded.size() == 0) throw DataError(source.string() + ": empty");
        const Index offset = static_cast<Index>(rng() % static_cast<std::uint64_t>(recorded.size()));
        noise.sample_rate = recorded.sample_rate;
        noise.samples.resize(dry.size());
        for (Index t = 0; t < dry.size(); ++t) noise.samples[t] = recorded.samples[(offset + t) % recorded.size()];
      }
      e.snr_db = options.snr_db[(cell / kinds) % options.snr_db.size()];

      AudioClip speech = dry;
      e.rir_id = "none";
      if (reverb) {
        const double rt60 = std::round(std::uniform_real_distribution<double>(options.rt60_min_ms, options.rt60_max_ms)(rng));
        const std::uint64_t rir_seed = rng() & 0xFFFFFFFFu;
        AudioClip wet = apply_rir(dry, synth_rir(rt60, rir_seed, dry.sample_rate));
        speech.samples = wet.samples.head(dry.size());
        e.rir_id = "rt60-" + std::to_string(static_cast<int>(rt60)) + "-" + std::to_string(rir_seed);
      }
      const MixResult mix = mix_at_snr(speech, noise, e.snr_db);
      e.noise_gain = mix.noise_gain;
      e.peak_gain = mix.peak_gain;

      e.clean_path = "clean/" + e.id + ".wav";
      e.noise_path = "noise/" + e.id + ".wav";
      e.noisy_path = "noisy/" + e.id + ".wav";
      e.reference_path = "reference/" + e.id + ".wav";
      e.label_path = "labels/" + e.id + ".json";
      write_wav(out_dir / e.clean_path, dry);
      write_wav(out_dir / e.noise_path, noise);
      write_wav(out_dir / e.noisy_path, mix.noisy);
      write_wav(out_dir / e.reference_path, mix.clean);
      write_labels(out_dir / e.label_path, vad_labels(dry, options.stft, options.label_threshold_db));
    }
  });
  write_manifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

TaskData load_task_data(const DatasetManifest& manifest, Split split, TargetKind kind, const StftParams& params,
                        int context) {
  const auto entries = manifest.split(split);
  if (entries.empty()) throw DataError("manifest has no " + to_string(split) + " entries");
  std::vector<RowMatrix<float>> feats(entries.size()), targets(entries.size());
  parallel_for(0, static_cast<Index>(entries.size()), [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      const ManifestEntry& e = *entries[static_cast<std::size_t>(i)];
      const AudioClip noisy = read_wav(manifest.resolve(e.noisy_path), params.sample_rate);
      const Spectrogram spec = stft(noisy, params);
      feats[static_cast<std::size_t>(i)] = features(spec, context).values;
      RowMatrix<float>& t = targets[static_cast<std::size_t>(i)];
      if (kind == TargetKind::vad_labels) {
        const auto labels = read_labels(manifest.resolve(e.label_path));
        if (static_cast<Index>(labels.size()) != spec.frames())
          throw DataError("entry " + e.id + ": " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(spec.frames()) + " frames");
        t.resize(spec.frames(), 1);
        for (Index f = 0; f < spec.frames(); ++f) t(f, 0) = static_cast<float>(labels[static_cast<std::size_t>(f)]);
      } else {
        const AudioClip reference = read_wav(manifest.resolve(e.reference_path), params.sample_rate);
        if (reference.size() != noisy.size())
          throw DataError("entry " + e.id + ": reference and mixture lengths differ");
        t = log_power(stft(reference, params)).cast<float>();
      }
    }
  });

  TaskData data;
  Index total = 0;
  for (const auto& f : feats) {
    data.offsets.push_back(total);
    total += f.rows();
  }
  data.offsets.push_back(total);
  data.features.resize(total, feats.front().cols());
  data.targets.resize(total, targets.front().cols());
  for (std::size_t i = 0; i < feats.size(); ++i) {
    data.features.middleRows(data.offsets[i], feats[i].rows()) = feats[i];
    data.targets.middleRows(data.offsets[i], targets[i].rows()) = targets[i];
  }
  return data;
}

}  // namespace bitwave::dsp
