// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "bitwave/core/error.hpp"
#include "bitwave/dsp/audio.hpp"
#include "bitwave/dsp/dataset.hpp"
#include "bitwave/dsp/features.hpp"
#include "bitwave/dsp/stft.hpp"
#include "bitwave/dsp/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace bitwave;
using namespace bitwave::dsp;

namespace {

AudioClip white_noise(Index n, std::uint64_t seed, double sigma = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  AudioClip clip;
  clip.samples.resize(n);
  for (Index i = 0; i < n; ++i) clip.samples[i] = dist(rng);
  return clip;
}

AudioClip tone(Index n, double freq, double amp = 0.5, int rate = kDefaultSampleRate) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(n);
  for (Index i = 0; i < n; ++i) clip.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return clip;
}

void put16(std::ofstream& out, std::uint16_t v) { out.put(char(v & 0xFF)).put(char(v >> 8)); }
void put32(std::ofstream& out, std::uint32_t v) {
  put16(out, std::uint16_t(v & 0xFFFF));
  put16(out, std::uint16_t(v >> 16));
}

void write_raw_wav(const std::filesystem::path& path, std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                   std::uint16_t bits, std::uint32_t frames) {
  std::ofstream out(path, std::ios::binary);
  const std::uint32_t data = frames * channels * bits / 8;
  out.write("RIFF", 4);
  put32(out, 36 + data);
  out.write("WAVEfmt ", 8);
  put32(out, 16);
  put16(out, format);
  put16(out, channels);
  put32(out, rate);
  put32(out, rate * channels * bits / 8);
  put16(out, std::uint16_t(channels * bits / 8));
  put16(out, bits);
  out.write("data", 4);
  put32(out, data);
  for (std::uint32_t i = 0; i < data; ++i) out.put(0);
}

}  // namespace

TEST_CASE("default parameters at 16 kHz") {
  const StftParams p = StftParams::from_ms(16000);
  CHECK(p.frame == 256);
  CHECK(p.hop == 128);
  CHECK(p.fft_size == 256);
  CHECK(p.bins() == 129);
  CHECK(p == StftParams{});
  CHECK(StftParams::from_ms(8000).fft_size == 128);
  CHECK(StftParams::from_ms(44100).fft_size == 1024);
  StftParams bad;
  bad.hop = 300;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("periodic Hann overlap-add is constant at half-frame hop") {
  const Eigen::VectorXd w = hann_window(256);
  CHECK(w[0] == 0.0);
  CHECK(w[128] == doctest::Approx(1.0));
  for (Index n = 0; n < 128; ++n) {
    CHECK(std::abs(w[n] + w[n + 128] - 1.0) < 1e-9);
    // The squared window does not overlap-add to a constant, but never
    // vanishes on the interior, so the normalized synthesis is exact.
    CHECK(w[n] * w[n] + w[n + 128] * w[n + 128] >= 0.5 - 1e-12);
  }
}

TEST_CASE("frame count and short clips") {
  const StftParams p;
  CHECK(frame_count(256, p) == 1);
  CHECK(frame_count(383, p) == 1);
  CHECK(frame_count(384, p) == 2);
  CHECK(frame_count(16000, p) == 124);
  CHECK(frame_count(255, p) == 0);
  CHECK(stft(white_noise(1000, 1), p).frames() == frame_count(1000, p));
  CHECK_THROWS_AS(stft(white_noise(255, 1), p), DataError);
  AudioClip wrong_rate = white_noise(1000, 1);
  wrong_rate.sample_rate = 8000;
  CHECK_THROWS_AS(stft(wrong_rate, p), DataError);
}

TEST_CASE("stft matches a direct DFT of windowed frames") {
  const StftParams p;
  const AudioClip clip = white_noise(900, 5);
  const Spectrogram s = stft(clip, p);
  const Eigen::VectorXd w = hann_window(p.frame);
  for (Index f = 0; f < s.frames(); ++f) {
    std::vector<double> frame(static_cast<std::size_t>(p.fft_size), 0.0);
    for (int n = 0; n < p.frame; ++n) frame[n] = clip.samples[f * p.hop + n] * w[n];
    const auto want = oracle::direct_dft(frame);
    for (Index k = 0; k < s.bins(); ++k) CHECK(std::abs(s.values(f, k) - want[k]) < 1e-10);
  }
}

TEST_CASE("bin-centred sine concentrates in its main lobe") {
  const StftParams p;
  for (int k : {4, 20, 64, 100}) {
    const Spectrogram s = stft(tone(2048, k * 16000.0 / 256.0), p);
    for (Index f = 0; f < s.frames(); ++f) {
      const Eigen::RowVectorXd power = s.values.row(f).cwiseAbs2();
      Index arg;
      power.maxCoeff(&arg);
      CHECK(arg == k);
      const double lobe = power[k - 1] + power[k] + power[k + 1];
      CHECK(lobe >= 0.9 * power.sum());
    }
  }
}

TEST_CASE("zero signal and zero spectrogram") {
  const StftParams p;
  AudioClip silence;
  silence.samples = Eigen::VectorXd::Zero(1000);
  const Spectrogram s = stft(silence, p);
  CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);
  const AudioClip back = istft(s, p);
  CHECK(back.size() == (s.frames() - 1) * p.hop + p.frame);
  CHECK(back.samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("istft inverts stft on the interior") {
  const StftParams p;
  const AudioClip clip = white_noise(16000, 9, 0.3);
  const Spectrogram s = stft(clip, p);
  const AudioClip back = istft(s, p);
  REQUIRE(back.size() == (s.frames() - 1) * p.hop + p.frame);
  const Index lo = p.frame / 2;
  const Index hi = back.size() - p.frame / 2;
  const double scale = clip.samples.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Index i = lo; i < hi; ++i) worst = std::max(worst, std::abs(back.samples[i] - clip.samples[i]));
  CHECK(worst / scale < 1e-6);

  const Spectrogram rebuilt = with_phase(magnitude(s), s);
  CHECK((rebuilt.values - s.values).cwiseAbs().maxCoeff() < 1e-9);

  StftParams other = p;
  other.hop = 64;
  CHECK_THROWS_AS(istft(s, other), std::invalid_argument);
}

TEST_CASE("log-power features and context stacking") {
  const StftParams p;
  const Spectrogram s = stft(white_noise(4000, 2), p);
  const FrameFeatures f = features(s);
  CHECK(f.dim() == 903);
  CHECK(f.frames() == s.frames());
  CHECK(f.norm.empty());
  const RowMatrix<double> lp = log_power(s);
  CHECK(lp(3, 10) == doctest::Approx(std::log(std::norm(s.values(3, 10)) + 1e-10)));
  // Centre block is the current frame.
  CHECK(f.values(5, 3 * 129 + 7) == static_cast<float>(lp(5, 7)));
  // Edge replication.
  CHECK(f.values(0, 0) == static_cast<float>(lp(0, 0)));
  CHECK(f.values(0, 2 * 129) == static_cast<float>(lp(0, 0)));
  CHECK(f.values(f.frames() - 1, 6 * 129 + 1) == static_cast<float>(lp(s.frames() - 1, 1)));

  Spectrogram flat = s;
  flat.values.setConstant({0.3, -0.4});
  const FrameFeatures ff = features(flat);
  for (Index t = 1; t < ff.frames(); ++t) CHECK(ff.values.row(t) == ff.values.row(0));

  Spectrogram zero = s;
  zero.values.setZero();
  CHECK(features(zero).values(0, 0) == static_cast<float>(std::log(1e-10)));

  RowMatrix<int> small(3, 1);
  small << 1, 2, 3;
  RowMatrix<int> want(3, 3);
  want << 1, 1, 2, 1, 2, 3, 2, 3, 3;
  CHECK(stack_context(small, 3) == want);
  CHECK_THROWS_AS(stack_context(small, 4), std::invalid_argument);
}

TEST_CASE("normalized training features have zero mean and unit deviation") {
  const StftParams p;
  const Spectrogram s = stft(white_noise(16000, 3), p);
  const FrameFeatures raw = features(s);
  const Normalization norm = fit_normalization(raw.values);
  const FrameFeatures f = features(s, norm);
  CHECK(f.norm == norm);
  const RowMatrix<double> v = f.values.cast<double>();
  const double n = static_cast<double>(v.rows());
  double worst_mean = 0.0, worst_sd = 0.0;
  for (Index c = 0; c < v.cols(); ++c) {
    const double mean = v.col(c).mean();
    const double sd = std::sqrt((v.col(c).array() - mean).square().sum() / n);
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
  }
  CHECK(worst_mean < 1e-6);
  CHECK(worst_sd < 1e-6);
}

TEST_CASE("mix_at_snr gain examples") {
  AudioClip unit;
  unit.samples = Eigen::VectorXd::Ones(100) * 0.5;
  AudioClip noise;
  noise.samples.resize(100);
  for (Index i = 0; i < 100; ++i) noise.samples[i] = i % 2 ? 0.5 : -0.5;
  CHECK(mix_at_snr(unit, noise, 0.0).noise_gain == doctest::Approx(1.0));

  AudioClip one = unit, other = noise;
  one.samples *= 2.0;
  other.samples *= 2.0;
  const MixResult m = mix_at_snr(one, other, 10.0);
  CHECK(m.noise_gain == doctest::Approx(0.316227766));

  const MixResult clean = mix_at_snr(unit, noise, std::numeric_limits<double>::infinity());
  CHECK(clean.noisy.samples == unit.samples);
  CHECK(clean.noise_gain == 0.0);

  AudioClip silent = unit;
  silent.samples.setZero();
  CHECK_THROWS_AS(mix_at_snr(silent, noise, 0.0), DataError);
}

TEST_CASE("mix_at_snr hits the target and normalizes peaks") {
  const AudioClip speech = synth_speech({}, 4);
  const AudioClip noise = synth_noise(NoiseKind::pink, 10000, 8);
  for (double target : {-5.0, 0.0, 5.0, 10.0, 20.0}) {
    const MixResult m = mix_at_snr(speech, noise, target);
    REQUIRE(m.noisy.size() == speech.size());
    CHECK((m.clean.samples + m.noise.samples - m.noisy.samples).cwiseAbs().maxCoeff() < 1e-12);
    const double measured = 10.0 * std::log10(m.clean.samples.squaredNorm() / m.noise.samples.squaredNorm());
    CHECK(std::abs(measured - target) < 0.1);
    CHECK(m.noisy.samples.cwiseAbs().maxCoeff() <= 1.0);
  }
  AudioClip loud = speech;
  loud.samples *= 1.9;
  const MixResult m = mix_at_snr(loud, noise, -5.0);
  CHECK(m.peak_gain < 1.0);
  CHECK(m.noisy.samples.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK((m.clean.samples - loud.samples * m.peak_gain).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("apply_rir is an FFT convolution") {
  const AudioClip clip = white_noise(1000, 11);
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(1);
  impulse[0] = 1.0;
  const AudioClip same = apply_rir(clip, impulse);
  CHECK(same.size() == clip.size());
  CHECK((same.samples - clip.samples).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXd delayed = Eigen::VectorXd::Zero(8);
  delayed[7] = 1.0;
  const AudioClip shifted = apply_rir(clip, delayed);
  CHECK(shifted.size() == clip.size() + 7);
  CHECK(shifted.samples.head(7).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((shifted.samples.tail(clip.size()) - clip.samples).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::VectorXd rir = synth_rir(100.0, 3);
  const AudioClip wet = apply_rir(clip, rir);
  const auto want = oracle::convolve(std::vector<double>(clip.samples.data(), clip.samples.data() + clip.size()),
                                     std::vector<double>(rir.data(), rir.data() + rir.size()));
  REQUIRE(wet.size() == static_cast<Index>(want.size()));
  for (Index i = 0; i < wet.size(); ++i) CHECK(std::abs(wet.samples[i] - want[i]) < 1e-10);
}

TEST_CASE("synth_rir decays 60 dB over rt60") {
  for (double rt60 : {50.0, 250.0, 1000.0}) {
    const Eigen::VectorXd rir = synth_rir(rt60, 17);
    CHECK(rir[0] == 1.0);
    CHECK(rir.size() == static_cast<Index>(std::llround(1.2 * rt60 * 16)));
    // Least-squares line through the log energy of 2 ms blocks of the tail.
    const Index block = 32;
    std::vector<double> t, db;
    for (Index start = 1; start + block <= rir.size(); start += block) {
      const double e = rir.segment(start, block).squaredNorm() / block;
      t.push_back((start + block / 2.0) / 16000.0 * 1000.0);
      db.push_back(10.0 * std::log10(e));
    }
    const double n = static_cast<double>(t.size());
    double st = 0, sd = 0, stt = 0, std_ = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      st += t[i];
      sd += db[i];
      stt += t[i] * t[i];
      std_ += t[i] * db[i];
    }
    const double slope = (n * std_ - st * sd) / (n * stt - st * st);
    const double decay_at_rt60 = slope * rt60;
    CHECK(std::abs(decay_at_rt60 + 60.0) < 3.0);
  }
  CHECK(synth_rir(200.0, 5) == synth_rir(200.0, 5));
  CHECK_THROWS_AS(synth_rir(20.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(synth_rir(1500.0, 1), std::invalid_argument);
}

TEST_CASE("vad_labels examples") {
  const StftParams p;
  AudioClip silence;
  silence.samples = Eigen::VectorXd::Zero(4000);
  const auto zeros = vad_labels(silence, p);
  CHECK(zeros.size() == static_cast<std::size_t>(frame_count(4000, p)));
  CHECK(std::all_of(zeros.begin(), zeros.end(), [](int v) { return v == 0; }));

  const auto ones = vad_labels(tone(4000, 440.0), p);
  CHECK(std::all_of(ones.begin(), ones.end(), [](int v) { return v == 1; }));

  AudioClip half = tone(8000, 440.0);
  const Index onset = 4000;
  half.samples.head(onset).setZero();
  const auto labels = vad_labels(half, p);
  REQUIRE(labels.size() == static_cast<std::size_t>(frame_count(8000, p)));
  const auto first = static_cast<Index>(std::find(labels.begin(), labels.end(), 1) - labels.begin());
  // Frames containing the onset start at (onset - frame) / hop.
  const Index onset_frame = (onset - p.frame) / p.hop + 1;
  CHECK(std::abs(first - onset_frame) <= 1);
  CHECK(std::all_of(labels.begin() + first, labels.end(), [](int v) { return v == 1; }));
}

TEST_CASE("WAV round trip and rejections") {
  TempDir dir("wav");
  const AudioClip clip = white_noise(5000, 21, 0.3);
  write_wav(dir / "a.wav", clip);
  const AudioClip back = read_wav(dir / "a.wav");
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.size() == clip.size());
  const Eigen::VectorXd in_range = clip.samples.cwiseMax(-1.0).cwiseMin(1.0);
  CHECK((back.samples - in_range).cwiseAbs().maxCoeff() <= 1.0 / 32768.0);

  AudioClip loud;
  loud.samples = Eigen::VectorXd::Constant(3, 1.5);
  write_wav(dir / "loud.wav", loud);
  CHECK(read_wav(dir / "loud.wav").samples.maxCoeff() <= 1.0);

  write_raw_wav(dir / "stereo.wav", 1, 2, 16000, 16, 10);
  CHECK_THROWS_WITH_AS(read_wav(dir / "stereo.wav"), doctest::Contains("mono required"), DataError);
  write_raw_wav(dir / "cd.wav", 1, 1, 44100, 16, 10);
  CHECK_THROWS_WITH_AS(read_wav(dir / "cd.wav"), doctest::Contains("sample-rate mismatch"), DataError);
  CHECK(read_wav(dir / "cd.wav", 0).sample_rate == 44100);
  write_raw_wav(dir / "float.wav", 3, 1, 16000, 32, 10);
  CHECK_THROWS_WITH_AS(read_wav(dir / "float.wav"), doctest::Contains("PCM"), DataError);
  CHECK_THROWS_AS(read_wav(dir / "missing.wav"), DataError);
  std::ofstream(dir / "junk.wav") << "not a wave file";
  CHECK_THROWS_AS(read_wav(dir / "junk.wav"), DataError);
}

TEST_CASE("synthetic speech and noise") {
  const AudioClip a = synth_speech({}, 3);
  CHECK(a.samples == synth_speech({}, 3).samples);
  CHECK(a.samples != synth_speech({}, 4).samples);
  CHECK(a.size() == 48000);
  CHECK(a.samples.cwiseAbs().maxCoeff() == doctest::Approx(0.5));
  const auto labels = vad_labels(a, StftParams{});
  const auto active = std::count(labels.begin(), labels.end(), 1);
  CHECK(active > static_cast<long>(labels.size() / 3));
  CHECK(active < static_cast<long>(labels.size()));

  for (NoiseKind kind : all_noise_kinds()) {
    CAPTURE(to_string(kind));
    const AudioClip n = synth_noise(kind, 20000, 5);
    CHECK(n.size() == 20000);
    CHECK(std::sqrt(mean_power(n.samples)) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(n.samples == synth_noise(kind, 20000, 5).samples);
    CHECK(parse_noise_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_noise_kind("traffic"), std::invalid_argument);
}

TEST_CASE("dataset synthesis is reproducible") {
  TempDir a("ds_a"), b("ds_b");
  SynthOptions opt;
  opt.counts = {4, 2, 2};
  opt.seed = 7;
  opt.seconds = 1.0;
  opt.snr_db = {-5.0, 0.0, 5.0, 10.0};
  const DatasetManifest ma = synthesize_dataset(opt, a.path());
  synthesize_dataset(opt, b.path());
  CHECK(read_file(a / "manifest.jsonl") == read_file(b / "manifest.jsonl"));
  REQUIRE(ma.entries.size() == 8);
  CHECK(read_file(a / ma.entries[3].noisy_path) == read_file(b / ma.entries[3].noisy_path));

  std::set<std::string> cleans;
  for (const auto& e : ma.entries) {
    CHECK(std::find(opt.snr_db.begin(), opt.snr_db.end(), e.snr_db) != opt.snr_db.end());
    cleans.insert(e.clean_path);
    const auto labels = read_labels(ma.resolve(e.label_path));
    const AudioClip noisy = read_wav(ma.resolve(e.noisy_path));
    CHECK(static_cast<Index>(labels.size()) == frame_count(noisy.size(), opt.stft));
  }
  CHECK(cleans.size() == ma.entries.size());
  CHECK(ma.split(Split::train).size() == 4);
  CHECK(ma.split(Split::valid).size() == 2);
  CHECK(ma.split(Split::test).size() == 2);

  const DatasetManifest back = read_manifest(a / "manifest.jsonl");
  CHECK(back.entries == ma.entries);
  CHECK(back.root == a.path());

  const TaskData vad = load_task_data(back, Split::train, TargetKind::vad_labels, opt.stft);
  CHECK(vad.features.cols() == 903);
  CHECK(vad.targets.cols() == 1);
  CHECK(vad.offsets.size() == 5);
  CHECK(vad.offsets.back() == vad.features.rows());
  const TaskData enh = load_task_data(back, Split::test, TargetKind::clean_log_power, opt.stft);
  CHECK(enh.targets.cols() == 129);
  CHECK(enh.targets.rows() == enh.features.rows());

  opt.seed = 8;
  TempDir c("ds_c");
  synthesize_dataset(opt, c.path());
  CHECK(read_file(a / "manifest.jsonl") != read_file(c / "manifest.jsonl"));
}

TEST_CASE("manifest errors") {
  TempDir dir("manifest");
  CHECK_THROWS_AS(read_manifest(dir / "none.jsonl"), DataError);
  std::ofstream(dir / "bad.jsonl") << "{\"id\": 1\n";
  CHECK_THROWS_AS(read_manifest(dir / "bad.jsonl"), DataError);
  std::ofstream(dir / "labels.json") << "[0, 1, 2]";
  CHECK_THROWS_AS(read_labels(dir / "labels.json"), DataError);
  CHECK(to_string(parse_split("valid")) == "valid");
  CHECK_THROWS_AS(parse_split("dev"), std::invalid_argument);
}
