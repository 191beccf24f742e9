// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/dsp/synth.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "bitwave/core/error.hpp"

namespace bitwave::dsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Two-pole resonator with unit gain at DC.
class Resonator {
 public:
  Resonator(double freq, double bandwidth, int rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth / rate);
    a1_ = 2.0 * r * std::cos(kTwoPi * freq / rate);
    a2_ = -r * r;
    gain_ = 1.0 - a1_ - a2_;
  }
  double operator()(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, gain_ = 1, y1_ = 0, y2_ = 0;
};

void set_rms(Eigen::VectorXd& x, double rms) {
  const double p = mean_power(x);
  if (p > 0.0) x *= rms / std::sqrt(p);
}

/// Raised-cosine fade in and out over `ramp` samples.
void apply_ramps(Eigen::Ref<Eigen::VectorXd> x, Index ramp) {
  ramp = std::min(ramp, x.size() / 2);
  for (Index i = 0; i < ramp; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / ramp);
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

struct Vowel {
  double f1, f2, f3;
};

constexpr std::array<Vowel, 7> kVowels{{{730, 1090, 2440},
                                       {270, 2290, 3010},
                                       {300, 870, 2240},
                                       {530, 1840, 2480},
                                       {570, 840, 2410},
                                       {660, 1720, 2410},
                                       {490, 1350, 1690}}};

Eigen::VectorXd voiced_segment(Index length, double f0, double formant_scale, const Vowel& v, int rate,
                               std::mt19937_64& rng) {
  Resonator r1(v.f1 * formant_scale, 80.0, rate), r2(v.f2 * formant_scale, 100.0, rate),
      r3(v.f3 * formant_scale, 140.0, rate);
  const double glide = uniform(rng, -0.15, 0.15);
  std::normal_distribution<double> jitter(0.0, 0.01);
  Eigen::VectorXd out(length);
  double phase = 0.0;
  double previous = 0.0;
  for (Index i = 0; i < length; ++i) {
    const double f = f0 * (1.0 + glide * static_cast<double>(i) / static_cast<double>(length));
    phase += f / rate;
    double excitation = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      excitation = 1.0 + jitter(rng);
    }
    const double y = r3(r2(r1(excitation)));
    out[i] = y - previous;
    previous = y;
  }
  return out;
}

Eigen::VectorXd fricative_segment(Index length, std::mt19937_64& rng) {
  std::normal_distribution<double> white;
  Eigen::VectorXd out(length);
  double x1 = 0.0, x2 = 0.0;
  for (Index i = 0; i < length; ++i) {
    const double x = white(rng);
    out[i] = x - 2.0 * x1 + x2;
    x2 = x1;
    x1 = x;
  }
  return out;
}

}  // namespace

MixResult mix_at_snr(const AudioClip& clean, const AudioClip& noise, double snr_db) {
  if (clean.size() == 0 || mean_power(clean.samples) == 0.0) throw DataError("silent clean input");
  if (std::isnan(snr_db)) throw std::invalid_argument("SNR is NaN");
  MixResult m;
  m.clean = clean;
  m.noise.sample_rate = clean.sample_rate;
  if (std::isinf(snr_db) && snr_db > 0) {
    m.noisy = clean;
    m.noise.samples = Eigen::VectorXd::Zero(clean.size());
    return m;
  }
  if (noise.sample_rate != clean.sample_rate) throw DataError("noise and clean sample rates differ");
  if (noise.size() == 0 || mean_power(noise.samples) == 0.0) throw DataError("silent noise input");

  Eigen::VectorXd tiled(clean.size());
  for (Index i = 0; i < clean.size(); ++i) tiled[i] = noise.samples[i % noise.size()];
  const double pc = mean_power(clean.samples);
  const double pn = mean_power(tiled);
  if (pn == 0.0) throw DataError("silent noise input");
  m.noise_gain = std::sqrt(pc / (pn * std::pow(10.0, snr_db / 10.0)));
  m.noise.samples = m.noise_gain * tiled;
  m.noisy.sample_rate = clean.sample_rate;
  m.noisy.samples = clean.samples + m.noise.samples;
  const double peak = m.noisy.samples.cwiseAbs().maxCoeff();
  if (peak > 1.0) {
    m.peak_gain = 1.0 / peak;
    m.noisy.samples *= m.peak_gain;
    m.clean.samples *= m.peak_gain;
    m.noise.samples *= m.peak_gain;
  }
  return m;
}

Eigen::VectorXd synth_rir(double rt60_ms, std::uint64_t seed, int sample_rate) {
  if (!(rt60_ms >= 50.0 && rt60_ms <= 1000.0)) throw std::invalid_argument("rt60 must be in [50, 1000] ms");
  const double rt60_samples = rt60_ms * sample_rate / 1000.0;
  const auto length = static_cast<Index>(std::llround(1.2 * rt60_samples));
  auto rng = make_rng(seed, 0x52495200);
  std::normal_distribution<double> white;
  constexpr double kTailLevel = 0.05;
  const double decay = std::log(1000.0) / rt60_samples;
  Eigen::VectorXd h(length);
  h[0] = 1.0;
  for (Index n = 1; n < length; ++n) h[n] = kTailLevel * white(rng) * std::exp(-decay * static_cast<double>(n));
  return h;
}

AudioClip apply_rir(const AudioClip& clip, const Eigen::VectorXd& rir) {
  if (clip.size() == 0 || rir.size() == 0) throw std::invalid_argument("apply_rir: empty input");
  const Index length = clip.size() + rir.size() - 1;
  const auto nfft = static_cast<int>(std::bit_ceil(static_cast<std::uint64_t>(length)));
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> a(static_cast<std::size_t>(nfft), 0.0), b(static_cast<std::size_t>(nfft), 0.0);
  std::copy(clip.samples.data(), clip.samples.data() + clip.size(), a.begin());
  std::copy(rir.data(), rir.data() + rir.size(), b.begin());
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> out;
  fft.inv(out, fa, nfft);
  AudioClip wet;
  wet.sample_rate = clip.sample_rate;
  wet.samples = Eigen::Map<const Eigen::VectorXd>(out.data(), length);
  return wet;
}

std::vector<int> vad_labels(const AudioClip& clean, const StftParams& params, double threshold_db) {
  params.validate();
  const Index frames = frame_count(clean.size(), params);
  if (frames == 0) throw DataError("clip is shorter than one frame");
  std::vector<double> energy(static_cast<std::size_t>(frames));
  for (Index f = 0; f < frames; ++f)
    energy[static_cast<std::size_t>(f)] = clean.samples.segment(f * params.hop, params.frame).squaredNorm();
  const double top = *std::max_element(energy.begin(), energy.end());
  std::vector<int> labels(energy.size(), 0);
  if (top == 0.0) return labels;
  const double floor = top * std::pow(10.0, -threshold_db / 10.0);
  for (std::size_t f = 0; f < energy.size(); ++f) labels[f] = energy[f] > 0.0 && energy[f] >= floor ? 1 : 0;
  return labels;
}

AudioClip synth_speech(const SpeechOptions& options, std::uint64_t seed) {
  if (options.seconds <= 0.0 || options.sample_rate <= 0) throw std::invalid_argument("invalid speech options");
  auto rng = make_rng(seed, 0x53504348);
  const int rate = options.sample_rate;
  const auto total = static_cast<Index>(std::llround(options.seconds * rate));
  auto ms = [rate](double v) { return static_cast<Index>(v * rate / 1000.0); };

  const double f0 = uniform(rng, 95.0, 230.0);
  const double formant_scale = uniform(rng, 0.9, 1.15);
  std::uniform_int_distribution<std::size_t> pick_vowel(0, kVowels.size() - 1);
  std::uniform_int_distribution<int> pick_syllables(1, 4);

  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples = Eigen::VectorXd::Zero(total);
  Index pos = ms(uniform(rng, 150.0, 400.0));
  const Index tail = ms(150.0);
  while (true) {
    const int syllables = pick_syllables(rng);
    bool placed = false;
    for (int s = 0; s < syllables; ++s) {
      const double level = uniform(rng, 0.5, 1.0);
      if (uniform(rng, 0.0, 1.0) < 0.3) {
        const Index len = ms(uniform(rng, 40.0, 100.0));
        if (pos + len > total - tail) break;
        Eigen::VectorXd seg = fricative_segment(len, rng);
        set_rms(seg, 0.35 * level);
        apply_ramps(seg, ms(8.0));
        clip.samples.segment(pos, len) = seg;
        pos += len;
      }
      const Index len = ms(uniform(rng, 80.0, 250.0));
      if (pos + len > total - tail) break;
      Eigen::VectorXd seg =
          voiced_segment(len, f0 * uniform(rng, 0.9, 1.1), formant_scale, kVowels[pick_vowel(rng)], rate, rng);
      set_rms(seg, level);
      apply_ramps(seg, ms(15.0));
      clip.samples.segment(pos, len) = seg;
      pos += len;
      placed = true;
    }
    pos += ms(uniform(rng, 120.0, 500.0));
    if (!placed || pos >= total - tail) break;
  }
  const double peak = clip.samples.cwiseAbs().maxCoeff();
  if (peak > 0.0) clip.samples *= options.peak / peak;
  return clip;
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::white: return "white";
    case NoiseKind::pink: return "pink";
    case NoiseKind::brown: return "brown";
    case NoiseKind::babble: return "babble";
    case NoiseKind::hum: return "hum";
    case NoiseKind::modulated: return "modulated";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  for (NoiseKind k : all_noise_kinds())
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

const std::vector<NoiseKind>& all_noise_kinds() {
  static const std::vector<NoiseKind> kinds{NoiseKind::white, NoiseKind::pink, NoiseKind::brown,
                                            NoiseKind::babble, NoiseKind::hum, NoiseKind::modulated};
  return kinds;
}

AudioClip synth_noise(NoiseKind kind, Index samples, std::uint64_t seed, int sample_rate) {
  if (samples <= 0) throw std::invalid_argument("noise length must be positive");
  auto rng = make_rng(seed, 0x4E4F4900 + static_cast<std::uint64_t>(kind));
  std::normal_distribution<double> white;
  AudioClip clip;
  clip.sample_rate = sample_rate;
  Eigen::VectorXd& x = clip.samples;
  x.resize(samples);

  switch (kind) {
    case NoiseKind::white:
      for (Index i = 0; i < samples; ++i) x[i] = white(rng);
      break;
    case NoiseKind::pink: {
      // Paul Kellet's refined pink filter.
      double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
      for (Index i = 0; i < samples; ++i) {
        const double w = white(rng);
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        x[i] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
        b6 = w * 0.115926;
      }
      break;
    }
    case NoiseKind::brown: {
      double y = 0.0;
      for (Index i = 0; i < samples; ++i) {
        y = 0.998 * y + white(rng);
        x[i] = y;
      }
      x.array() -= x.mean();
      break;
    }
    case NoiseKind::babble: {
      x.setZero();
      SpeechOptions talker;
      talker.seconds = static_cast<double>(samples) / sample_rate;
      talker.sample_rate = sample_rate;
      constexpr int kTalkers = 12;
      for (int t = 0; t < kTalkers; ++t) {
        const AudioClip voice = synth_speech(talker, rng());
        const Index shift = std::uniform_int_distribution<Index>(0, samples - 1)(rng);
        const double level = uniform(rng, 0.6, 1.0);
        for (Index i = 0; i < samples; ++i) x[i] += level * voice.samples[(i + shift) % samples];
      }
      for (Index i = 0; i < samples; ++i) x[i] += 0.01 * white(rng);
      break;
    }
    case NoiseKind::hum: {
      const double mains = rng() % 2 ? 50.0 : 60.0;
      std::array<double, 10> phases;
      for (double& p : phases) p = uniform(rng, 0.0, kTwoPi);
      for (Index i = 0; i < samples; ++i) {
        double v = 0.0;
        for (int h = 1; h <= 10; ++h)
          v += std::sin(kTwoPi * mains * h * static_cast<double>(i) / sample_rate + phases[h - 1]) / h;
        x[i] = v + 0.03 * white(rng);
      }
      break;
    }
    case NoiseKind::modulated: {
      Resonator band(uniform(rng, 300.0, 3000.0), 500.0, sample_rate);
      const double rate_hz = uniform(rng, 0.5, 4.0);
      const double phase = uniform(rng, 0.0, kTwoPi);
      for (Index i = 0; i < samples; ++i) {
        const double am = 1.0 + 0.8 * std::sin(kTwoPi * rate_hz * static_cast<double>(i) / sample_rate + phase);
        x[i] = am * band(white(rng)) + 0.05 * white(rng);
      }
      break;
    }
  }
  set_rms(x, 0.1);
  return clip;
}

}  // namespace bitwave::dsp
