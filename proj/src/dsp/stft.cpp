// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/dsp/stft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "bitwave/core/error.hpp"

namespace bitwave::dsp {

StftParams StftParams::from_ms(int sample_rate, double frame_ms, double overlap) {
  if (sample_rate <= 0 || frame_ms <= 0.0 || overlap < 0.0 || overlap >= 1.0)
    throw std::invalid_argument("invalid STFT timing");
  StftParams p;
  p.sample_rate = sample_rate;
  p.frame = static_cast<int>(std::lround(sample_rate * frame_ms / 1000.0));
  p.hop = std::max(1, static_cast<int>(std::lround(p.frame * (1.0 - overlap))));
  p.fft_size = static_cast<int>(std::bit_ceil(static_cast<unsigned>(p.frame)));
  p.validate();
  return p;
}

void StftParams::validate() const {
  if (sample_rate <= 0 || frame <= 0 || hop <= 0 || fft_size <= 0) throw std::invalid_argument("STFT sizes must be positive");
  if (hop > frame) throw std::invalid_argument("STFT hop exceeds frame length");
  if (fft_size < frame) throw std::invalid_argument("FFT size smaller than frame");
  if (fft_size % 2 != 0) throw std::invalid_argument("FFT size must be even");
}

Eigen::VectorXd hann_window(int length) {
  Eigen::VectorXd w(length);
  for (int n = 0; n < length; ++n) w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  return w;
}

Index frame_count(Index samples, const StftParams& params) {
  if (samples < params.frame) return 0;
  return (samples - params.frame) / params.hop + 1;
}

Spectrogram stft(const AudioClip& clip, const StftParams& params) {
  params.validate();
  if (clip.sample_rate != params.sample_rate)
    throw DataError("clip sample rate " + std::to_string(clip.sample_rate) + " Hz does not match STFT rate " +
                    std::to_string(params.sample_rate) + " Hz");
  const Index frames = frame_count(clip.size(), params);
  if (frames == 0)
    throw DataError("clip of " + std::to_string(clip.size()) + " samples is shorter than one frame (" +
                    std::to_string(params.frame) + ")");
  const Eigen::VectorXd window = hann_window(params.frame);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buffer(static_cast<std::size_t>(params.fft_size), 0.0);
  std::vector<std::complex<double>> bins;

  Spectrogram spec;
  spec.params = params;
  spec.values.resize(frames, params.bins());
  for (Index f = 0; f < frames; ++f) {
    const double* src = clip.samples.data() + f * params.hop;
    for (int n = 0; n < params.frame; ++n) buffer[static_cast<std::size_t>(n)] = src[n] * window[n];
    fft.fwd(bins, buffer);
    for (int k = 0; k < params.bins(); ++k) spec.values(f, k) = bins[static_cast<std::size_t>(k)];
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec, const StftParams& params) {
  params.validate();
  if (!(spec.params == params)) throw std::invalid_argument("istft: spectrogram was computed with different parameters");
  if (spec.bins() != params.bins()) throw std::invalid_argument("istft: bin count does not match FFT size");
  const Index frames = spec.frames();
  AudioClip out;
  out.sample_rate = params.sample_rate;
  if (frames == 0) return out;
  const Index length = (frames - 1) * params.hop + params.frame;
  out.samples = Eigen::VectorXd::Zero(length);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(length);
  const Eigen::VectorXd window = hann_window(params.frame);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(params.bins()));
  std::vector<double> frame;
  for (Index f = 0; f < frames; ++f) {
    for (int k = 0; k < params.bins(); ++k) bins[static_cast<std::size_t>(k)] = spec.values(f, k);
    fft.inv(frame, bins, params.fft_size);
    const Index start = f * params.hop;
    for (int n = 0; n < params.frame; ++n) {
      out.samples[start + n] += frame[static_cast<std::size_t>(n)] * window[n];
      weight[start + n] += window[n] * window[n];
    }
  }
  for (Index i = 0; i < length; ++i)
    if (weight[i] > 1e-8) out.samples[i] /= weight[i];
  return out;
}

RowMatrix<double> magnitude(const Spectrogram& spec) { return spec.values.cwiseAbs(); }

Spectrogram with_phase(const RowMatrix<double>& magnitude, const Spectrogram& phase_source) {
  if (magnitude.rows() != phase_source.frames() || magnitude.cols() != phase_source.bins())
    throw std::invalid_argument("magnitude shape does not match the phase source");
  Spectrogram out;
  out.params = phase_source.params;
  out.values.resize(magnitude.rows(), magnitude.cols());
  for (Index f = 0; f < magnitude.rows(); ++f)
    for (Index k = 0; k < magnitude.cols(); ++k)
      out.values(f, k) = std::polar(magnitude(f, k), std::arg(phase_source.values(f, k)));
  return out;
}

}  // namespace bitwave::dsp
