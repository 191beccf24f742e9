// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Design-space exploration over (weight bits, neuron bits).

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bitwave::eval {

inline constexpr double kScoreFloor = 1e-3;

using BitPair = std::pair<int, int>;

/// Parses "1x2,4x4" (also accepts "1,2" for a single pair).
std::vector<BitPair> parse_grid(const std::string& text);
std::string format_pair(const BitPair& pair);

/// Outcome of training and testing one cell.
struct CellOutcome {
  /// Frame error (VAD) or mean SNR improvement in dB (enhancement).
  double task_metric = 0.0;
  /// Measured kernel speedup; 0 when not measured.
  double measured_speedup = 0.0;
};

struct DseCell {
  int weight_bits = 32;
  int neuron_bits = 32;
  bool completed = false;
  double task_metric = 0.0;
  double ideal_speedup = 1.0;
  double measured_speedup = 0.0;
  double normalized_speedup = 0.0;
  double normalized_error = 0.0;
  double dse_score = 0.0;

  friend bool operator==(const DseCell&, const DseCell&) = default;
};

enum class SpeedupBasis { ideal, measured };

struct DseReport {
  /// "vad" or "enhance".
  std::string task;
  /// "frame_error" or "snr_improvement_db"; larger is worse only for frame_error.
  std::string metric;
  SpeedupBasis basis = SpeedupBasis::ideal;
  std::vector<DseCell> cells;
  /// Index into cells; nullopt when no cell completed.
  std::optional<std::size_t> selected;
  /// Set when a cell failed and the remaining cells were skipped.
  bool partial = false;
  std::string failure;

  friend bool operator==(const DseReport&, const DseReport&) = default;
};

/// (x - min) / (max - min) per element; all zeros when max == min.
std::vector<double> min_max_normalize(std::span<const double> values);

/// normalized_speedup / max(normalized_error, 1e-3).
double dse_score(double normalized_speedup, double normalized_error);

/// Fills the normalized columns, scores and selection of the completed
/// cells. Error is the task metric for frame error and its negation for
/// SNR improvement. Ties go to the earliest cell.
void score_report(DseReport& report);

using CellEvaluator = std::function<CellOutcome(int weight_bits, int neuron_bits)>;

/// Evaluates every cell in grid order and scores the result. An exception
/// from `evaluate` stops the sweep; the report is returned with `partial`
/// set and the message in `failure`.
DseReport dse_grid(const std::vector<BitPair>& grid, const std::string& task, const CellEvaluator& evaluate,
                   SpeedupBasis basis = SpeedupBasis::ideal);

nlohmann::json to_json(const DseReport& report);
DseReport report_from_json(const nlohmann::json& j);
/// Header row plus one row per cell.
std::string to_csv(const DseReport& report);

}  // namespace bitwave::eval
