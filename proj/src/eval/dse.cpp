// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/eval/dse.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bitwave/core/error.hpp"
#include "bitwave/eval/metrics.hpp"
#include "bitwave/nn/model.hpp"

namespace bitwave::eval {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

int parse_bits(const std::string& text, const std::string& whole) {
  int v = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("malformed bit pair '" + whole + "'");
  if (!nn::valid_bit_width(v)) throw std::invalid_argument("bit width " + t + " not in {1, 2, 4, 8, 32}");
  return v;
}

BitPair parse_pair(const std::string& item) {
  const auto x = item.find('x');
  if (x == std::string::npos) throw std::invalid_argument("malformed bit pair '" + item + "'; expected WxN");
  return {parse_bits(item.substr(0, x), item), parse_bits(item.substr(x + 1), item)};
}

std::string to_string(SpeedupBasis basis) { return basis == SpeedupBasis::ideal ? "ideal" : "measured"; }

std::string metric_for(const std::string& task) { return task == "enhance" ? "snr_improvement_db" : "frame_error"; }

std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : "nan";
}

}  // namespace

std::vector<BitPair> parse_grid(const std::string& text) {
  const std::string body = trim(text);
  if (body.empty()) throw std::invalid_argument("empty grid");
  std::vector<BitPair> grid;
  if (body.find('x') == std::string::npos) {
    const auto comma = body.find(',');
    if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
      throw std::invalid_argument("malformed grid '" + text + "'; expected W1xN1,W2xN2,...");
    grid.emplace_back(parse_bits(body.substr(0, comma), body), parse_bits(body.substr(comma + 1), body));
    return grid;
  }
  std::set<BitPair> seen;
  std::stringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    const BitPair pair = parse_pair(trim(item));
    if (!seen.insert(pair).second) throw std::invalid_argument("duplicate grid cell " + format_pair(pair));
    grid.push_back(pair);
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

std::string format_pair(const BitPair& pair) { return std::to_string(pair.first) + "x" + std::to_string(pair.second); }

std::vector<double> min_max_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

double dse_score(double normalized_speedup, double normalized_error) {
  return normalized_speedup / std::max(normalized_error, kScoreFloor);
}

void score_report(DseReport& report) {
  std::vector<std::size_t> done;
  for (std::size_t i = 0; i < report.cells.size(); ++i)
    if (report.cells[i].completed) done.push_back(i);
  report.selected.reset();
  if (done.empty()) return;

  const bool higher_is_better = report.metric == "snr_improvement_db";
  std::vector<double> speed, error;
  for (std::size_t i : done) {
    const DseCell& c = report.cells[i];
    speed.push_back(report.basis == SpeedupBasis::ideal ? c.ideal_speedup : c.measured_speedup);
    error.push_back(higher_is_better ? -c.task_metric : c.task_metric);
  }
  const auto ns = min_max_normalize(speed);
  const auto ne = min_max_normalize(error);
  for (std::size_t k = 0; k < done.size(); ++k) {
    DseCell& c = report.cells[done[k]];
    c.normalized_speedup = ns[k];
    c.normalized_error = ne[k];
    c.dse_score = dse_score(ns[k], ne[k]);
    if (!report.selected || c.dse_score > report.cells[*report.selected].dse_score) report.selected = done[k];
  }
}

DseReport dse_grid(const std::vector<BitPair>& grid, const std::string& task, const CellEvaluator& evaluate,
                   SpeedupBasis basis) {
  if (grid.empty()) throw std::invalid_argument("empty grid");
  DseReport report;
  report.task = task;
  report.metric = metric_for(task);
  report.basis = basis;
  for (const auto& [w, n] : grid) {
    DseCell cell;
    cell.weight_bits = w;
    cell.neuron_bits = n;
    cell.ideal_speedup = ideal_speedup(w, n);
    report.cells.push_back(cell);
  }
  for (DseCell& cell : report.cells) {
    try {
      const CellOutcome outcome = evaluate(cell.weight_bits, cell.neuron_bits);
      cell.task_metric = outcome.task_metric;
      cell.measured_speedup = outcome.measured_speedup;
      cell.completed = true;
    } catch (const std::exception& e) {
      report.partial = true;
      report.failure = "cell " + format_pair({cell.weight_bits, cell.neuron_bits}) + ": " + e.what();
      break;
    }
  }
  score_report(report);
  return report;
}

json to_json(const DseReport& report) {
  json cells = json::array();
  for (const DseCell& c : report.cells)
    cells.push_back({{"weight_bits", c.weight_bits},
                     {"neuron_bits", c.neuron_bits},
                     {"completed", c.completed},
                     {"task_metric", c.task_metric},
                     {"ideal_speedup", c.ideal_speedup},
                     {"measured_speedup", c.measured_speedup},
                     {"normalized_speedup", c.normalized_speedup},
                     {"normalized_error", c.normalized_error},
                     {"dse_score", c.dse_score}});
  json j{{"task", report.task},       {"metric", report.metric}, {"speedup_basis", to_string(report.basis)},
         {"cells", cells},            {"partial", report.partial}, {"failure", report.failure},
         {"score", "normalized_speedup / max(normalized_error, 1e-3)"}};
  if (report.selected) {
    const DseCell& s = report.cells[*report.selected];
    j["selected"] = {{"index", *report.selected}, {"weight_bits", s.weight_bits}, {"neuron_bits", s.neuron_bits}};
  } else {
    j["selected"] = nullptr;
  }
  return j;
}

DseReport report_from_json(const json& j) {
  try {
    DseReport r;
    r.task = j.at("task").get<std::string>();
    r.metric = j.at("metric").get<std::string>();
    const auto basis = j.at("speedup_basis").get<std::string>();
    if (basis != "ideal" && basis != "measured") throw DataError("unknown speedup basis '" + basis + "'");
    r.basis = basis == "ideal" ? SpeedupBasis::ideal : SpeedupBasis::measured;
    for (const auto& c : j.at("cells")) {
      DseCell cell;
      cell.weight_bits = c.at("weight_bits").get<int>();
      cell.neuron_bits = c.at("neuron_bits").get<int>();
      cell.completed = c.at("completed").get<bool>();
      cell.task_metric = c.at("task_metric").get<double>();
      cell.ideal_speedup = c.at("ideal_speedup").get<double>();
      cell.measured_speedup = c.at("measured_speedup").get<double>();
      cell.normalized_speedup = c.at("normalized_speedup").get<double>();
      cell.normalized_error = c.at("normalized_error").get<double>();
      cell.dse_score = c.at("dse_score").get<double>();
      r.cells.push_back(cell);
    }
    r.partial = j.at("partial").get<bool>();
    r.failure = j.at("failure").get<std::string>();
    if (!j.at("selected").is_null()) {
      const auto index = j.at("selected").at("index").get<std::size_t>();
      if (index >= r.cells.size()) throw DataError("selected cell out of range");
      r.selected = index;
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed DSE report: ") + e.what());
  }
}

std::string to_csv(const DseReport& report) {
  std::string out =
      "weight_bits,neuron_bits,completed,task_metric,ideal_speedup,measured_speedup,normalized_speedup,"
      "normalized_error,dse_score,selected\n";
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const DseCell& c = report.cells[i];
    out += std::to_string(c.weight_bits) + "," + std::to_string(c.neuron_bits) + "," + (c.completed ? "1" : "0") + "," +
           format_double(c.task_metric) + "," + format_double(c.ideal_speedup) + "," +
           format_double(c.measured_speedup) + "," + format_double(c.normalized_speedup) + "," +
           format_double(c.normalized_error) + "," + format_double(c.dse_score) + "," +
           (report.selected == i ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace bitwave::eval
