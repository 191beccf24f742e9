// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Subcommands of the bitwave tool:
//
//   synth    generate a mixture dataset and its manifest
//   train    train, calibrate and save a model
//   eval     score a model or a predictions file on one split
//   bench    time the quantized kernel against the dense product
//   explore  train one model per bit-width pair and rank the pairs

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bitwave::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

/// Runs one command line (without the program name). Results go to `out`,
/// progress and diagnostics to `err`; `in` feeds `--predictions -`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace bitwave::cli
