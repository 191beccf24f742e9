// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bitwave {

// Precondition violations on in-memory arguments throw std::invalid_argument.
// The classes below carry a category that the command-line front end maps
// onto its exit codes.

/// Bad flags, config keys or values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing, malformed or inconsistent files and datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training or evaluation produced NaN/inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bitwave
