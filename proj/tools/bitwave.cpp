// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/cli/commands.hpp"

int main(int argc, char** argv) { return bitwave::cli::run_cli(argc, argv); }
