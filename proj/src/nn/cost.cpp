// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/nn/cost.hpp"

namespace bitwave::nn {

CostEstimate model_cost(const ModelSpec& spec, int weight_bits, int /*neuron_bits*/) {
  spec.validate();
  std::uint64_t weights = 0;
  std::uint64_t biases = 0;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    weights += static_cast<std::uint64_t>(spec.layer_dims[l]) * static_cast<std::uint64_t>(spec.layer_dims[l + 1]);
    biases += static_cast<std::uint64_t>(spec.layer_dims[l + 1]);
  }
  CostEstimate cost;
  cost.mops_per_frame = 2.0 * static_cast<double>(weights) / 1e6;
  // weights * 4 bytes * W / 32 == weights * W / 8
  cost.memory_bytes = (weights * static_cast<std::uint64_t>(weight_bits) + 7) / 8 + biases * 4;
  return cost;
}

}  // namespace bitwave::nn
