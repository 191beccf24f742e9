// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/nn/model.hpp"

namespace bitwave::nn {

std::string to_string(Task task) { return task == Task::vad ? "vad" : "enhance"; }

Task parse_task(const std::string& name) {
  if (name == "vad") return Task::vad;
  if (name == "enhance") return Task::enhance;
  throw std::invalid_argument("unknown task '" + name + "' (expected vad or enhance)");
}

void ModelSpec::validate() const {
  if (layer_dims.size() < 3) throw std::invalid_argument("model needs at least one hidden layer");
  for (int d : layer_dims)
    if (d < 1) throw std::invalid_argument("layer dimensions must be >= 1");
  if (!valid_bit_width(weight_bits))
    throw std::invalid_argument("weight bits must be one of 1, 2, 4, 8, 32; got " + std::to_string(weight_bits));
  if (!valid_bit_width(neuron_bits))
    throw std::invalid_argument("neuron bits must be one of 1, 2, 4, 8, 32; got " + std::to_string(neuron_bits));
  if (context_frames < 1) throw std::invalid_argument("context_frames must be >= 1");
}

ModelSpec ModelSpec::vad(int bins, int context, std::vector<int> hidden) {
  ModelSpec spec;
  spec.task = Task::vad;
  spec.context_frames = context;
  spec.layer_dims.push_back(bins * context);
  spec.layer_dims.insert(spec.layer_dims.end(), hidden.begin(), hidden.end());
  spec.layer_dims.push_back(1);
  spec.output_activation = OutputActivation::sigmoid;
  return spec;
}

ModelSpec ModelSpec::enhance(int bins, int context, std::vector<int> hidden) {
  ModelSpec spec;
  spec.task = Task::enhance;
  spec.context_frames = context;
  spec.layer_dims.push_back(bins * context);
  spec.layer_dims.insert(spec.layer_dims.end(), hidden.begin(), hidden.end());
  spec.layer_dims.push_back(bins);
  spec.output_activation = OutputActivation::identity;
  return spec;
}

}  // namespace bitwave::nn
