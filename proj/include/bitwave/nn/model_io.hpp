// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Model file:
//
//   "BWNN"  u16 version  u32 crc32(payload)  payload
//
//   payload = u64 header length, JSON header (spec, training log, activation
//   scales, normalization), f32 weight (out x in, row-major) and bias tensors
//   in layer order, u32 count of pre-packed quantized weight tensors followed
//   by the tensors in the write_quantized() layout.
//
// All integers and floats are little-endian.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bitwave/nn/model.hpp"
#include "json.hpp"

namespace bitwave::nn {

inline constexpr std::uint16_t kModelFormatVersion = 1;

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Normalization& norm);
Normalization normalization_from_json(const nlohmann::json& j);

std::string serialize_model(const Model& model);
/// Throws DataError on bad magic, version mismatch, checksum mismatch or
/// truncation. Never returns a partially read model.
Model deserialize_model(std::string_view bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace bitwave::nn
