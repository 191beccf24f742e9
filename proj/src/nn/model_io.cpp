// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/nn/model_io.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "bitwave/core/error.hpp"
#include "core/byteio.hpp"

namespace bitwave::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'B', 'W', 'N', 'N'};

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset), static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string output_name(OutputActivation a) { return a == OutputActivation::sigmoid ? "sigmoid" : "identity"; }

OutputActivation parse_output(const std::string& s) {
  if (s == "sigmoid") return OutputActivation::sigmoid;
  if (s == "identity") return OutputActivation::identity;
  throw DataError("unknown output activation '" + s + "'");
}

}  // namespace

json to_json(const ModelSpec& spec) {
  return json{{"task", to_string(spec.task)},
              {"layer_dims", spec.layer_dims},
              {"hidden_activation", "relu"},
              {"output_activation", output_name(spec.output_activation)},
              {"weight_bits", spec.weight_bits},
              {"neuron_bits", spec.neuron_bits},
              {"context_frames", spec.context_frames},
              {"quantize_input", spec.quantize_input}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.task = parse_task(j.at("task").get<std::string>());
  spec.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  spec.output_activation = parse_output(j.at("output_activation").get<std::string>());
  spec.weight_bits = j.at("weight_bits").get<int>();
  spec.neuron_bits = j.at("neuron_bits").get<int>();
  spec.context_frames = j.at("context_frames").get<int>();
  spec.quantize_input = j.at("quantize_input").get<bool>();
  spec.validate();
  return spec;
}

json to_json(const Normalization& norm) { return json{{"mean", norm.mean}, {"stddev", norm.stddev}}; }

Normalization normalization_from_json(const json& j) {
  Normalization norm;
  norm.mean = j.at("mean").get<std::vector<float>>();
  norm.stddev = j.at("stddev").get<std::vector<float>>();
  if (norm.mean.size() != norm.stddev.size()) throw DataError("normalization mean/stddev length mismatch");
  return norm;
}

std::string serialize_model(const Model& model) {
  model.spec.validate();
  json header;
  header["spec"] = to_json(model.spec);
  header["training"] = {{"epochs", model.log.epochs},
                        {"best_epoch", model.log.best_epoch},
                        {"seed", model.log.seed},
                        {"train_loss", model.log.train_loss},
                        {"valid_loss", model.log.valid_loss}};
  header["activation_scales"] = model.activation_scales;
  header["input_norm"] = to_json(model.input_norm);
  header["target_norm"] = to_json(model.target_norm);
  const bool packed = model.spec.quantized_weights() && model.quantized_weights.size() == model.spec.layer_count();
  header["quantized_weights"] = packed ? model.quantized_weights.size() : 0;
  const std::string header_text = header.dump();

  std::ostringstream payload;
  io::put_le<std::uint64_t>(payload, header_text.size());
  payload.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (std::size_t l = 0; l < model.spec.layer_count(); ++l) {
    const auto& w = model.weights[l];
    for (Index i = 0; i < w.size(); ++i) io::put_f32(payload, w.data()[i]);
    const auto& b = model.biases[l];
    for (Index i = 0; i < b.size(); ++i) io::put_f32(payload, b[i]);
  }
  io::put_le<std::uint32_t>(payload, packed ? static_cast<std::uint32_t>(model.quantized_weights.size()) : 0u);
  if (packed)
    for (const auto& q : model.quantized_weights) write_quantized(payload, q);
  const std::string body = payload.str();

  std::ostringstream out;
  out.write(kMagic, 4);
  io::put_le<std::uint16_t>(out, kModelFormatVersion);
  io::put_le<std::uint32_t>(out, crc32_of(body));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  return out.str();
}

Model deserialize_model(std::string_view bytes) {
  if (bytes.size() < 10 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) throw DataError("not a model file");
  std::istringstream head(std::string(bytes.substr(4, 6)));
  const auto version = io::get_le<std::uint16_t>(head);
  if (version != kModelFormatVersion)
    throw DataError("model format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  const auto expected = io::get_le<std::uint32_t>(head);
  const std::string_view body = bytes.substr(10);
  if (crc32_of(body) != expected) throw DataError("model checksum mismatch (corrupt or truncated file)");

  std::istringstream in{std::string(body)};
  Model model;
  try {
    const auto header_len = io::get_le<std::uint64_t>(in);
    if (header_len > body.size()) throw DataError("model header length out of range");
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), static_cast<std::streamsize>(header_len))) throw DataError("truncated header");
    const json header = json::parse(header_text);
    model.spec = spec_from_json(header.at("spec"));
    const json& t = header.at("training");
    model.log.epochs = t.at("epochs").get<int>();
    model.log.best_epoch = t.at("best_epoch").get<int>();
    model.log.seed = t.at("seed").get<std::uint64_t>();
    model.log.train_loss = t.at("train_loss").get<std::vector<double>>();
    model.log.valid_loss = t.at("valid_loss").get<std::vector<double>>();
    model.activation_scales = header.at("activation_scales").get<std::vector<std::vector<float>>>();
    model.input_norm = normalization_from_json(header.at("input_norm"));
    model.target_norm = normalization_from_json(header.at("target_norm"));

    for (std::size_t l = 0; l < model.spec.layer_count(); ++l) {
      RowMatrix<float> w(model.spec.layer_dims[l + 1], model.spec.layer_dims[l]);
      for (Index i = 0; i < w.size(); ++i) w.data()[i] = io::get_f32(in);
      Vector<float> b(model.spec.layer_dims[l + 1]);
      for (Index i = 0; i < b.size(); ++i) b[i] = io::get_f32(in);
      model.weights.push_back(std::move(w));
      model.biases.push_back(std::move(b));
    }
    const auto packed = io::get_le<std::uint32_t>(in);
    if (packed != 0 && packed != model.spec.layer_count()) throw DataError("unexpected quantized tensor count");
    for (std::uint32_t l = 0; l < packed; ++l) {
      auto q = read_quantized<float>(in);
      if (q.rows != static_cast<std::size_t>(model.weights[l].rows()) ||
          q.cols != static_cast<std::size_t>(model.weights[l].cols()) || q.bits() != model.spec.weight_bits)
        throw DataError("quantized tensor shape does not match layer " + std::to_string(l));
      model.quantized_weights.push_back(std::move(q));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes after model payload");
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid model: ") + e.what());
  }

  if (model.quantized_weights.empty()) {
    prepare_inference(model);
  } else {
    for (const auto& q : model.quantized_weights) {
      model.packed_weights.emplace_back(q);
      model.dequantized_weights.push_back(dequantize(q));
    }
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace bitwave::nn
