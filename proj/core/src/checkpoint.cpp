// Copyright 2026 The cfd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfd/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>

#include "cfd/error.hpp"
#include "cfd/rng.hpp"

namespace cfd {

namespace {

constexpr char kMagic[4] = {'F', 'C', 'K', 'P'};

class Writer {
 public:
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    require(pos_ + n <= bytes_.size(), ErrorCode::kTruncated, "checkpoint truncated");
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const FamParams& params) {
  const FamConfig& c = params.config;
  nlohmann::ordered_json meta;
  meta["n_classes"] = params.n_classes;
  meta["in_dim"] = c.in_dim;
  meta["out_dim"] = c.out_dim;
  meta["n_layers_used"] = c.n_layers_used;
  meta["tau"] = c.tau;
  meta["attention_mode"] = std::string(to_string(c.attention_mode));
  meta["per_layer_projection"] = c.per_layer_projection;
  const std::string meta_text = meta.dump();

  Writer w;
  w.raw(std::string_view(kMagic, 4));
  w.u16(kCheckpointVersion);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(meta_text.size()));
  w.raw(meta_text);
  const auto tensors = params.tensors();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const ParamTensor* t : tensors) {
    w.u32(static_cast<std::uint32_t>(t->name.size()));
    w.raw(t->name);
    w.u32(static_cast<std::uint32_t>(t->rows()));
    w.u32(static_cast<std::uint32_t>(t->cols()));
    for (double v : t->value.flat()) w.f64(v);
  }
  return w.take();
}

FamParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  require(bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0, ErrorCode::kBadMagic,
          "missing FCKP magic");
  r.str(4);
  const std::uint16_t version = r.u16();
  require(version == kCheckpointVersion, ErrorCode::kUnsupportedVersion,
          "unsupported checkpoint version " + std::to_string(version));
  r.u16();
  const std::string meta_text = r.str(r.u32());
  FamConfig cfg;
  std::size_t n_classes = 0;
  try {
    const auto meta = nlohmann::json::parse(meta_text);
    n_classes = meta.at("n_classes").get<std::size_t>();
    cfg.in_dim = meta.at("in_dim").get<std::size_t>();
    cfg.out_dim = meta.at("out_dim").get<std::size_t>();
    cfg.n_layers_used = meta.at("n_layers_used").get<std::size_t>();
    cfg.tau = meta.at("tau").get<double>();
    cfg.attention_mode = parse_attention_mode(meta.at("attention_mode").get<std::string>());
    cfg.per_layer_projection = meta.at("per_layer_projection").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("checkpoint metadata: ") + e.what());
  }
  Rng unused(0);
  FamParams params = FamParams::init(cfg, n_classes, unused);
  auto tensors = params.tensors();
  const std::uint32_t count = r.u32();
  require(count == tensors.size(), ErrorCode::kShapeMismatch,
          "checkpoint holds " + std::to_string(count) + " tensors, model expects " +
              std::to_string(tensors.size()));
  for (ParamTensor* t : tensors) {
    const std::string name = r.str(r.u32());
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    require(name == t->name && rows == t->rows() && cols == t->cols(), ErrorCode::kShapeMismatch,
            "checkpoint tensor '" + name + "' does not match model tensor '" + t->name + "'");
    for (double& v : t->value.flat()) v = r.f64();
  }
  require(r.done(), ErrorCode::kSizeMismatch, "trailing bytes after checkpoint tensors");
  return params;
}

void save_checkpoint(const FamParams& params, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + path.string());
}

FamParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace cfd
