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

#include "cfd/feature_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>

#include "cfd/error.hpp"

namespace cfd {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'E', 'T'};
constexpr std::uint16_t kFlagLabels = 1;

void put_u16(std::vector<std::uint8_t>& out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<std::uint8_t>(v);
  out[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kOverflow, std::string(what) + " exceeds the FEATSET u32 limit");
  }
  return static_cast<std::uint32_t>(v);
}

// n * a * b without wrap-around.
std::size_t checked_product(std::size_t n, std::size_t a, std::size_t b) {
  const std::size_t max = std::numeric_limits<std::size_t>::max() / 8;
  if (a != 0 && n > max / a) fail(ErrorCode::kOverflow, "feature payload size overflows");
  const std::size_t na = n * a;
  if (b != 0 && na > max / b) fail(ErrorCode::kOverflow, "feature payload size overflows");
  return na * b;
}

}  // namespace

std::string_view to_string(DatasetRole role) {
  switch (role) {
    case DatasetRole::kSourceTrain: return "source_train";
    case DatasetRole::kSourceValid: return "source_valid";
    case DatasetRole::kTargetUnlabeled: return "target_unlabeled";
    case DatasetRole::kTargetTest: return "target_test";
  }
  return "unknown";
}

std::optional<DatasetRole> parse_role(std::string_view name) {
  for (DatasetRole r : {DatasetRole::kSourceTrain, DatasetRole::kSourceValid,
                        DatasetRole::kTargetUnlabeled, DatasetRole::kTargetTest}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

bool role_requires_labels(DatasetRole role) { return role != DatasetRole::kTargetUnlabeled; }

Dataset Dataset::create(std::size_t n_layers, std::size_t dim, std::size_t n_classes,
                        std::vector<float> values, std::vector<std::int32_t> labels,
                        DatasetRole role, std::string domain_tag,
                        std::vector<std::uint32_t> origin_ids) {
  require(n_layers > 0 && dim > 0, ErrorCode::kShapeMismatch,
          "dataset needs n_layers > 0 and dim > 0");
  const std::size_t stride = checked_product(1, n_layers, dim);
  require(values.size() % stride == 0, ErrorCode::kShapeMismatch,
          "payload length is not a multiple of n_layers * dim");
  const std::size_t n = values.size() / stride;
  checked_u32(n, "record count");
  checked_u32(n_layers, "n_layers");
  checked_u32(dim, "dim");
  checked_u32(n_classes, "n_classes");

  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteFeatureError(i / stride, "non-finite feature in record " +
                                                  std::to_string(i / stride));
    }
  }
  if (!labels.empty()) {
    require(labels.size() == n, ErrorCode::kSizeMismatch, "label count differs from record count");
    for (std::size_t i = 0; i < n; ++i) {
      const std::int32_t y = labels[i];
      if (y < -1 || (y >= 0 && static_cast<std::size_t>(y) >= n_classes)) {
        fail(ErrorCode::kBadLabel, "record " + std::to_string(i) + " has label " +
                                       std::to_string(y) + " outside [0, " +
                                       std::to_string(n_classes) + ")");
      }
    }
  }
  if (role_requires_labels(role) && n > 0) {
    bool complete = !labels.empty();
    for (std::int32_t y : labels) complete = complete && y >= 0;
    require(complete, ErrorCode::kBadLabel,
            std::string("role ") + std::string(to_string(role)) + " requires every label");
  }
  if (origin_ids.empty()) {
    origin_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) origin_ids[i] = static_cast<std::uint32_t>(i);
  }
  require(origin_ids.size() == n, ErrorCode::kSizeMismatch, "origin id count differs");

  Dataset d;
  d.n_records_ = n;
  d.n_layers_ = n_layers;
  d.dim_ = dim;
  d.n_classes_ = n_classes;
  d.values_ = std::move(values);
  d.labels_ = std::move(labels);
  d.origin_ids_ = std::move(origin_ids);
  d.role_ = role;
  d.domain_tag_ = std::move(domain_tag);
  return d;
}

FeatureRecord Dataset::record(std::size_t i) const {
  require(i < n_records_, ErrorCode::kInvalidArgument,
          "record index " + std::to_string(i) + " out of range");
  FeatureRecord r;
  r.id = i;
  r.origin_id = origin_ids_[i];
  r.n_layers = n_layers_;
  r.dim = dim_;
  r.values = std::span<const float>(values_).subspan(i * n_layers_ * dim_, n_layers_ * dim_);
  if (!labels_.empty() && labels_[i] >= 0) r.label = labels_[i];
  return r;
}

Dataset Dataset::with_role(DatasetRole role, std::string domain_tag) const {
  if (role == DatasetRole::kTargetUnlabeled) {
    return create(n_layers_, dim_, n_classes_, values_, {}, role, std::move(domain_tag),
                  origin_ids_);
  }
  return create(n_layers_, dim_, n_classes_, values_, labels_, role, std::move(domain_tag),
                origin_ids_);
}

Dataset Dataset::without_labels() const {
  return with_role(DatasetRole::kTargetUnlabeled, domain_tag_);
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.n_records_ == b.n_records_ && a.n_layers_ == b.n_layers_ && a.dim_ == b.dim_ &&
         a.n_classes_ == b.n_classes_ && a.labels_ == b.labels_ && a.role_ == b.role_ &&
         a.domain_tag_ == b.domain_tag_ && a.origin_ids_ == b.origin_ids_ &&
         a.values_.size() == b.values_.size() &&
         (a.values_.empty() ||
          std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(float)) == 0);
}

std::vector<std::uint8_t> encode_featset(const Dataset& dataset) {
  const std::size_t n = dataset.size();
  const std::size_t count = checked_product(n, dataset.n_layers(), dataset.dim());
  const std::size_t label_bytes = dataset.has_labels() ? n * 4 : 0;
  std::vector<std::uint8_t> out(kFeatsetHeaderBytes + count * 4 + label_bytes, 0);
  std::memcpy(out.data(), kMagic, 4);
  put_u16(out, 4, kFeatsetVersion);
  put_u16(out, 6, dataset.has_labels() ? kFlagLabels : 0);
  put_u32(out, 8, checked_u32(n, "record count"));
  put_u32(out, 12, checked_u32(dataset.n_layers(), "n_layers"));
  put_u32(out, 16, checked_u32(dataset.dim(), "dim"));
  put_u32(out, 20, checked_u32(dataset.n_classes(), "n_classes"));
  std::size_t at = kFeatsetHeaderBytes;
  for (float v : dataset.values()) {
    put_u32(out, at, std::bit_cast<std::uint32_t>(v));
    at += 4;
  }
  for (std::int32_t y : dataset.labels()) {
    put_u32(out, at, static_cast<std::uint32_t>(y));
    at += 4;
  }
  return out;
}

Dataset decode_featset(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= kFeatsetHeaderBytes, ErrorCode::kTruncated,
          "file shorter than the 64-byte FEATSET header");
  require(std::memcmp(bytes.data(), kMagic, 4) == 0, ErrorCode::kBadMagic,
          "missing FSET magic");
  const std::uint16_t version = get_u16(bytes, 4);
  require(version == kFeatsetVersion, ErrorCode::kUnsupportedVersion,
          "unsupported FEATSET version " + std::to_string(version));
  const std::uint16_t flags = get_u16(bytes, 6);
  require((flags & ~kFlagLabels) == 0, ErrorCode::kUnsupportedVersion,
          "unknown FEATSET flags " + std::to_string(flags));
  const bool has_labels = (flags & kFlagLabels) != 0;
  const std::size_t n = get_u32(bytes, 8);
  const std::size_t n_layers = get_u32(bytes, 12);
  const std::size_t dim = get_u32(bytes, 16);
  const std::size_t n_classes = get_u32(bytes, 20);

  const std::size_t count = checked_product(n, n_layers, dim);
  const std::size_t expected = kFeatsetHeaderBytes + count * 4 + (has_labels ? n * 4 : 0);
  require(bytes.size() >= expected, ErrorCode::kTruncated,
          "payload truncated: expected " + std::to_string(expected) + " bytes, found " +
              std::to_string(bytes.size()));
  require(bytes.size() == expected, ErrorCode::kSizeMismatch,
          "declared record count disagrees with payload length (" +
              std::to_string(bytes.size() - expected) + " trailing bytes)");

  std::vector<float> values(count);
  std::size_t at = kFeatsetHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, at += 4) {
    values[i] = std::bit_cast<float>(get_u32(bytes, at));
  }
  std::vector<std::int32_t> labels;
  if (has_labels) {
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i, at += 4) {
      labels[i] = static_cast<std::int32_t>(get_u32(bytes, at));
    }
  }
  const DatasetRole role = has_labels ? DatasetRole::kSourceTrain : DatasetRole::kTargetUnlabeled;
  if (has_labels) {
    bool complete = true;
    for (std::int32_t y : labels) complete = complete && y >= 0;
    // Partially labelled files are legal; they just cannot carry a labelled role.
    if (!complete) {
      return Dataset::create(n_layers, dim, n_classes, std::move(values), std::move(labels),
                             DatasetRole::kTargetUnlabeled, "");
    }
  }
  return Dataset::create(n_layers, dim, n_classes, std::move(values), std::move(labels), role,
                         "");
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  const auto bytes = encode_featset(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_featset(bytes);
}

Dataset load_dataset(const std::filesystem::path& path, DatasetRole role,
                     std::string domain_tag) {
  return load_dataset(path).with_role(role, std::move(domain_tag));
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> ids) {
  const std::size_t stride = dataset.n_layers() * dataset.dim();
  std::set<std::size_t> seen;
  std::vector<float> values;
  values.reserve(ids.size() * stride);
  std::vector<std::int32_t> labels;
  std::vector<std::uint32_t> origin;
  const auto src = dataset.values();
  for (std::size_t id : ids) {
    require(id < dataset.size(), ErrorCode::kInvalidArgument,
            "subset: id " + std::to_string(id) + " out of range");
    require(seen.insert(id).second, ErrorCode::kInvalidArgument,
            "subset: duplicate id " + std::to_string(id));
    values.insert(values.end(), src.begin() + static_cast<std::ptrdiff_t>(id * stride),
                  src.begin() + static_cast<std::ptrdiff_t>((id + 1) * stride));
    if (dataset.has_labels()) labels.push_back(dataset.labels()[id]);
    origin.push_back(dataset.origin_ids()[id]);
  }
  return Dataset::create(dataset.n_layers(), dataset.dim(), dataset.n_classes(),
                         std::move(values), std::move(labels), dataset.role(),
                         dataset.domain_tag(), std::move(origin));
}

Manifest Manifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, "manifest " + path.string() + ": " + e.what());
  }
  Manifest m;
  m.base_dir = path.parent_path();
  try {
    if (doc.contains("version") && doc.at("version").get<int>() != 1) {
      fail(ErrorCode::kUnsupportedVersion, "manifest version must be 1");
    }
    for (const auto& [key, entry] : doc.at("roles").items()) {
      const auto role = parse_role(key);
      require(role.has_value(), ErrorCode::kConfig, "manifest: unknown role '" + key + "'");
      Entry e;
      e.path = entry.at("path").get<std::string>();
      e.domain = entry.value("domain", std::string());
      m.roles[*role] = std::move(e);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, "manifest " + path.string() + ": " + e.what());
  }
  return m;
}

void Manifest::write(const std::filesystem::path& path) const {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["roles"] = nlohmann::ordered_json::object();
  for (const auto& [role, entry] : roles) {
    doc["roles"][std::string(to_string(role))] = {{"path", entry.path.generic_string()},
                                                  {"domain", entry.domain}};
  }
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

std::filesystem::path Manifest::resolve(DatasetRole role) const {
  const auto it = roles.find(role);
  require(it != roles.end(), ErrorCode::kMissingRole,
          std::string("manifest lacks role ") + std::string(to_string(role)));
  return it->second.path.is_absolute() ? it->second.path : base_dir / it->second.path;
}

ExperimentData load_experiment(const Manifest& manifest) {
  auto load = [&](DatasetRole role) {
    const std::filesystem::path path = manifest.resolve(role);
    return load_dataset(path, role, manifest.roles.at(role).domain);
  };
  ExperimentData data;
  data.source_train = load(DatasetRole::kSourceTrain);
  data.source_valid = load(DatasetRole::kSourceValid);
  data.target_unlabeled = load(DatasetRole::kTargetUnlabeled);
  if (manifest.roles.contains(DatasetRole::kTargetTest)) {
    data.target_test = load(DatasetRole::kTargetTest);
  }
  check_compatible(data);
  return data;
}

void check_compatible(const ExperimentData& data) {
  const Dataset& ref = data.source_train;
  auto check = [&](const Dataset& d) {
    require(d.n_layers() == ref.n_layers() && d.dim() == ref.dim() &&
                d.n_classes() == ref.n_classes(),
            ErrorCode::kShapeMismatch,
            std::string(to_string(d.role())) + " shape differs from source_train");
  };
  check(data.source_valid);
  check(data.target_unlabeled);
  if (data.target_test) check(*data.target_test);
  require(!ref.empty(), ErrorCode::kMissingRole, "source_train is empty");
  require(!data.target_unlabeled.empty(), ErrorCode::kMissingRole, "target_unlabeled is empty");
}

}  // namespace cfd
