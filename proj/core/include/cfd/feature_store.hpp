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

#ifndef CFD_FEATURE_STORE_HPP_
#define CFD_FEATURE_STORE_HPP_

// Datasets of pooled per-layer encoder features and the FEATSET file format.
//
// FEATSET (all integers little-endian):
//   0..3    magic "FSET"
//   4..5    version u16 = 1
//   6..7    flags u16, bit 0 = labels present
//   8..11   n_records u32
//   12..15  n_layers u32
//   16..19  dim u32
//   20..23  n_classes u32
//   24..63  zero
//   payload n_records * n_layers * dim float32, record-major, then layer, then dim
//   labels  n_records int32 (-1 = absent), only when flag bit 0 is set

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfd {

inline constexpr std::size_t kFeatsetHeaderBytes = 64;
inline constexpr std::uint16_t kFeatsetVersion = 1;

enum class DatasetRole { kSourceTrain, kSourceValid, kTargetUnlabeled, kTargetTest };

std::string_view to_string(DatasetRole role);
std::optional<DatasetRole> parse_role(std::string_view name);
bool role_requires_labels(DatasetRole role);

// Read-only view of one example: row l of `layer(l)` is the pooled feature of
// the l-th exported encoder layer, lowest first.
struct FeatureRecord {
  std::size_t id = 0;
  std::size_t origin_id = 0;
  std::size_t n_layers = 0;
  std::size_t dim = 0;
  std::span<const float> values;
  std::optional<int> label;

  std::span<const float> layer(std::size_t l) const { return values.subspan(l * dim, dim); }
  double at(std::size_t l, std::size_t d) const { return values[l * dim + d]; }
};

class Dataset {
 public:
  Dataset() = default;

  // Validates every invariant: matching payload size, finite values, labels
  // in [-1, n_classes), and the role's labelling requirement. `labels` empty
  // means the dataset carries no labels. `origin_ids` defaults to 0..n-1.
  static Dataset create(std::size_t n_layers, std::size_t dim, std::size_t n_classes,
                        std::vector<float> values, std::vector<std::int32_t> labels,
                        DatasetRole role, std::string domain_tag,
                        std::vector<std::uint32_t> origin_ids = {});

  std::size_t size() const { return n_records_; }
  bool empty() const { return n_records_ == 0; }
  std::size_t n_layers() const { return n_layers_; }
  std::size_t dim() const { return dim_; }
  std::size_t n_classes() const { return n_classes_; }
  bool has_labels() const { return !labels_.empty(); }
  DatasetRole role() const { return role_; }
  const std::string& domain_tag() const { return domain_tag_; }

  FeatureRecord record(std::size_t i) const;
  FeatureRecord operator[](std::size_t i) const { return record(i); }

  std::span<const float> values() const { return values_; }
  std::span<const std::int32_t> labels() const { return labels_; }
  std::span<const std::uint32_t> origin_ids() const { return origin_ids_; }

  // Same records under a different role / domain tag (re-validated). Moving to
  // kTargetUnlabeled drops the labels.
  Dataset with_role(DatasetRole role, std::string domain_tag) const;
  Dataset without_labels() const;

  // Structural equality with bit-exact payload comparison.
  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::size_t n_records_ = 0;
  std::size_t n_layers_ = 0;
  std::size_t dim_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<float> values_;
  std::vector<std::int32_t> labels_;
  std::vector<std::uint32_t> origin_ids_;
  DatasetRole role_ = DatasetRole::kSourceTrain;
  std::string domain_tag_;
};

std::vector<std::uint8_t> encode_featset(const Dataset& dataset);

// Role and domain tag are not part of the file. Labelled files load as
// kSourceTrain, unlabelled ones as kTargetUnlabeled.
Dataset decode_featset(std::span<const std::uint8_t> bytes);

void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path, DatasetRole role,
                     std::string domain_tag);

// Records `ids` in the given order, renumbered 0..k-1. Origin ids carry over.
Dataset subset(const Dataset& dataset, std::span<const std::size_t> ids);

// JSON document binding FEATSET files to roles:
//   {"version": 1,
//    "roles": {"source_train": {"path": "...", "domain": "..."}, ...}}
// Relative paths resolve against the manifest's directory.
struct Manifest {
  struct Entry {
    std::filesystem::path path;
    std::string domain;
  };

  std::map<DatasetRole, Entry> roles;
  std::filesystem::path base_dir;

  static Manifest read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
  std::filesystem::path resolve(DatasetRole role) const;
};

struct ExperimentData {
  Dataset source_train;
  Dataset source_valid;
  Dataset target_unlabeled;
  std::optional<Dataset> target_test;
};

// Loads every role in the manifest. source_train, source_valid and
// target_unlabeled are required; shapes must agree across files.
ExperimentData load_experiment(const Manifest& manifest);

void check_compatible(const ExperimentData& data);

}  // namespace cfd

#endif  // CFD_FEATURE_STORE_HPP_
