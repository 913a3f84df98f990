// Copyright 2026 The fedsim Authors.
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

#include <array>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include "fedsim/data.hpp"

namespace fedsim {

namespace {

constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr std::uint32_t kImageMagic = 0x00000803;

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open IDX file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  std::uint32_t u32(const char* field) {
    if (pos_ + 4 > bytes_.size()) {
      throw FormatError(name_ + ": truncated header reading " + field, pos_);
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  void require(std::uint64_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(name_ + ": truncated " + what + " payload, expected " +
                            std::to_string(n) + " bytes, found " +
                            std::to_string(bytes_.size() - pos_),
                        bytes_.size());
    }
  }

  std::size_t pos() const noexcept { return pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const auto image_bytes = read_all(images_path);
  const auto label_bytes = read_all(labels_path);

  Reader images(image_bytes, images_path.string());
  if (const auto magic = images.u32("magic"); magic != kImageMagic) {
    throw FormatError(images_path.string() + ": bad image magic " +
                          std::to_string(magic) + ", expected 0x00000803",
                      0);
  }
  const std::uint32_t n_images = images.u32("item count");
  const std::uint32_t rows = images.u32("row count");
  const std::uint32_t cols = images.u32("column count");

  Reader labels(label_bytes, labels_path.string());
  if (const auto magic = labels.u32("magic"); magic != kLabelMagic) {
    throw FormatError(labels_path.string() + ": bad label magic " +
                          std::to_string(magic) + ", expected 0x00000801",
                      0);
  }
  const std::uint32_t n_labels = labels.u32("item count");
  if (n_images != n_labels) {
    throw FormatError("IDX count mismatch: " + std::to_string(n_images) +
                          " images vs " + std::to_string(n_labels) +
                          " labels",
                      4);
  }

  const std::uint64_t pixels = std::uint64_t(rows) * cols;
  images.require(pixels * n_images, "image");
  labels.require(n_labels, "label");

  Dataset out;
  out.n_features = static_cast<std::size_t>(pixels);
  out.features.resize(static_cast<std::size_t>(pixels * n_images));
  const std::size_t img0 = images.pos();
  for (std::size_t i = 0; i < out.features.size(); ++i) {
    out.features[i] = image_bytes[img0 + i] / 255.0;
  }
  out.labels.resize(n_labels);
  int max_label = -1;
  const std::size_t lab0 = labels.pos();
  for (std::size_t i = 0; i < n_labels; ++i) {
    out.labels[i] = label_bytes[lab0 + i];
    max_label = std::max(max_label, out.labels[i]);
  }
  out.n_classes = static_cast<std::size_t>(max_label + 1);
  return out;
}

}  // namespace fedsim
