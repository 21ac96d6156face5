#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cim/tensor.hpp"

namespace cim {

/// Image classification dataset: images as (N, C, H, W) scaled to [0,1],
/// integer class labels, and a split tag.
struct Dataset {
    Tensor images;            // (N, C, H, W)
    std::vector<int> labels;  // length N, values < classes
    std::string split;        // "train" or "test"
    std::size_t classes = 10;

    std::size_t size() const noexcept { return labels.size(); }
    std::vector<std::size_t> example_shape() const;  // (C, H, W)

    /// Copy of example i as a (C, H, W) tensor.
    Tensor example(std::size_t i) const;

    /// Copy of the examples at `indices`, batched (n, C, H, W).
    Tensor gather(const std::vector<std::size_t>& indices) const;

    void validate() const;
};

/// Parses the big-endian IDX pair (images magic 0x00000803, labels magic
/// 0x00000801); pixel bytes are divided by 255.
Dataset load_mnist(const std::filesystem::path& images_path,
                   const std::filesystem::path& labels_path);

/// Parses CIFAR-10 binary batches: 3073-byte records, one label byte then
/// 3072 pixel bytes as three 32x32 row-major planes (R, G, B).
Dataset load_cifar10(const std::vector<std::filesystem::path>& batch_paths);

/// Seeded class-stratified sample of n examples; per-class counts differ by
/// at most one; output preserves the source ordering of selected examples.
Dataset subset(const Dataset& d, std::size_t n, std::uint64_t seed);

}  // namespace cim
