#pragma once

#include <filesystem>

#include "cim/dataset.hpp"

namespace cim {

// Seeded synthetic image-classification sets for offline smoke-testing: each
// class is a fixed arrangement of Gaussian intensity bumps, samples add
// per-example jitter and pixel noise. The writers emit bit-exact MNIST IDX /
// CIFAR-10 binary files so the real loaders parse them.

/// 10-class grayscale 28x28 set in MNIST layout.
Dataset make_synthetic_mnist(std::size_t count, std::uint64_t seed, const std::string& split);

/// 10-class RGB 32x32 set in CIFAR-10 layout.
Dataset make_synthetic_cifar(std::size_t count, std::uint64_t seed, const std::string& split);

/// Writes the dataset as an IDX image/label file pair.
void write_idx_pair(const Dataset& d, const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);

/// Writes the dataset as one CIFAR-10 binary batch file.
void write_cifar_batch(const Dataset& d, const std::filesystem::path& path);

}  // namespace cim
