#pragma once

#include <span>
#include <vector>

#include "cim/tensor.hpp"

namespace cim {

/// Scalar loss plus the per-example values it averages.
struct LossValue {
    float scalar = 0.0f;
    std::vector<float> per_sample;
};

/// Shift-invariant exp-normalize computed in double precision.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> softmax(std::span<const float> logits);

/// Index of the maximum element; ties break toward the lowest index.
std::size_t argmax_class(std::span<const float> logits);
std::size_t argmax_class(std::span<const double> logits);

/// Batch-averaged -log softmax probability of the true class.
/// logits: (N, C) or (C) for a single example.
LossValue cross_entropy_loss(const Tensor& logits, std::span<const int> labels);

/// Gradient of cross_entropy_loss with respect to the logits:
/// (softmax - onehot) / N. Same shape as `logits`.
Tensor cross_entropy_grad(const Tensor& logits, std::span<const int> labels);

}  // namespace cim
