#pragma once

#include <span>

#include "cim/dataset.hpp"
#include "cim/deploy.hpp"
#include "cim/noise.hpp"

namespace cim {

struct TrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 32;
    double lr = 0.05;
    NoiseSpec noise;
    bool quantize = false;  // quantization-aware training
    std::uint64_t seed = 0;
    bool track_accuracy = true;  // per-epoch clean accuracy (skipped in search)
};

struct BatchOutcome {
    double loss = 0.0;
    bool skipped = false;  // non-finite loss; weights untouched
};

/// One uncertainty-aware training batch:
///   (1) keep the original weights W_ori aside,
///   (2) form the deployment view W_ori (+quantization) + N_j,
///   (3) forward/backward at the perturbed point,
///   (4) apply the collected gradients to W_ori:
///       W_new = W_ori - lr * grad L(W_ori + N_j; batch).
/// A non-finite loss skips the batch and reports it; weights stay W_ori.
BatchOutcome noisy_train_batch(Model& m, const Tensor& images, std::span<const int> labels,
                               const TrainConfig& cfg, std::uint64_t noise_index);

struct TrainLog {
    std::vector<double> epoch_loss;       // mean batch loss per epoch
    std::vector<double> epoch_accuracy;   // clean accuracy per epoch
    std::size_t skipped_batches = 0;
    std::size_t total_batches = 0;
    std::uint64_t noise_samples_used = 0;  // strictly increasing counter
};

/// Epoch loop with a seeded shuffle per epoch and one fresh noise sample per
/// batch (indices never repeat within a run). Deterministic under a fixed
/// seed. Per-epoch clean accuracy is measured on `eval_set` when given,
/// otherwise on the training set.
TrainLog train(Model& m, const Dataset& train_set, const TrainConfig& cfg,
               const Dataset* eval_set = nullptr);

}  // namespace cim
