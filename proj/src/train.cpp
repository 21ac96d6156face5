#include "cim/train.hpp"

#include <cmath>

#include "cim/errors.hpp"
#include "cim/eval.hpp"
#include "cim/loss.hpp"
#include "cim/rng.hpp"

namespace cim {

namespace {

bool has_quant_specs(const Model& m) {
    for (const auto& l : m.layers) {
        if (l.parameterized() && l.quant) return true;
    }
    return false;
}

}  // namespace

BatchOutcome noisy_train_batch(Model& m, const Tensor& images, std::span<const int> labels,
                               const TrainConfig& cfg, std::uint64_t noise_index) {
    if (labels.empty()) throw data_error("empty training batch");

    // W_ori stays untouched in m.params until the final update.
    const ParamMap deployed = deploy_params(m, cfg.noise, noise_index);

    ForwardOptions opts;
    opts.params_override = &deployed;
    opts.quantize_weights = false;

    ForwardTrace trace;
    Tensor logits;
    LossValue loss;
    try {
        logits = forward(m, images, opts, &trace);
        loss = cross_entropy_loss(logits, labels);
    } catch (const Error& e) {
        if (e.category() == "numeric") return {std::nan(""), true};
        throw;
    }
    if (!std::isfinite(loss.scalar)) return {static_cast<double>(loss.scalar), true};

    const Tensor dlogits = cross_entropy_grad(logits, labels);
    const ParamMap grads = backward(m, trace, dlogits, opts);
    sgd_step(m.params, grads, cfg.lr);
    return {static_cast<double>(loss.scalar), false};
}

TrainLog train(Model& m, const Dataset& train_set, const TrainConfig& cfg,
               const Dataset* eval_set) {
    if (train_set.size() == 0) throw data_error("empty training dataset");
    if (cfg.epochs < 1) throw config_error("epochs must be >= 1");
    if (cfg.batch_size < 1) throw config_error("batch size must be >= 1");
    if (!(cfg.lr > 0.0)) throw config_error("learning rate must be > 0");
    if (cfg.quantize && !has_quant_specs(m)) {
        throw config_error("quantization requested but no layer carries a fixed-point spec");
    }
    m.quantized = cfg.quantize;
    m.validate();

    TrainLog log;
    std::uint64_t noise_counter = 0;
    std::vector<std::size_t> order = iota_indices(train_set.size());
    std::vector<std::size_t> batch_idx;
    std::vector<int> batch_labels;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_key(derive_key(cfg.seed, 0xE90Cull), epoch));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t counted = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            batch_idx.assign(order.begin() + start, order.begin() + end);
            batch_labels.clear();
            for (std::size_t i : batch_idx) batch_labels.push_back(train_set.labels[i]);
            const Tensor images = train_set.gather(batch_idx);

            const BatchOutcome out = noisy_train_batch(m, images, batch_labels, cfg,
                                                       noise_counter++);
            ++log.total_batches;
            if (out.skipped) {
                ++log.skipped_batches;
            } else {
                loss_sum += out.loss;
                ++counted;
            }
        }
        log.epoch_loss.push_back(counted ? loss_sum / static_cast<double>(counted)
                                         : std::nan(""));
        if (cfg.track_accuracy) {
            log.epoch_accuracy.push_back(clean_accuracy(m, eval_set ? *eval_set : train_set));
        }
    }
    log.noise_samples_used = noise_counter;
    return log;
}

}  // namespace cim
