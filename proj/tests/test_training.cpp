#include <doctest.h>

#include <cmath>

#include "cim/errors.hpp"
#include "cim/eval.hpp"
#include "cim/loss.hpp"
#include "cim/rng.hpp"
#include "cim/synthetic.hpp"
#include "cim/train.hpp"

using namespace cim;

namespace {

Model small_mlp(std::uint64_t seed) {
    Model m;
    m.input_shape = {1, 28, 28};
    m.classes = 10;
    m.flatten();
    m.dense("fc0", 784, 32);
    m.relu();
    m.dense("fc1", 32, 10);
    m.init_params(seed);
    return m;
}

}  // namespace

TEST_CASE("sigma zero batch equals vanilla SGD bitwise") {
    const Dataset data = make_synthetic_mnist(64, 5, "train");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 32; ++i) idx.push_back(i);
    const Tensor images = data.gather(idx);
    std::vector<int> labels(data.labels.begin(), data.labels.begin() + 32);

    TrainConfig cfg;
    cfg.lr = 0.1;
    cfg.noise = NoiseSpec{0.0, 0.0, 99, false};

    Model noisy = small_mlp(3);
    noisy_train_batch(noisy, images, labels, cfg, 0);

    // vanilla: plain forward/backward/sgd on the same batch
    Model vanilla = small_mlp(3);
    ForwardTrace trace;
    const Tensor logits = forward(vanilla, images, {}, &trace);
    const ParamMap grads = backward(vanilla, trace, cross_entropy_grad(logits, labels));
    sgd_step(vanilla.params, grads, cfg.lr);

    for (const auto& [name, p] : vanilla.params) {
        REQUIRE(noisy.params.at(name).bit_equal(p));
    }
}

TEST_CASE("hand-evaluated squared-loss update: gradient at the perturbed point") {
    // w=1, noise 0.1, L=(w*x - y)^2 with x=1, y=0, lr=0.1:
    // dL/dw at w=1.1 is 2*1.1 = 2.2, so w_new = 1 - 0.22 = 0.78.
    Model m;
    m.input_shape = {1};
    m.classes = 1;
    m.dense("fc0", 1, 1);
    m.params["fc0.weight"][0] = 1.0f;

    ParamMap perturbed = m.params;
    perturbed["fc0.weight"][0] = 1.1f;  // W_ori + forced noise

    ForwardOptions opts;
    opts.params_override = &perturbed;
    ForwardTrace trace;
    const Tensor y = forward(m, Tensor({1}, {1.0f}), opts, &trace);
    CHECK(y[0] == doctest::Approx(1.1f));

    // dL/dy = 2(y - 0)
    const Tensor dlogits({1}, {2.0f * y[0]});
    const ParamMap grads = backward(m, trace, dlogits, opts);
    CHECK(grads.at("fc0.weight")[0] == doctest::Approx(2.2f));

    sgd_step(m.params, grads, 0.1);
    CHECK(m.params["fc0.weight"][0] == doctest::Approx(0.78f));
}

TEST_CASE("weight-restoration oracle: update applies to originals, gradient from perturbed") {
    const Dataset data = make_synthetic_mnist(48, 6, "train");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 16; ++i) idx.push_back(i);
    const Tensor images = data.gather(idx);
    std::vector<int> labels(data.labels.begin(), data.labels.begin() + 16);

    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.noise = NoiseSpec{0.0, 0.04, 1234, false};

    Model m = small_mlp(11);
    const ParamMap w_ori = m.params;
    const std::uint64_t noise_index = 7;
    noisy_train_batch(m, images, labels, cfg, noise_index);

    // Independent recomputation of the gradient at W_ori + N_j.
    Model probe = small_mlp(11);
    REQUIRE(probe.params.at("fc0.weight").bit_equal(w_ori.at("fc0.weight")));
    const ParamMap deployed = deploy_params(probe, cfg.noise, noise_index);
    ForwardOptions opts;
    opts.params_override = &deployed;
    opts.quantize_weights = false;
    ForwardTrace trace;
    const Tensor logits = forward(probe, images, opts, &trace);
    const ParamMap grads = backward(probe, trace, cross_entropy_grad(logits, labels), opts);

    for (const auto& [name, w_new] : m.params) {
        const Tensor& ori = w_ori.at(name);
        const Tensor& g = grads.at(name);
        for (std::size_t i = 0; i < w_new.size(); ++i) {
            const float expect = static_cast<float>(
                static_cast<double>(ori[i]) - cfg.lr * static_cast<double>(g[i]));
            REQUIRE(w_new[i] == expect);
        }
    }
}

TEST_CASE("non-finite loss skips the batch and leaves weights untouched") {
    Model m;
    m.input_shape = {2};
    m.classes = 2;
    m.dense("fc0", 2, 2);
    m.params["fc0.weight"][0] = 3.0e38f;
    m.params["fc0.weight"][1] = 3.0e38f;
    const ParamMap before = m.params;

    TrainConfig cfg;
    cfg.lr = 0.1;
    cfg.noise = NoiseSpec{0.0, 0.0, 0, false};
    const Tensor images({1, 2}, {10.0f, 10.0f});
    const std::vector<int> labels{0};
    const BatchOutcome out = noisy_train_batch(m, images, labels, cfg, 0);
    CHECK(out.skipped);
    CHECK(m.params.at("fc0.weight").bit_equal(before.at("fc0.weight")));
}

TEST_CASE("train is deterministic and counts noise samples") {
    const Dataset data = make_synthetic_mnist(100, 7, "train");
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 32;
    cfg.lr = 0.05;
    cfg.noise = NoiseSpec{0.0, 0.04, 5, false};
    cfg.seed = 77;
    cfg.track_accuracy = false;

    Model a = small_mlp(1);
    const TrainLog log_a = train(a, data, cfg);
    Model b = small_mlp(1);
    const TrainLog log_b = train(b, data, cfg);

    for (const auto& [name, p] : a.params) REQUIRE(b.params.at(name).bit_equal(p));
    CHECK(log_a.epoch_loss == log_b.epoch_loss);
    // ceil(100/32) = 4 batches per epoch, 2 epochs
    CHECK(log_a.total_batches == 8);
    CHECK(log_a.noise_samples_used == 8);
    CHECK(log_a.skipped_batches == 0);
}

TEST_CASE("sigma zero training run equals a hand-rolled vanilla loop bitwise") {
    const Dataset data = make_synthetic_mnist(96, 9, "train");
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 24;
    cfg.lr = 0.05;
    cfg.seed = 3;
    cfg.track_accuracy = false;
    cfg.noise = NoiseSpec{0.0, 0.0, 1, false};

    Model a = small_mlp(2);
    train(a, data, cfg);

    Model b = small_mlp(2);
    std::vector<std::size_t> order = iota_indices(data.size());
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_key(derive_key(cfg.seed, 0xE90Cull), epoch));
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<std::size_t> idx(order.begin() + start, order.begin() + end);
            std::vector<int> labels;
            for (std::size_t i : idx) labels.push_back(data.labels[i]);
            const Tensor images = data.gather(idx);
            ForwardTrace trace;
            const Tensor logits = forward(b, images, {}, &trace);
            const ParamMap grads = backward(b, trace, cross_entropy_grad(logits, labels));
            sgd_step(b.params, grads, cfg.lr);
        }
    }
    for (const auto& [name, p] : a.params) REQUIRE(b.params.at(name).bit_equal(p));
}

TEST_CASE("weights move less than lr times the max gradient per step") {
    const Dataset data = make_synthetic_mnist(32, 13, "train");
    std::vector<std::size_t> idx = iota_indices(32);
    const Tensor images = data.gather(idx);

    Model m = small_mlp(21);
    const ParamMap before = m.params;
    TrainConfig cfg;
    cfg.lr = 1e-4;
    cfg.noise = NoiseSpec{0.0, 0.0, 0, false};
    noisy_train_batch(m, images, data.labels, cfg, 0);

    Model probe = small_mlp(21);
    ForwardTrace trace;
    const Tensor logits = forward(probe, images, {}, &trace);
    const ParamMap grads = backward(probe, trace, cross_entropy_grad(logits, data.labels));
    for (const auto& [name, p] : m.params) {
        float g_max = 0.0f;
        for (float g : grads.at(name).data()) g_max = std::max(g_max, std::abs(g));
        for (std::size_t i = 0; i < p.size(); ++i) {
            // one float ulp of the parameter covers the storage rounding
            const float cushion = std::abs(before.at(name)[i]) * 1.2e-7f + 1e-12f;
            REQUIRE(std::abs(p[i] - before.at(name)[i]) <=
                    static_cast<float>(cfg.lr) * g_max + cushion);
        }
    }
}

TEST_CASE("training loss decreases across epochs in most seeds") {
    const Dataset data = make_synthetic_mnist(600, 41, "train");
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Model m = small_mlp(derive_key(100, seed));
        TrainConfig cfg;
        cfg.epochs = 3;
        cfg.batch_size = 32;
        cfg.lr = 0.05;
        cfg.noise = NoiseSpec{0.0, 0.04, derive_key(200, seed), false};
        cfg.seed = derive_key(300, seed);
        cfg.track_accuracy = false;
        const TrainLog log = train(m, data, cfg);
        if (log.epoch_loss[1] < log.epoch_loss[0] && log.epoch_loss[2] < log.epoch_loss[1]) {
            ++ok;
        }
    }
    CHECK(ok >= 4);
}

TEST_CASE("no residual noise after a batch: deployment at sigma zero uses W_new") {
    const Dataset data = make_synthetic_mnist(32, 15, "train");
    std::vector<std::size_t> idx = iota_indices(32);
    const Tensor images = data.gather(idx);

    Model m = small_mlp(33);
    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.noise = NoiseSpec{0.0, 0.04, 88, false};
    noisy_train_batch(m, images, data.labels, cfg, 0);

    const ParamMap after = m.params;
    // an extra perturb/discard cycle must not disturb stored weights
    const ParamMap scratch = perturb(m.params, cfg.noise, 123);
    (void)scratch;
    for (const auto& [name, p] : m.params) REQUIRE(after.at(name).bit_equal(p));

    // sigma=0 deployment equals the stored weights bitwise
    const ParamMap dep = deploy_params(m, NoiseSpec{0.0, 0.0, 0, false}, 0);
    for (const auto& [name, p] : m.params) REQUIRE(dep.at(name).bit_equal(p));
}

TEST_CASE("quantization-aware deployment composes quantize(W_ori) + noise") {
    Model m;
    m.input_shape = {2};
    m.classes = 2;
    m.dense("fc0", 2, 2, QuantSpec{1, 2});  // step 0.25
    m.params["fc0.weight"] = Tensor({2, 2}, {0.3f, -0.6f, 0.9f, 0.1f});
    m.quantized = true;

    const NoiseSpec spec{0.0, 0.02, 55, false};
    const ParamMap dep = deploy_params(m, spec, 4);
    const Tensor wq = quantize_tensor(m.params.at("fc0.weight"), QuantSpec{1, 2});
    const Tensor noise = sample_noise({2, 2}, spec, 4, fnv1a64("fc0.weight", 10));
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(dep.at("fc0.weight")[i] == wq[i] + noise[i]);
    }
}
