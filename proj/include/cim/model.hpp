#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cim/quantize.hpp"
#include "cim/tensor.hpp"

namespace cim {

enum class LayerKind { Conv2d, Dense, ReLU, Sigmoid, Flatten };

std::string layer_kind_name(LayerKind k);

/// One layer of the sequential child-network template.
/// Conv2d is stride 1 with zero "same" padding (odd kernel), so spatial size
/// is preserved until the flatten.
struct LayerDesc {
    LayerKind kind = LayerKind::ReLU;
    std::string name;  // parameterized layers only; unique within the model

    // Conv2d
    std::size_t in_channels = 0, out_channels = 0, kernel = 0;
    // Dense
    std::size_t in_features = 0, out_features = 0;

    // Fixed-point spec for weights and output activations of this layer.
    std::optional<QuantSpec> quant;

    bool parameterized() const noexcept {
        return kind == LayerKind::Conv2d || kind == LayerKind::Dense;
    }
    std::string weight_name() const { return name + ".weight"; }
    std::string bias_name() const { return name + ".bias"; }
};

/// Sequential model: ordered layers plus a named parameter map. Deterministic
/// forward: identical parameters and input give bit-identical output.
struct Model {
    std::vector<std::size_t> input_shape;  // per example: (C,H,W) or (F)
    std::size_t classes = 0;
    std::vector<LayerDesc> layers;
    ParamMap params;
    bool quantized = false;  // apply per-layer QuantSpecs on the forward path

    Model& conv2d(const std::string& name, std::size_t in_ch, std::size_t out_ch,
                  std::size_t kernel, std::optional<QuantSpec> q = std::nullopt);
    Model& dense(const std::string& name, std::size_t in_f, std::size_t out_f,
                 std::optional<QuantSpec> q = std::nullopt);
    Model& relu();
    Model& sigmoid();
    Model& flatten();

    /// Seeded uniform init in +-sqrt(6 / (fan_in + fan_out)); biases zero.
    void init_params(std::uint64_t seed);

    /// Shape produced for a single example; validates layer compatibility.
    std::vector<std::size_t> output_shape() const;

    void validate() const;
};

/// Forward-pass configuration. `params_override` substitutes effective weights
/// (e.g. quantized-then-perturbed deployment weights); when it is set the
/// weight-quantization step is normally disabled because the override already
/// bakes it in.
struct ForwardOptions {
    const ParamMap* params_override = nullptr;
    bool quantize_weights = true;
    bool quantize_activations = true;
};

/// Activation record from one forward pass, consumed by backward().
/// activations[0] is the batched input; activations[i+1] is the output of
/// layer i exactly as the next layer consumed it.
struct ForwardTrace {
    std::vector<Tensor> activations;
    bool had_batch_dim = true;
};

/// Runs the model on `input` (single example or batch-first) and returns the
/// pre-softmax logits. No parameter is mutated. Shape errors name the layer.
Tensor forward(const Model& m, const Tensor& input, const ForwardOptions& opts = {},
               ForwardTrace* trace = nullptr);

/// Reverse-mode sweep. `dlogits` is the gradient of a scalar loss with respect
/// to the logits from the traced forward pass. Returns a gradient tensor for
/// every trainable parameter. Quantization steps pass gradients straight
/// through.
ParamMap backward(const Model& m, const ForwardTrace& trace, const Tensor& dlogits,
                  const ForwardOptions& opts = {});

/// p <- p - lr * g for every parameter; shapes must match exactly.
void sgd_step(ParamMap& params, const ParamMap& grads, double lr);

}  // namespace cim
