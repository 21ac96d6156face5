#include "cim/deploy.hpp"

namespace cim {

ParamMap programmed_params(const Model& m) {
    if (!m.quantized) return m.params;
    ParamMap out = m.params;
    for (const auto& layer : m.layers) {
        if (!layer.parameterized() || !layer.quant) continue;
        out[layer.weight_name()] = quantize_tensor(m.params.at(layer.weight_name()), *layer.quant);
        out[layer.bias_name()] = quantize_tensor(m.params.at(layer.bias_name()), *layer.quant);
    }
    return out;
}

ParamMap deploy_params(const Model& m, const NoiseSpec& spec, std::uint64_t sample_index) {
    // Exact-zero noise must reproduce the programmed weights bitwise.
    if (spec.stddev() == 0.0 && spec.mu == 0.0) return programmed_params(m);
    return perturb(programmed_params(m), spec, sample_index);
}

Tensor forward_deployed(const Model& m, const ParamMap& deployed, const Tensor& input,
                        ForwardTrace* trace) {
    ForwardOptions opts;
    opts.params_override = &deployed;
    opts.quantize_weights = false;
    return forward(m, input, opts, trace);
}

}  // namespace cim
