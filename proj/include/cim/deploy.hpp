#pragma once

#include "cim/model.hpp"
#include "cim/noise.hpp"

namespace cim {

/// Weights as programmed onto the device: per-layer fixed-point quantization
/// applied when the model is quantized, identity otherwise.
ParamMap programmed_params(const Model& m);

/// Deployment view of the weights for one noise sample: programmed weights
/// plus device uncertainty (noise applied after quantization).
ParamMap deploy_params(const Model& m, const NoiseSpec& spec, std::uint64_t sample_index);

/// Forward pass through the deployed weights. Weight quantization is already
/// baked into `deployed`; activation quantization still applies.
Tensor forward_deployed(const Model& m, const ParamMap& deployed, const Tensor& input,
                        ForwardTrace* trace = nullptr);

}  // namespace cim
