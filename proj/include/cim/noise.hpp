#pragma once

#include <cstdint>

#include "cim/tensor.hpp"

namespace cim {

/// Additive i.i.d. Gaussian device-uncertainty model on weights:
/// W_dep = W_exp + N(mu, sigma). Draws are keyed by
/// (seed, sample_index, element position) so Monte-Carlo samples are
/// reproducible and order-independent.
///
/// `sigma_is_variance` selects the alternate reading of the 0.04 figure
/// (variance instead of standard deviation); default treats it as sigma.
struct NoiseSpec {
    double mu = 0.0;
    double sigma = 0.04;
    std::uint64_t seed = 0;
    bool sigma_is_variance = false;

    double stddev() const noexcept;

    bool operator==(const NoiseSpec&) const = default;
};

/// Elementwise independent draws from Normal(mu, sigma^2). sigma == 0 yields
/// an exact zero tensor. `stream` separates noise for different tensors of
/// one sample (perturb keys it by parameter name).
Tensor sample_noise(const std::vector<std::size_t>& shape, const NoiseSpec& spec,
                    std::uint64_t sample_index, std::uint64_t stream = 0);

/// W_dep = W_exp + noise for every tensor in the map; input is not mutated.
ParamMap perturb(const ParamMap& w_exp, const NoiseSpec& spec, std::uint64_t sample_index);

}  // namespace cim
