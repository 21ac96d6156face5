#include "cim/noise.hpp"

#include <cmath>
#include <numbers>

#include "cim/errors.hpp"
#include "cim/rng.hpp"

namespace cim {

double NoiseSpec::stddev() const noexcept {
    return sigma_is_variance ? std::sqrt(sigma) : sigma;
}

Tensor sample_noise(const std::vector<std::size_t>& shape, const NoiseSpec& spec,
                    std::uint64_t sample_index, std::uint64_t stream) {
    if (spec.sigma < 0.0) throw config_error("noise sigma must be >= 0");
    Tensor out(shape);
    const double sd = spec.stddev();
    if (sd == 0.0 && spec.mu == 0.0) return out;

    // Key chain: seed -> sample -> stream; one mixed word per element.
    const std::uint64_t key = derive_key(derive_key(mix64(spec.seed), sample_index), stream);
    auto& data = out.data();
    for (std::size_t e = 0; e < data.size(); ++e) {
        const std::uint64_t bits = mix64(key ^ (0xD6E8FEB86659FD93ull * (e + 1)));
        const double u1 = (static_cast<double>(bits >> 32) + 1.0) * 0x1.0p-32;
        const double u2 = static_cast<double>(bits & 0xFFFFFFFFull) * 0x1.0p-32;
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        data[e] = static_cast<float>(spec.mu + sd * z);
    }
    return out;
}

ParamMap perturb(const ParamMap& w_exp, const NoiseSpec& spec, std::uint64_t sample_index) {
    ParamMap out;
    for (const auto& [name, w] : w_exp) {
        w.require_finite("perturb input '" + name + "'");
        const std::uint64_t stream = fnv1a64(name.data(), name.size());
        Tensor noise = sample_noise(w.shape(), spec, sample_index, stream);
        Tensor dep(w.shape());
        for (std::size_t i = 0; i < w.size(); ++i) dep[i] = w[i] + noise[i];
        out.emplace(name, std::move(dep));
    }
    return out;
}

}  // namespace cim
