#include "cim/quantize.hpp"

#include <cmath>

namespace cim {

double QuantSpec::step() const noexcept { return std::ldexp(1.0, -frac_bits); }

double QuantSpec::range_min() const noexcept { return -std::ldexp(1.0, int_bits); }

double QuantSpec::range_max() const noexcept {
    return std::ldexp(1.0, int_bits) - step();
}

double quantize_value(double x, const QuantSpec& q) noexcept {
    const double s = q.step();
    // floor(x/s + 0.5) rounds to nearest with ties toward +inf.
    double k = std::floor(x / s + 0.5);
    const double k_min = -std::ldexp(1.0, q.int_bits + q.frac_bits);
    const double k_max = std::ldexp(1.0, q.int_bits + q.frac_bits) - 1.0;
    if (k < k_min) k = k_min;
    if (k > k_max) k = k_max;
    return k * s;  // dyadic with |k| <= 2^9, exact in double and float
}

Tensor quantize_tensor(const Tensor& t, const QuantSpec& q) {
    Tensor out(t.shape());
    const auto& src = t.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>(quantize_value(static_cast<double>(src[i]), q));
    }
    return out;
}

}  // namespace cim
