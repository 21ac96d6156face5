#pragma once

#include "cim/tensor.hpp"

namespace cim {

/// Fixed-point format: signed range [-2^int_bits, 2^int_bits - 2^-frac_bits]
/// on a grid of step 2^-frac_bits. The choice sets mirror the search space
/// (int_bits in {0..3}, frac_bits in {0..6}).
struct QuantSpec {
    int int_bits = 2;
    int frac_bits = 4;

    double step() const noexcept;
    double range_min() const noexcept;
    double range_max() const noexcept;

    bool operator==(const QuantSpec&) const = default;
};

/// Nearest representable grid point; ties round toward +infinity; saturates
/// at the range bounds. Idempotent and monotone.
double quantize_value(double x, const QuantSpec& q) noexcept;

/// Elementwise quantize_value; shape preserved; grad buffer not carried over.
Tensor quantize_tensor(const Tensor& t, const QuantSpec& q);

}  // namespace cim
