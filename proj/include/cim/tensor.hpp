#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cim {

/// Dense row-major single-precision tensor. Carrier for weights, inputs and
/// outputs. An optional gradient buffer of identical shape can be attached.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    Tensor(std::vector<std::size_t> shape, std::vector<float> data);

    static Tensor scalar(float v) { return Tensor({1}, {v}); }
    static Tensor full(std::vector<std::size_t> shape, float v);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t extent(std::size_t axis) const;

    const std::vector<float>& data() const noexcept { return data_; }
    std::vector<float>& data() noexcept { return data_; }
    float operator[](std::size_t i) const { return data_[i]; }
    float& operator[](std::size_t i) { return data_[i]; }

    bool has_grad() const noexcept { return grad_.has_value(); }
    std::vector<float>& grad();
    const std::vector<float>& grad() const;
    void ensure_grad();      // allocate zero grad buffer if absent
    void zero_grad();        // zero the buffer if present
    void drop_grad() { grad_.reset(); }

    /// True when every data element is finite.
    bool all_finite() const noexcept;

    /// Throws numeric_error naming `context` when a non-finite value is present.
    void require_finite(const std::string& context) const;

    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    /// Exact bitwise equality of shape and data (grad ignored).
    bool bit_equal(const Tensor& other) const noexcept;

private:
    std::vector<std::size_t> shape_;
    std::vector<float> data_;
    std::optional<std::vector<float>> grad_;
};

/// Named parameter collection; ordered map so iteration order is stable.
using ParamMap = std::map<std::string, Tensor>;

std::size_t shape_product(const std::vector<std::size_t>& shape);
std::string shape_to_string(const std::vector<std::size_t>& shape);

}  // namespace cim
