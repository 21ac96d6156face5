#include "cim/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "cim/errors.hpp"

namespace cim {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return shape.empty() ? 0 : n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0f) {
    for (std::size_t e : shape_) {
        if (e == 0) throw shape_error("tensor extents must be positive, got " + shape_to_string(shape_));
    }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    for (std::size_t e : shape_) {
        if (e == 0) throw shape_error("tensor extents must be positive, got " + shape_to_string(shape_));
    }
    if (data_.size() != shape_product(shape_)) {
        throw shape_error("data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::full(std::vector<std::size_t> shape, float v) {
    Tensor t(std::move(shape));
    for (float& x : t.data_) x = v;
    return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) throw shape_error("axis out of range");
    return shape_[axis];
}

std::vector<float>& Tensor::grad() {
    if (!grad_) throw shape_error("gradient buffer not allocated");
    return *grad_;
}

const std::vector<float>& Tensor::grad() const {
    if (!grad_) throw shape_error("gradient buffer not allocated");
    return *grad_;
}

void Tensor::ensure_grad() {
    if (!grad_) grad_.emplace(data_.size(), 0.0f);
}

void Tensor::zero_grad() {
    if (grad_) std::fill(grad_->begin(), grad_->end(), 0.0f);
}

bool Tensor::all_finite() const noexcept {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::require_finite(const std::string& context) const {
    if (!all_finite()) throw numeric_error("non-finite value in " + context);
}

bool Tensor::bit_equal(const Tensor& other) const noexcept {
    if (shape_ != other.shape_) return false;
    return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

}  // namespace cim
