#include "cim/loss.hpp"

#include <cmath>

#include "cim/errors.hpp"

namespace cim {

namespace {

template <typename T>
std::vector<double> softmax_impl(std::span<const T> logits) {
    if (logits.empty()) throw shape_error("softmax of empty vector");
    double mx = static_cast<double>(logits[0]);
    for (T v : logits) {
        if (!std::isfinite(static_cast<double>(v))) throw numeric_error("non-finite logit");
        mx = std::max(mx, static_cast<double>(v));
    }
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(static_cast<double>(logits[i]) - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

template <typename T>
std::size_t argmax_impl(std::span<const T> v) {
    if (v.empty()) throw shape_error("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

void check_batch(const Tensor& logits, std::span<const int> labels, std::size_t& n,
                 std::size_t& c) {
    if (logits.rank() == 1) {
        n = 1;
        c = logits.extent(0);
    } else if (logits.rank() == 2) {
        n = logits.extent(0);
        c = logits.extent(1);
    } else {
        throw shape_error("logits must be (N,C) or (C), got " + shape_to_string(logits.shape()));
    }
    if (labels.size() != n) {
        throw shape_error("batch size mismatch: " + std::to_string(n) + " logits rows vs " +
                          std::to_string(labels.size()) + " labels");
    }
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= c) {
            throw data_error("label " + std::to_string(l) + " out of range [0," +
                             std::to_string(c) + ")");
        }
    }
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) { return softmax_impl(logits); }
std::vector<double> softmax(std::span<const float> logits) { return softmax_impl(logits); }

std::size_t argmax_class(std::span<const float> logits) { return argmax_impl(logits); }
std::size_t argmax_class(std::span<const double> logits) { return argmax_impl(logits); }

LossValue cross_entropy_loss(const Tensor& logits, std::span<const int> labels) {
    std::size_t n = 0, c = 0;
    check_batch(logits, labels, n, c);
    LossValue loss;
    loss.per_sample.resize(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        std::span<const float> row(logits.data().data() + r * c, c);
        const auto p = softmax(row);
        const double nll = -std::log(std::max(p[static_cast<std::size_t>(labels[r])], 1e-300));
        loss.per_sample[r] = static_cast<float>(nll);
        total += static_cast<double>(loss.per_sample[r]);
    }
    loss.scalar = static_cast<float>(total / static_cast<double>(n));
    return loss;
}

Tensor cross_entropy_grad(const Tensor& logits, std::span<const int> labels) {
    std::size_t n = 0, c = 0;
    check_batch(logits, labels, n, c);
    Tensor grad(logits.shape());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::span<const float> row(logits.data().data() + r * c, c);
        const auto p = softmax(row);
        float* g = grad.data().data() + r * c;
        for (std::size_t j = 0; j < c; ++j) {
            double v = p[j];
            if (j == static_cast<std::size_t>(labels[r])) v -= 1.0;
            g[j] = static_cast<float>(v * inv_n);
        }
    }
    return grad;
}

}  // namespace cim
