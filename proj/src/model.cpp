#include "cim/model.hpp"

#include <cmath>
#include <cstring>
#include <set>

#include "cim/errors.hpp"
#include "cim/rng.hpp"
#include "kernels.hpp"

namespace cim {

namespace {

std::string layer_label(const LayerDesc& l, std::size_t index) {
    std::string label = layer_kind_name(l.kind) + "[" + std::to_string(index) + "]";
    if (!l.name.empty()) label += " '" + l.name + "'";
    return label;
}

/// Resolves the weights a forward/backward sweep actually uses: an override
/// map when supplied, with per-layer fixed-point quantization materialized on
/// top when the model is quantized.
class EffectiveParams {
public:
    EffectiveParams(const Model& m, const ForwardOptions& opts)
        : base_(opts.params_override ? *opts.params_override : m.params) {
        if (!m.quantized || !opts.quantize_weights) return;
        for (const auto& layer : m.layers) {
            if (!layer.parameterized() || !layer.quant) continue;
            quantized_[layer.weight_name()] = quantize_tensor(fetch(layer.weight_name()), *layer.quant);
            quantized_[layer.bias_name()] = quantize_tensor(fetch(layer.bias_name()), *layer.quant);
        }
    }

    const Tensor& get(const std::string& name) const {
        auto it = quantized_.find(name);
        if (it != quantized_.end()) return it->second;
        return fetch(name);
    }

private:
    const Tensor& fetch(const std::string& name) const {
        auto it = base_.find(name);
        if (it == base_.end()) throw shape_error("missing parameter '" + name + "'");
        return it->second;
    }

    const ParamMap& base_;
    ParamMap quantized_;
};

Tensor batchify(const Tensor& input, const std::vector<std::size_t>& example_shape,
                bool& had_batch_dim) {
    if (input.shape() == example_shape) {
        had_batch_dim = false;
        std::vector<std::size_t> shape{1};
        shape.insert(shape.end(), example_shape.begin(), example_shape.end());
        return Tensor(shape, input.data());
    }
    if (input.rank() == example_shape.size() + 1 &&
        std::equal(example_shape.begin(), example_shape.end(), input.shape().begin() + 1)) {
        had_batch_dim = true;
        return input;
    }
    throw shape_error("input shape " + shape_to_string(input.shape()) +
                      " does not match model input " + shape_to_string(example_shape));
}

void add_bias_rows(Tensor& y, const Tensor& bias, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        float* row = y.data().data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] += bias[c];
    }
}

}  // namespace

std::string layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Dense: return "dense";
        case LayerKind::ReLU: return "relu";
        case LayerKind::Sigmoid: return "sigmoid";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

Model& Model::conv2d(const std::string& name, std::size_t in_ch, std::size_t out_ch,
                     std::size_t kernel, std::optional<QuantSpec> q) {
    if (kernel % 2 == 0) throw config_error("conv kernel must be odd for same padding");
    LayerDesc l;
    l.kind = LayerKind::Conv2d;
    l.name = name;
    l.in_channels = in_ch;
    l.out_channels = out_ch;
    l.kernel = kernel;
    l.quant = q;
    layers.push_back(std::move(l));
    params[name + ".weight"] = Tensor({out_ch, in_ch, kernel, kernel});
    params[name + ".bias"] = Tensor({out_ch});
    return *this;
}

Model& Model::dense(const std::string& name, std::size_t in_f, std::size_t out_f,
                    std::optional<QuantSpec> q) {
    LayerDesc l;
    l.kind = LayerKind::Dense;
    l.name = name;
    l.in_features = in_f;
    l.out_features = out_f;
    l.quant = q;
    layers.push_back(std::move(l));
    params[name + ".weight"] = Tensor({out_f, in_f});
    params[name + ".bias"] = Tensor({out_f});
    return *this;
}

Model& Model::relu() {
    LayerDesc l;
    l.kind = LayerKind::ReLU;
    layers.push_back(std::move(l));
    return *this;
}

Model& Model::sigmoid() {
    LayerDesc l;
    l.kind = LayerKind::Sigmoid;
    layers.push_back(std::move(l));
    return *this;
}

Model& Model::flatten() {
    LayerDesc l;
    l.kind = LayerKind::Flatten;
    layers.push_back(std::move(l));
    return *this;
}

void Model::init_params(std::uint64_t seed) {
    std::size_t index = 0;
    for (const auto& layer : layers) {
        if (!layer.parameterized()) {
            ++index;
            continue;
        }
        std::size_t fan_in, fan_out;
        if (layer.kind == LayerKind::Conv2d) {
            fan_in = layer.in_channels * layer.kernel * layer.kernel;
            fan_out = layer.out_channels * layer.kernel * layer.kernel;
        } else {
            fan_in = layer.in_features;
            fan_out = layer.out_features;
        }
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Rng rng(derive_key(seed, index));
        Tensor& w = params.at(layer.weight_name());
        for (float& v : w.data()) v = static_cast<float>(rng.uniform(-limit, limit));
        Tensor& b = params.at(layer.bias_name());
        std::fill(b.data().begin(), b.data().end(), 0.0f);
        ++index;
    }
}

std::vector<std::size_t> Model::output_shape() const {
    std::vector<std::size_t> s = input_shape;
    std::size_t index = 0;
    for (const auto& layer : layers) {
        switch (layer.kind) {
            case LayerKind::Conv2d:
                if (s.size() != 3 || s[0] != layer.in_channels) {
                    throw shape_error(layer_label(layer, index) + " expects (C=" +
                                      std::to_string(layer.in_channels) + ",H,W), got " +
                                      shape_to_string(s));
                }
                s[0] = layer.out_channels;
                break;
            case LayerKind::Dense:
                if (s.size() != 1 || s[0] != layer.in_features) {
                    throw shape_error(layer_label(layer, index) + " expects (" +
                                      std::to_string(layer.in_features) + "), got " +
                                      shape_to_string(s));
                }
                s[0] = layer.out_features;
                break;
            case LayerKind::Flatten:
                s = {shape_product(s)};
                break;
            case LayerKind::ReLU:
            case LayerKind::Sigmoid:
                break;
        }
        ++index;
    }
    return s;
}

void Model::validate() const {
    std::set<std::string> names;
    for (const auto& layer : layers) {
        if (!layer.parameterized()) continue;
        if (layer.name.empty()) throw config_error("parameterized layer without a name");
        if (!names.insert(layer.name).second) {
            throw config_error("duplicate layer name '" + layer.name + "'");
        }
        if (!params.count(layer.weight_name()) || !params.count(layer.bias_name())) {
            throw config_error("parameters missing for layer '" + layer.name + "'");
        }
    }
    const auto out = output_shape();
    if (out.size() != 1 || out[0] != classes) {
        throw shape_error("model output " + shape_to_string(out) + " does not produce " +
                          std::to_string(classes) + " class logits");
    }
}

Tensor forward(const Model& m, const Tensor& input, const ForwardOptions& opts,
               ForwardTrace* trace) {
    EffectiveParams eff(m, opts);
    bool had_batch = true;
    Tensor x = batchify(input, m.input_shape, had_batch);
    x.require_finite("model input");
    if (trace) {
        trace->activations.clear();
        trace->had_batch_dim = had_batch;
        trace->activations.push_back(x);
    }

    const std::size_t n = x.extent(0);
    std::size_t index = 0;
    for (const auto& layer : m.layers) {
        Tensor y;
        switch (layer.kind) {
            case LayerKind::Conv2d: {
                if (x.rank() != 4 || x.extent(1) != layer.in_channels) {
                    throw shape_error(layer_label(layer, index) + ": input " +
                                      shape_to_string(x.shape()) + " incompatible");
                }
                const std::size_t h = x.extent(2), w = x.extent(3);
                const std::size_t hw = h * w;
                const std::size_t patch_len = layer.in_channels * layer.kernel * layer.kernel;
                const Tensor& weight = eff.get(layer.weight_name());
                const Tensor& bias = eff.get(layer.bias_name());
                y = Tensor({n, layer.out_channels, h, w});
                std::vector<float> patches(hw * patch_len);
                for (std::size_t img = 0; img < n; ++img) {
                    kernels::im2col_same(x.data().data() + img * layer.in_channels * hw,
                                         layer.in_channels, h, w, layer.kernel, patches.data());
                    float* out = y.data().data() + img * layer.out_channels * hw;
                    // out[o, p] = dot(weight row o, patch row p)
                    for (std::size_t o = 0; o < layer.out_channels; ++o) {
                        const float* wrow = weight.data().data() + o * patch_len;
                        float* orow = out + o * hw;
                        const float b = bias[o];
                        for (std::size_t p = 0; p < hw; ++p) {
                            orow[p] = static_cast<float>(
                                kernels::dot_dp(wrow, patches.data() + p * patch_len, patch_len) +
                                static_cast<double>(b));
                        }
                    }
                }
                break;
            }
            case LayerKind::Dense: {
                if (x.rank() != 2 || x.extent(1) != layer.in_features) {
                    throw shape_error(layer_label(layer, index) + ": input " +
                                      shape_to_string(x.shape()) + " incompatible (flatten first?)");
                }
                const Tensor& weight = eff.get(layer.weight_name());
                const Tensor& bias = eff.get(layer.bias_name());
                y = Tensor({n, layer.out_features});
                kernels::matmul_rowrow(x.data().data(), n, weight.data().data(),
                                       layer.out_features, layer.in_features, y.data().data());
                add_bias_rows(y, bias, n, layer.out_features);
                break;
            }
            case LayerKind::ReLU: {
                y = x;
                for (float& v : y.data()) v = v > 0.0f ? v : 0.0f;
                break;
            }
            case LayerKind::Sigmoid: {
                y = x;
                for (float& v : y.data()) {
                    v = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
                }
                break;
            }
            case LayerKind::Flatten: {
                std::vector<std::size_t> flat{n, x.size() / n};
                y = Tensor(flat, x.data());
                break;
            }
        }
        if (m.quantized && opts.quantize_activations && layer.parameterized() && layer.quant) {
            y = quantize_tensor(y, *layer.quant);
        }
        y.require_finite(layer_label(layer, index) + " output");
        x = std::move(y);
        if (trace) trace->activations.push_back(x);
        ++index;
    }

    if (x.rank() != 2 || x.extent(1) != m.classes) {
        throw shape_error("model output " + shape_to_string(x.shape()) + " does not produce " +
                          std::to_string(m.classes) + " class logits");
    }
    if (!had_batch) return Tensor({m.classes}, x.data());
    return x;
}

ParamMap backward(const Model& m, const ForwardTrace& trace, const Tensor& dlogits,
                  const ForwardOptions& opts) {
    if (trace.activations.size() != m.layers.size() + 1) {
        throw config_error("backward requires a completed forward trace");
    }
    EffectiveParams eff(m, opts);

    const Tensor& logits = trace.activations.back();
    Tensor d;
    if (dlogits.shape() == logits.shape()) {
        d = dlogits;
    } else if (!trace.had_batch_dim && dlogits.rank() == 1 && logits.extent(0) == 1 &&
               dlogits.size() == logits.size()) {
        d = Tensor(logits.shape(), dlogits.data());
    } else {
        throw shape_error("loss gradient shape " + shape_to_string(dlogits.shape()) +
                          " does not match logits " + shape_to_string(logits.shape()));
    }

    ParamMap grads;
    for (std::size_t li = m.layers.size(); li-- > 0;) {
        const LayerDesc& layer = m.layers[li];
        const Tensor& x = trace.activations[li];
        const Tensor& y = trace.activations[li + 1];
        switch (layer.kind) {
            case LayerKind::ReLU: {
                Tensor dx = d;
                for (std::size_t i = 0; i < dx.size(); ++i) {
                    if (y[i] <= 0.0f) dx[i] = 0.0f;
                }
                d = std::move(dx);
                break;
            }
            case LayerKind::Sigmoid: {
                Tensor dx = d;
                for (std::size_t i = 0; i < dx.size(); ++i) {
                    const double s = static_cast<double>(y[i]);
                    dx[i] = static_cast<float>(static_cast<double>(dx[i]) * s * (1.0 - s));
                }
                d = std::move(dx);
                break;
            }
            case LayerKind::Flatten: {
                d = Tensor(x.shape(), d.data());
                break;
            }
            case LayerKind::Dense: {
                const std::size_t n = x.extent(0);
                const std::size_t in_f = layer.in_features, out_f = layer.out_features;
                const Tensor& weight = eff.get(layer.weight_name());

                std::vector<double> dw_acc(out_f * in_f, 0.0);
                std::vector<double> db_acc(out_f, 0.0);
                for (std::size_t r = 0; r < n; ++r) {
                    const float* xrow = x.data().data() + r * in_f;
                    const float* drow = d.data().data() + r * out_f;
                    for (std::size_t o = 0; o < out_f; ++o) {
                        const double g = static_cast<double>(drow[o]);
                        if (g == 0.0) continue;
                        db_acc[o] += g;
                        double* acc = dw_acc.data() + o * in_f;
                        for (std::size_t i = 0; i < in_f; ++i) {
                            acc[i] += g * static_cast<double>(xrow[i]);
                        }
                    }
                }
                Tensor dw({out_f, in_f});
                for (std::size_t i = 0; i < dw.size(); ++i) dw[i] = static_cast<float>(dw_acc[i]);
                Tensor db({out_f});
                for (std::size_t i = 0; i < out_f; ++i) db[i] = static_cast<float>(db_acc[i]);
                grads[layer.weight_name()] = std::move(dw);
                grads[layer.bias_name()] = std::move(db);

                // dx = d . W  (rows of W^T are columns of W)
                std::vector<float> wt(in_f * out_f);
                kernels::transpose(weight.data().data(), out_f, in_f, wt.data());
                Tensor dx({n, in_f});
                kernels::matmul_rowrow(d.data().data(), n, wt.data(), in_f, out_f,
                                       dx.data().data());
                d = std::move(dx);
                break;
            }
            case LayerKind::Conv2d: {
                const std::size_t n = x.extent(0);
                const std::size_t cin = layer.in_channels, cout = layer.out_channels;
                const std::size_t h = x.extent(2), w = x.extent(3), hw = h * w;
                const std::size_t patch_len = cin * layer.kernel * layer.kernel;
                const Tensor& weight = eff.get(layer.weight_name());

                std::vector<double> dw_acc(cout * patch_len, 0.0);
                std::vector<double> db_acc(cout, 0.0);
                std::vector<float> patches(hw * patch_len);
                std::vector<float> patches_t(patch_len * hw);
                std::vector<float> dy_t(hw * cout);
                std::vector<float> wmat_t(patch_len * cout);
                std::vector<float> dpatches(hw * patch_len);
                kernels::transpose(weight.data().data(), cout, patch_len, wmat_t.data());

                Tensor dx({n, cin, h, w});
                for (std::size_t img = 0; img < n; ++img) {
                    const float* ximg = x.data().data() + img * cin * hw;
                    const float* dyimg = d.data().data() + img * cout * hw;
                    kernels::im2col_same(ximg, cin, h, w, layer.kernel, patches.data());
                    kernels::transpose(patches.data(), hw, patch_len, patches_t.data());
                    for (std::size_t o = 0; o < cout; ++o) {
                        const float* dyrow = dyimg + o * hw;
                        double bsum = 0.0;
                        for (std::size_t p = 0; p < hw; ++p) bsum += static_cast<double>(dyrow[p]);
                        db_acc[o] += bsum;
                        double* acc = dw_acc.data() + o * patch_len;
                        for (std::size_t r = 0; r < patch_len; ++r) {
                            acc[r] += kernels::dot_dp(dyrow, patches_t.data() + r * hw, hw);
                        }
                    }
                    // dpatches[p, r] = dot(dy column p, W column r)
                    kernels::transpose(dyimg, cout, hw, dy_t.data());
                    kernels::matmul_rowrow(dy_t.data(), hw, wmat_t.data(), patch_len, cout,
                                           dpatches.data());
                    kernels::col2im_same_add(dpatches.data(), cin, h, w, layer.kernel,
                                             dx.data().data() + img * cin * hw);
                }
                Tensor dw({cout, cin, layer.kernel, layer.kernel});
                for (std::size_t i = 0; i < dw.size(); ++i) dw[i] = static_cast<float>(dw_acc[i]);
                Tensor db({cout});
                for (std::size_t i = 0; i < cout; ++i) db[i] = static_cast<float>(db_acc[i]);
                grads[layer.weight_name()] = std::move(dw);
                grads[layer.bias_name()] = std::move(db);
                d = std::move(dx);
                break;
            }
        }
    }
    return grads;
}

void sgd_step(ParamMap& params, const ParamMap& grads, double lr) {
    if (lr < 0.0) throw config_error("learning rate must be >= 0");
    for (auto& [name, p] : params) {
        auto it = grads.find(name);
        if (it == grads.end()) throw shape_error("missing gradient for parameter '" + name + "'");
        const Tensor& g = it->second;
        if (!p.same_shape(g)) {
            throw shape_error("gradient shape mismatch for '" + name + "': " +
                              shape_to_string(g.shape()) + " vs " + shape_to_string(p.shape()));
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = static_cast<float>(static_cast<double>(p[i]) -
                                      lr * static_cast<double>(g[i]));
        }
    }
}

}  // namespace cim
