#include "cim/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "cim/errors.hpp"
#include "cim/rng.hpp"

namespace cim {

namespace {

struct Bump {
    double cx, cy, sigma, amp;
    double channel_w[3];
};

std::vector<Bump> class_bumps(std::size_t cls, std::size_t side, std::size_t channels) {
    Rng rng(derive_key(0xC1A55E5ull, cls));
    std::vector<Bump> bumps(4);
    for (auto& b : bumps) {
        b.cx = rng.uniform(4.0, static_cast<double>(side) - 4.0);
        b.cy = rng.uniform(4.0, static_cast<double>(side) - 4.0);
        b.sigma = rng.uniform(1.5, 3.0);
        b.amp = rng.uniform(0.4, 0.8);
        for (std::size_t c = 0; c < 3; ++c) {
            b.channel_w[c] = channels == 1 ? 1.0 : rng.uniform(0.15, 1.0);
        }
    }
    return bumps;
}

Dataset make_synthetic(std::size_t count, std::uint64_t seed, const std::string& split,
                       std::size_t channels, std::size_t side) {
    if (count == 0) throw config_error("synthetic dataset needs at least one example");
    std::vector<std::vector<Bump>> protos(10);
    for (std::size_t k = 0; k < 10; ++k) protos[k] = class_bumps(k, side, channels);

    const std::uint64_t split_key = fnv1a64(split.data(), split.size());
    Dataset d;
    d.classes = 10;
    d.split = split;
    d.images = Tensor({count, channels, side, side});
    d.labels.resize(count);

    const std::size_t plane = side * side;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t cls = i % 10;
        d.labels[i] = static_cast<int>(cls);
        Rng rng(derive_key(derive_key(seed, split_key), i));
        const double dx = std::floor(rng.uniform(-3.0, 4.0));  // {-3..3}
        const double dy = std::floor(rng.uniform(-3.0, 4.0));
        const double scale = rng.uniform(0.4, 1.0);

        // class-independent clutter keeps the task from being trivially separable
        std::vector<Bump> clutter(3);
        for (auto& b : clutter) {
            b.cx = rng.uniform(3.0, static_cast<double>(side) - 3.0);
            b.cy = rng.uniform(3.0, static_cast<double>(side) - 3.0);
            b.sigma = rng.uniform(1.5, 3.0);
            b.amp = rng.uniform(0.25, 0.6);
            for (std::size_t c = 0; c < 3; ++c) {
                b.channel_w[c] = channels == 1 ? 1.0 : rng.uniform(0.2, 1.0);
            }
        }

        float* img = d.images.data().data() + i * channels * plane;
        for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t y = 0; y < side; ++y) {
                for (std::size_t x = 0; x < side; ++x) {
                    double v = 0.0;
                    for (const auto& b : protos[cls]) {
                        const double ddx = static_cast<double>(x) - dx - b.cx;
                        const double ddy = static_cast<double>(y) - dy - b.cy;
                        v += b.amp * b.channel_w[c] *
                             std::exp(-(ddx * ddx + ddy * ddy) / (2.0 * b.sigma * b.sigma));
                    }
                    double noise_v = 0.0;
                    for (const auto& b : clutter) {
                        const double ddx = static_cast<double>(x) - b.cx;
                        const double ddy = static_cast<double>(y) - b.cy;
                        noise_v += b.amp * b.channel_w[c] *
                                   std::exp(-(ddx * ddx + ddy * ddy) / (2.0 * b.sigma * b.sigma));
                    }
                    v = scale * v + noise_v + 0.3 * rng.normal();
                    v = std::min(1.0, std::max(0.0, v));
                    // Store exactly what a byte file round-trips to.
                    const int byte = static_cast<int>(std::lround(v * 255.0));
                    img[c * plane + y * side + x] = static_cast<float>(byte) / 255.0f;
                }
            }
        }
    }
    return d;
}

unsigned char pixel_byte(float v) {
    long b = std::lround(static_cast<double>(v) * 255.0);
    if (b < 0) b = 0;
    if (b > 255) b = 255;
    return static_cast<unsigned char>(b);
}

void put_be32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>((v >> 24) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>(v & 0xFF)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Dataset make_synthetic_mnist(std::size_t count, std::uint64_t seed, const std::string& split) {
    return make_synthetic(count, seed, split, 1, 28);
}

Dataset make_synthetic_cifar(std::size_t count, std::uint64_t seed, const std::string& split) {
    return make_synthetic(count, seed, split, 3, 32);
}

void write_idx_pair(const Dataset& d, const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
    if (d.example_shape()[0] != 1) throw config_error("IDX writer expects single-channel images");
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw io_error("cannot write '" + images_path.string() + "'");
    put_be32(img, 0x00000803u);
    put_be32(img, static_cast<std::uint32_t>(d.size()));
    put_be32(img, static_cast<std::uint32_t>(d.images.extent(2)));
    put_be32(img, static_cast<std::uint32_t>(d.images.extent(3)));
    const std::size_t len = shape_product(d.example_shape());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const float* src = d.images.data().data() + i * len;
        for (std::size_t p = 0; p < len; ++p) {
            const unsigned char b = pixel_byte(src[p]);
            img.write(reinterpret_cast<const char*>(&b), 1);
        }
    }

    std::ofstream lbl(labels_path, std::ios::binary);
    if (!lbl) throw io_error("cannot write '" + labels_path.string() + "'");
    put_be32(lbl, 0x00000801u);
    put_be32(lbl, static_cast<std::uint32_t>(d.size()));
    for (int l : d.labels) {
        const unsigned char b = static_cast<unsigned char>(l);
        lbl.write(reinterpret_cast<const char*>(&b), 1);
    }
}

void write_cifar_batch(const Dataset& d, const std::filesystem::path& path) {
    const auto shape = d.example_shape();
    if (shape != std::vector<std::size_t>{3, 32, 32}) {
        throw config_error("CIFAR writer expects (3,32,32) images");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    const std::size_t len = 3 * 32 * 32;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const unsigned char label = static_cast<unsigned char>(d.labels[i]);
        out.write(reinterpret_cast<const char*>(&label), 1);
        const float* src = d.images.data().data() + i * len;
        for (std::size_t p = 0; p < len; ++p) {
            const unsigned char b = pixel_byte(src[p]);
            out.write(reinterpret_cast<const char*>(&b), 1);
        }
    }
}

}  // namespace cim
