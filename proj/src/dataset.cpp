#include "cim/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "cim/errors.hpp"
#include "cim/rng.hpp"

namespace cim {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw io_error("cannot open '" + p.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off,
                        const std::filesystem::path& p) {
    if (off + 4 > b.size()) throw format_error("truncated header in '" + p.string() + "'");
    return (static_cast<std::uint32_t>(b[off]) << 24) |
           (static_cast<std::uint32_t>(b[off + 1]) << 16) |
           (static_cast<std::uint32_t>(b[off + 2]) << 8) |
           static_cast<std::uint32_t>(b[off + 3]);
}

}  // namespace

std::vector<std::size_t> Dataset::example_shape() const {
    const auto& s = images.shape();
    return {s[1], s[2], s[3]};
}

Tensor Dataset::example(std::size_t i) const {
    if (i >= size()) throw data_error("example index out of range");
    const auto shape = example_shape();
    const std::size_t len = shape_product(shape);
    std::vector<float> data(images.data().begin() + i * len,
                            images.data().begin() + (i + 1) * len);
    return Tensor(shape, std::move(data));
}

Tensor Dataset::gather(const std::vector<std::size_t>& indices) const {
    const auto shape = example_shape();
    const std::size_t len = shape_product(shape);
    Tensor out({indices.size(), shape[0], shape[1], shape[2]});
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= size()) throw data_error("gather index out of range");
        std::memcpy(out.data().data() + k * len, images.data().data() + indices[k] * len,
                    len * sizeof(float));
    }
    return out;
}

void Dataset::validate() const {
    if (images.rank() != 4) throw data_error("dataset images must be (N,C,H,W)");
    if (labels.empty()) return;  // empty dataset carries a placeholder buffer
    if (images.extent(0) != labels.size()) {
        throw data_error("image count " + std::to_string(images.extent(0)) +
                         " != label count " + std::to_string(labels.size()));
    }
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= classes) {
            throw data_error("label " + std::to_string(l) + " out of range");
        }
    }
    for (float v : images.data()) {
        if (!(v >= 0.0f && v <= 1.0f)) throw data_error("pixel value outside [0,1]");
    }
}

Dataset load_mnist(const std::filesystem::path& images_path,
                   const std::filesystem::path& labels_path) {
    const auto img_bytes = read_file(images_path);
    const auto lbl_bytes = read_file(labels_path);

    if (read_be32(img_bytes, 0, images_path) != 0x00000803u) {
        throw format_error("magic mismatch in '" + images_path.string() +
                           "' (expected IDX image magic 0x00000803)");
    }
    if (read_be32(lbl_bytes, 0, labels_path) != 0x00000801u) {
        throw format_error("magic mismatch in '" + labels_path.string() +
                           "' (expected IDX label magic 0x00000801)");
    }
    const std::uint32_t n_img = read_be32(img_bytes, 4, images_path);
    const std::uint32_t rows = read_be32(img_bytes, 8, images_path);
    const std::uint32_t cols = read_be32(img_bytes, 12, images_path);
    const std::uint32_t n_lbl = read_be32(lbl_bytes, 4, labels_path);
    if (n_img != n_lbl) {
        throw format_error("count mismatch: " + std::to_string(n_img) + " images in '" +
                           images_path.string() + "' vs " + std::to_string(n_lbl) +
                           " labels in '" + labels_path.string() + "'");
    }
    const std::size_t pixels = static_cast<std::size_t>(n_img) * rows * cols;
    if (img_bytes.size() != 16 + pixels) {
        throw format_error("truncated payload in '" + images_path.string() + "': expected " +
                           std::to_string(16 + pixels) + " bytes, got " +
                           std::to_string(img_bytes.size()));
    }
    if (lbl_bytes.size() != 8 + n_lbl) {
        throw format_error("truncated payload in '" + labels_path.string() + "'");
    }

    Dataset d;
    d.classes = 10;
    if (n_img == 0) {
        // Valid empty dataset. Tensor extents must be positive, so emptiness
        // is represented by an empty label vector and a placeholder image
        // buffer; size() is defined by labels.
        d.images = Tensor({1, 1, std::max(rows, 1u), std::max(cols, 1u)});
        d.labels.clear();
        return d;
    }
    d.images = Tensor({n_img, 1, rows, cols});
    auto& px = d.images.data();
    for (std::size_t i = 0; i < pixels; ++i) {
        px[i] = static_cast<float>(img_bytes[16 + i]) / 255.0f;
    }
    d.labels.resize(n_lbl);
    for (std::size_t i = 0; i < n_lbl; ++i) {
        const unsigned char l = lbl_bytes[8 + i];
        if (l > 9) throw format_error("label byte " + std::to_string(l) + " > 9 in '" +
                                      labels_path.string() + "'");
        d.labels[i] = static_cast<int>(l);
    }
    return d;
}

Dataset load_cifar10(const std::vector<std::filesystem::path>& batch_paths) {
    constexpr std::size_t kRecord = 3073;
    constexpr std::size_t kPlane = 32 * 32;

    std::size_t total = 0;
    std::vector<std::vector<unsigned char>> files;
    for (const auto& p : batch_paths) {
        auto bytes = read_file(p);
        if (bytes.size() % kRecord != 0) {
            throw format_error("'" + p.string() + "' length " + std::to_string(bytes.size()) +
                               " is not a multiple of 3073");
        }
        total += bytes.size() / kRecord;
        files.push_back(std::move(bytes));
    }
    if (total == 0) throw format_error("no CIFAR-10 records in input files");

    Dataset d;
    d.classes = 10;
    d.images = Tensor({total, 3, 32, 32});
    d.labels.resize(total);
    std::size_t rec = 0;
    for (std::size_t f = 0; f < files.size(); ++f) {
        const auto& bytes = files[f];
        for (std::size_t off = 0; off < bytes.size(); off += kRecord, ++rec) {
            const unsigned char label = bytes[off];
            if (label > 9) {
                throw format_error("label byte " + std::to_string(label) + " > 9 in '" +
                                   batch_paths[f].string() + "'");
            }
            d.labels[rec] = static_cast<int>(label);
            float* dst = d.images.data().data() + rec * 3 * kPlane;
            for (std::size_t i = 0; i < 3 * kPlane; ++i) {
                dst[i] = static_cast<float>(bytes[off + 1 + i]) / 255.0f;
            }
        }
    }
    return d;
}

Dataset subset(const Dataset& d, std::size_t n, std::uint64_t seed) {
    if (n > d.size()) throw config_error("subset size exceeds dataset size");
    if (n < d.classes) {
        throw config_error("stratified subset needs at least one example per class (" +
                           std::to_string(d.classes) + ")");
    }
    if (n == d.size()) {
        Dataset out = d;
        return out;
    }

    std::vector<std::vector<std::size_t>> by_class(d.classes);
    for (std::size_t i = 0; i < d.size(); ++i) {
        by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);
    }

    // Quotas differ by at most one; the classes receiving the remainder are
    // chosen by a seeded shuffle.
    const std::size_t base = n / d.classes;
    std::size_t remainder = n % d.classes;
    std::vector<std::size_t> class_order = iota_indices(d.classes);
    Rng order_rng(derive_key(seed, 0x5EEDull));
    order_rng.shuffle(class_order);

    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t rank = 0; rank < d.classes; ++rank) {
        const std::size_t cls = class_order[rank];
        std::size_t quota = base + (rank < remainder ? 1 : 0);
        auto& pool = by_class[cls];
        if (quota > pool.size()) {
            throw config_error("class " + std::to_string(cls) + " has only " +
                               std::to_string(pool.size()) + " examples, need " +
                               std::to_string(quota));
        }
        Rng pick_rng(derive_key(seed, cls + 1));
        pick_rng.shuffle(pool);
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + quota);
    }
    std::sort(chosen.begin(), chosen.end());

    Dataset out;
    out.classes = d.classes;
    out.split = d.split;
    out.images = d.gather(chosen);
    out.labels.resize(chosen.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) out.labels[i] = d.labels[chosen[i]];
    return out;
}

}  // namespace cim
