#include "cim/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "cim/errors.hpp"

namespace cim {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559,
              "binary32 payload requires IEEE-754 float");

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw format_error("truncated checkpoint: " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in, const std::string& what) {
    const std::uint32_t bits = get_u32(in, what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamMap& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out.write("CIMW", 4);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, tensor] : params) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
        for (std::size_t e : tensor.shape()) put_u32(out, static_cast<std::uint32_t>(e));
        for (float v : tensor.data()) put_f32(out, v);
    }
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

ParamMap load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "CIMW", 4) != 0) {
        throw format_error("magic mismatch in '" + path.string() + "' (expected CIMW)");
    }
    const std::uint32_t version = get_u32(in, "version");
    if (version != kCheckpointVersion) {
        throw format_error("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = get_u32(in, "tensor count");
    ParamMap params;
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::uint32_t name_len = get_u32(in, "name length");
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw format_error("truncated tensor name");
        const std::uint32_t rank = get_u32(in, "rank");
        std::vector<std::size_t> shape(rank);
        for (auto& e : shape) e = get_u32(in, "extent");
        Tensor tensor(shape);
        for (auto& v : tensor.data()) v = get_f32(in, "payload of '" + name + "'");
        if (!params.emplace(std::move(name), std::move(tensor)).second) {
            throw format_error("duplicate tensor name in '" + path.string() + "'");
        }
    }
    return params;
}

}  // namespace cim
