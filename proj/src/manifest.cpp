#include "cim/manifest.hpp"

#include <fstream>
#include <sstream>

#include "cim/errors.hpp"
#include "cim/rng.hpp"

namespace cim {

namespace {

void strip_volatile(Json& j) {
    if (j.is_object()) {
        j.erase("wall_time_s");
        for (auto& [key, value] : j.items()) strip_volatile(value);
    } else if (j.is_array()) {
        for (auto& value : j) strip_volatile(value);
    }
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

}  // namespace

std::string canonical_file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "' for hashing");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();

    // JSON document?
    try {
        Json j = Json::parse(bytes);
        strip_volatile(j);
        const std::string canon = j.dump();
        return "fnv1a64:" + hex64(fnv1a64(canon.data(), canon.size()));
    } catch (const Json::exception&) {
    }
    // NDJSON?
    {
        std::istringstream lines(bytes);
        std::string line;
        std::uint64_t h = 0xCBF29CE484222325ull;
        bool any = false, ok = true;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                Json j = Json::parse(line);
                strip_volatile(j);
                const std::string canon = j.dump();
                h = fnv1a64(canon.data(), canon.size(), h);
                h = fnv1a64("\n", 1, h);
                any = true;
            } catch (const Json::exception&) {
                ok = false;
                break;
            }
        }
        if (any && ok) return "fnv1a64:" + hex64(h);
    }
    return "fnv1a64:" + hex64(fnv1a64(bytes.data(), bytes.size()));
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    Json artifacts = Json::array();
    for (const auto& a : manifest.artifacts) {
        artifacts.push_back(Json{{"path", a.path}, {"hash", a.hash}});
    }
    const Json j{{"command", manifest.command},
                 {"argv", manifest.argv},
                 {"seed", manifest.seed},
                 {"noise", noise_to_json(manifest.noise)},
                 {"wall_time_s", manifest.wall_time_s},
                 {"artifacts", artifacts}};
    write_json_file(path, j);
}

RunManifest read_manifest(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.noise = noise_from_json(j.at("noise"));
    m.wall_time_s = j.value("wall_time_s", 0.0);
    for (const auto& a : j.at("artifacts")) {
        m.artifacts.push_back({a.at("path").get<std::string>(), a.at("hash").get<std::string>()});
    }
    return m;
}

}  // namespace cim
