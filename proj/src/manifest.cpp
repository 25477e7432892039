#include "hhdl/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hhdl {

std::string fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for fingerprinting: " + path);

    std::uint64_t hash = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }

    static const char* digits = "0123456789abcdef";
    std::string hex(16, '0');
    for (int i = 15; i >= 0; --i) {
        hex[i] = digits[hash & 0xf];
        hash >>= 4;
    }
    return hex;
}

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const ManifestEntry& e : m.config) cfg[e.key] = e.value;
    j["config"] = cfg;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const ManifestEntry& e : m.input_hashes) inputs[e.key] = e.value;
    j["inputs"] = inputs;
    j["outputs"] = m.outputs;
    j["version"] = m.version;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << manifest_to_json(m);
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace hhdl
