#include "hhdl/dictionary_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace hhdl {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct ByteReader {
    const std::string& path;
    std::string data;
    std::size_t pos = 0;

    explicit ByteReader(const std::string& p) : path(p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open dictionary file: " + p);
        data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    void need(std::size_t count) {
        if (pos + count > data.size())
            throw std::runtime_error("truncated dictionary file: " + path);
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }

    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i]))
                    << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Files carry structure only; s = 0 marks the sparsity target unknown so
// sparse_step refuses to guess.
TrainConfig loaded_provenance(Variant v, std::size_t m) {
    TrainConfig cfg;
    cfg.variant = v;
    cfg.m = m;
    cfg.s = 0;
    return cfg;
}

} // namespace

void write_dictionary(const std::string& path, const LearnedDictionary& d) {
    std::string bytes;
    if (d.is_dense()) {
        const Matrix& q = d.dense_rep();
        bytes.append("QDLA");
        put_u32(bytes, kDictionaryFormatVersion);
        put_u32(bytes, static_cast<std::uint32_t>(q.rows()));
        for (double v : q.storage()) put_f64(bytes, v);
    } else {
        const HouseholderDictionary& h = d.reflector_rep();
        bytes.append("HHDL");
        put_u32(bytes, kDictionaryFormatVersion);
        put_u32(bytes, static_cast<std::uint32_t>(h.dim));
        put_u32(bytes, static_cast<std::uint32_t>(h.size()));
        put_u32(bytes, h.orthogonal_set ? 1u : 0u);
        for (const Reflector& r : h.reflectors)
            for (double v : r.u) put_f64(bytes, v);
    }
    write_bytes(path, bytes);
}

LearnedDictionary read_dictionary(const std::string& path) {
    ByteReader r(path);
    r.need(4);
    const std::string magic = r.data.substr(0, 4);
    r.pos = 4;

    const std::uint32_t version = r.u32();
    if (version != kDictionaryFormatVersion)
        throw std::runtime_error("unsupported dictionary version in " + path);

    if (magic == "QDLA") {
        const std::uint32_t n = r.u32();
        if (n == 0) throw std::runtime_error("zero-dimensional dictionary in " + path);
        Matrix q(n, n);
        for (double& v : q.storage()) v = r.f64();
        return LearnedDictionary::dense(std::move(q), loaded_provenance(Variant::qdla, 0));
    }
    if (magic == "HHDL") {
        const std::uint32_t n = r.u32();
        const std::uint32_t m = r.u32();
        const std::uint32_t flags = r.u32();
        if (n == 0) throw std::runtime_error("zero-dimensional dictionary in " + path);
        const bool orthogonal = (flags & 1u) != 0;
        std::vector<std::vector<double>> units(m, std::vector<double>(n));
        for (auto& u : units)
            for (double& v : u) v = r.f64();
        return LearnedDictionary::reflectors(
            make_reflector_dictionary(n, std::move(units), orthogonal),
            loaded_provenance(orthogonal ? Variant::qhm : Variant::hm, m));
    }
    throw std::runtime_error("unrecognized dictionary magic in " + path);
}

} // namespace hhdl
