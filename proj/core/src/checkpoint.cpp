#include "teachlab/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "teachlab/errors.hpp"

namespace teachlab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 4)) {
        throw IoError("checkpoint '" + path + "': truncated file");
    }
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<Parameter>& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open checkpoint '" + path + "' for writing");
    }
    out.write("TCHK", 4);
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        validate_param_name(p.name);
        put_u32(out, static_cast<std::uint32_t>(p.name.size()));
        out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        const Shape& s = p.tensor.shape();
        put_u32(out, static_cast<std::uint32_t>(s.size()));
        for (std::size_t d : s) {
            put_u32(out, static_cast<std::uint32_t>(d));
        }
        for (double v : p.tensor.data()) {
            const float f = static_cast<float>(v);
            out.write(reinterpret_cast<const char*>(&f), 4);
        }
    }
    if (!out) {
        throw IoError("write failure on checkpoint '" + path + "'");
    }
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path + "'");
    }
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TCHK", 4) != 0) {
        throw IoError("checkpoint '" + path + "': bad magic");
    }
    const std::uint32_t version = get_u32(in, path);
    if (version != 1) {
        throw IoError("checkpoint '" + path + "': unsupported version " + std::to_string(version));
    }
    const std::uint32_t count = get_u32(in, path);
    std::vector<NamedTensor> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        NamedTensor t;
        const std::uint32_t name_len = get_u32(in, path);
        t.name.resize(name_len);
        if (!in.read(t.name.data(), name_len)) {
            throw IoError("checkpoint '" + path + "': truncated name");
        }
        const std::uint32_t rank = get_u32(in, path);
        std::size_t numel = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            const std::uint32_t dim = get_u32(in, path);
            if (dim == 0) {
                throw IoError("checkpoint '" + path + "': zero dim in '" + t.name + "'");
            }
            t.shape.push_back(dim);
            numel *= dim;
        }
        t.values.resize(numel);
        for (std::size_t j = 0; j < numel; ++j) {
            float f = 0.0f;
            if (!in.read(reinterpret_cast<char*>(&f), 4)) {
                throw IoError("checkpoint '" + path + "': truncated values in '" + t.name + "'");
            }
            t.values[j] = static_cast<double>(f);
        }
        out.push_back(std::move(t));
    }
    return out;
}

void apply_checkpoint(const std::vector<NamedTensor>& loaded, std::vector<Parameter>& params) {
    std::unordered_map<std::string, const NamedTensor*> by_name;
    for (const auto& t : loaded) {
        by_name[t.name] = &t;
    }
    if (loaded.size() != params.size()) {
        throw ContractError("apply_checkpoint: " + std::to_string(loaded.size()) +
                            " tensors for " + std::to_string(params.size()) + " parameters");
    }
    for (auto& p : params) {
        auto it = by_name.find(p.name);
        if (it == by_name.end()) {
            throw ContractError("apply_checkpoint: missing tensor '" + p.name + "'");
        }
        const NamedTensor& t = *it->second;
        if (t.shape != p.tensor.shape()) {
            throw ContractError("apply_checkpoint: shape mismatch for '" + p.name + "': " +
                                shape_str(t.shape) + " vs " + shape_str(p.tensor.shape()));
        }
        auto dst = p.tensor.data_mut();
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            dst[i] = t.values[i];
        }
    }
}

}  // namespace teachlab
