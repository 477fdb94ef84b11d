#include "teachlab/pgm.hpp"

#include <fstream>

#include "teachlab/errors.hpp"

namespace teachlab {

void write_pgm(const std::string& path, const GlyphImage& img) {
    if (img.pixels.size() != img.height * img.width) {
        throw ContractError("write_pgm: pixel buffer does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) {
        throw IoError("write failure on '" + path + "'");
    }
}

namespace {

// Skips whitespace and '#' comments between header tokens.
std::size_t read_header_int(std::ifstream& in, const std::string& path) {
    int c = in.get();
    while (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#') {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        }
        c = in.get();
    }
    if (c < '0' || c > '9') {
        throw IoError("'" + path + "': malformed PGM header");
    }
    std::size_t v = 0;
    while (c >= '0' && c <= '9') {
        v = v * 10 + static_cast<std::size_t>(c - '0');
        c = in.get();
    }
    return v;
}

}  // namespace

GlyphImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') {
        throw IoError("'" + path + "': not a binary PGM (P5)");
    }
    GlyphImage img;
    img.width = read_header_int(in, path);
    img.height = read_header_int(in, path);
    const std::size_t maxval = read_header_int(in, path);
    if (maxval != 255) {
        throw IoError("'" + path + "': unsupported maxval " + std::to_string(maxval));
    }
    img.pixels.resize(img.width * img.height);
    if (!in.read(reinterpret_cast<char*>(img.pixels.data()),
                 static_cast<std::streamsize>(img.pixels.size()))) {
        throw IoError("'" + path + "': truncated pixel data");
    }
    return img;
}

}  // namespace teachlab
