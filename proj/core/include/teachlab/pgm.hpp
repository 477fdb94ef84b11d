#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace teachlab {

struct GlyphImage {
    std::size_t height = 32;
    std::size_t width = 128;
    std::vector<std::uint8_t> pixels;  // row-major grayscale

    std::uint8_t at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }
    std::uint8_t& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }
};

/// Binary PGM (P5), maxval 255.
void write_pgm(const std::string& path, const GlyphImage& img);
GlyphImage read_pgm(const std::string& path);

}  // namespace teachlab
