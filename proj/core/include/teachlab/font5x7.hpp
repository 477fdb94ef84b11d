#pragma once

#include <array>
#include <cstdint>

namespace teachlab {

/// 5x7 dot-matrix glyph for a-z (rendered as their uppercase forms) and 0-9.
/// Rows top to bottom, bit 4 = leftmost column. Baked into the binary so
/// rendering is bit-exact everywhere.
std::array<std::uint8_t, 7> glyph5x7(char c);

bool glyph5x7_exists(char c);

}  // namespace teachlab
