#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "teachlab/alphabet.hpp"
#include "teachlab/pgm.hpp"

namespace teachlab {

enum class Tier { clean, noisy, occluded, perspective };

Tier tier_from_string(const std::string& s);
std::string tier_to_string(Tier t);

struct SampleSpec {
    std::string id;
    std::string label;
    Tier tier = Tier::clean;
    std::uint64_t seed = 0;
};

struct RenderResult {
    GlyphImage image;
    /// 1 where an occluder bar was painted (occluded tier only, else empty).
    std::vector<std::uint8_t> occluder_mask;
    /// occluder pixels / text bounding-box area; 0 for other tiers.
    double occluder_fraction = 0.0;
};

/// Deterministic function of (spec, alphabet, canvas size). Glyphs come from
/// the built-in 5x7 font, integer-scaled to fit, placed left-to-right with
/// jittered spacing; the tier transform is applied last.
RenderResult render(const SampleSpec& spec, const Alphabet& alphabet, std::size_t height = 32,
                    std::size_t width = 128);

}  // namespace teachlab
