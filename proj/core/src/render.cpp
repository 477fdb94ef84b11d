#include "teachlab/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teachlab/errors.hpp"
#include "teachlab/font5x7.hpp"
#include "teachlab/rng.hpp"

namespace teachlab {

Tier tier_from_string(const std::string& s) {
    if (s == "clean") return Tier::clean;
    if (s == "noisy") return Tier::noisy;
    if (s == "occluded") return Tier::occluded;
    if (s == "perspective") return Tier::perspective;
    throw ContractError("unknown tier '" + s + "'");
}

std::string tier_to_string(Tier t) {
    switch (t) {
        case Tier::clean: return "clean";
        case Tier::noisy: return "noisy";
        case Tier::occluded: return "occluded";
        case Tier::perspective: return "perspective";
    }
    throw ContractError("invalid tier value");
}

namespace {

constexpr std::uint8_t kBg = 32;
constexpr std::uint8_t kFg = 224;
constexpr std::uint8_t kOccluder = 0;
constexpr std::size_t kMargin = 2;
constexpr std::size_t kMaxScale = 4;

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::llround(v), 0LL, 255LL));
}

struct TextBox {
    std::size_t x0, y0, x1, y1;  // half-open
    std::size_t w() const { return x1 - x0; }
    std::size_t h() const { return y1 - y0; }
};

void apply_noise(GlyphImage& img, Rng& rng) {
    const double contrast = 0.7 + 0.6 * rng.uniform();
    for (auto& p : img.pixels) {
        const double adjusted = 128.0 + contrast * (static_cast<double>(p) - 128.0);
        p = clamp_u8(adjusted + 20.0 * rng.normal());
    }
}

void apply_occlusion(GlyphImage& img, const TextBox& box, Rng& rng,
                     std::vector<std::uint8_t>& mask, double& fraction) {
    mask.assign(img.pixels.size(), 0);
    std::size_t nbars = 1 + rng.below(2);
    const bool vertical = rng.below(2) == 0;
    const std::size_t span = vertical ? box.w() : box.h();
    // total thickness capped at 25% of the span so the covered area stays
    // within 25% of the glyph box
    const std::size_t max_total = std::max<std::size_t>(1, span / 4);
    if (nbars > max_total) nbars = 1;
    const std::size_t per_bar_max = std::max<std::size_t>(1, max_total / nbars);
    for (std::size_t i = 0; i < nbars; ++i) {
        const std::size_t thick = 1 + rng.below(per_bar_max);
        const std::size_t lo = vertical ? box.x0 : box.y0;
        const std::size_t hi = (vertical ? box.x1 : box.y1) - thick;
        const std::size_t start = lo + rng.below(hi - lo + 1);
        if (vertical) {
            for (std::size_t y = box.y0; y < box.y1; ++y)
                for (std::size_t x = start; x < start + thick; ++x) {
                    img.at(y, x) = kOccluder;
                    mask[y * img.width + x] = 1;
                }
        } else {
            for (std::size_t y = start; y < start + thick; ++y)
                for (std::size_t x = box.x0; x < box.x1; ++x) {
                    img.at(y, x) = kOccluder;
                    mask[y * img.width + x] = 1;
                }
        }
    }
    std::size_t covered = 0;
    for (auto b : mask) covered += b;
    fraction = static_cast<double>(covered) / static_cast<double>(box.w() * box.h());
}

void apply_perspective(GlyphImage& img, Rng& rng) {
    constexpr double kMaxAngle = 15.0 * std::numbers::pi / 180.0;
    const double theta = (2.0 * rng.uniform() - 1.0) * kMaxAngle;
    const double shear = std::tan((2.0 * rng.uniform() - 1.0) * kMaxAngle);
    const double c = std::cos(theta), s = std::sin(theta);
    // forward map: rotate then shear in x; sample destination via the inverse
    const double cx = static_cast<double>(img.width) / 2.0;
    const double cy = static_cast<double>(img.height) / 2.0;
    // A = Shear * Rot; A^-1 = Rot^-1 * Shear^-1
    // Shear^-1 = [1 -k; 0 1], Rot^-1 = [c s; -s c]
    GlyphImage src = img;
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            const double ux = dx - shear * dy;
            const double uy = dy;
            const double sx = c * ux + s * uy + cx;
            const double sy = -s * ux + c * uy + cy;
            const long ix = std::lround(sx);
            const long iy = std::lround(sy);
            if (ix >= 0 && iy >= 0 && ix < static_cast<long>(img.width) &&
                iy < static_cast<long>(img.height)) {
                img.at(y, x) = src.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
            } else {
                img.at(y, x) = kBg;
            }
        }
    }
}

}  // namespace

RenderResult render(const SampleSpec& spec, const Alphabet& alphabet, std::size_t height,
                    std::size_t width) {
    if (spec.label.empty()) {
        throw ContractError("render: empty label in sample '" + spec.id + "'");
    }
    for (char ch : spec.label) {
        if (!alphabet.contains(ch)) {
            throw ContractError(std::string("render: character '") + ch +
                                "' of sample '" + spec.id + "' not in alphabet");
        }
    }
    const std::size_t len = spec.label.size();
    if (height <= 2 * kMargin + 7 || width <= 2 * kMargin) {
        throw ContractError("render: canvas too small");
    }
    // advance per glyph is 6*scale plus up to scale of jitter, so budget 7*scale
    const std::size_t scale_h = (height - 2 * kMargin) / 7;
    const std::size_t scale_w = (width - 2 * kMargin) / (7 * len);
    std::size_t scale = std::min({scale_h, scale_w, kMaxScale});
    if (scale == 0) {
        throw ContractError("render: label '" + spec.label + "' too long for " +
                            std::to_string(width) + "x" + std::to_string(height) + " canvas");
    }

    Rng rng(spec.seed);

    GlyphImage img;
    img.height = height;
    img.width = width;
    img.pixels.assign(height * width, kBg);

    const std::size_t glyph_h = 7 * scale;
    const std::size_t base_y = (height - glyph_h) / 2;
    const std::size_t y_slack = std::min<std::size_t>(2, std::min(base_y, height - base_y - glyph_h));
    const std::size_t y0 = base_y - y_slack + rng.below(2 * y_slack + 1);

    TextBox box{width, height, 0, 0};
    std::size_t x = kMargin;
    for (char ch : spec.label) {
        x += rng.below(scale + 1);  // spacing jitter
        const auto rows = glyph5x7(ch);
        for (std::size_t gy = 0; gy < 7; ++gy) {
            for (std::size_t gx = 0; gx < 5; ++gx) {
                if (!(rows[gy] & (1u << (4 - gx)))) continue;
                for (std::size_t sy = 0; sy < scale; ++sy) {
                    for (std::size_t sx = 0; sx < scale; ++sx) {
                        img.at(y0 + gy * scale + sy, x + gx * scale + sx) = kFg;
                    }
                }
            }
        }
        box.x0 = std::min(box.x0, x);
        box.x1 = std::max(box.x1, x + 5 * scale);
        x += 6 * scale;
    }
    box.y0 = y0;
    box.y1 = y0 + glyph_h;

    RenderResult res;
    switch (spec.tier) {
        case Tier::clean:
            break;
        case Tier::noisy:
            apply_noise(img, rng);
            break;
        case Tier::occluded:
            apply_occlusion(img, box, rng, res.occluder_mask, res.occluder_fraction);
            break;
        case Tier::perspective:
            apply_perspective(img, rng);
            break;
    }
    res.image = std::move(img);
    return res;
}

}  // namespace teachlab
