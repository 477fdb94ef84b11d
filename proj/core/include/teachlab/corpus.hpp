#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "teachlab/alphabet.hpp"
#include "teachlab/render.hpp"

namespace teachlab {

/// Ordered tier proportions; must sum to 1.
using TierMix = std::vector<std::pair<Tier, double>>;

TierMix parse_tier_mix(const std::string& s);  // "clean=0.5,noisy=0.5"
std::string tier_mix_to_string(const TierMix& mix);

struct CorpusArgs {
    std::size_t count = 0;
    Alphabet alphabet = Alphabet::default36();
    TierMix tier_mix = {{Tier::clean, 1.0}};
    std::size_t min_len = 1;
    std::size_t max_len = 8;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t img_h = 32;
    std::size_t img_w = 128;
};

struct ManifestEntry {
    std::string id;
    std::string label;
    Tier tier = Tier::clean;
    std::string split;  // train | val | test
    std::string path;   // relative to the corpus dir
};

/// Writes count PGM images plus manifest.jsonl and corpus.json (the resolved
/// generation args). Pure function of (args, seed): reruns are byte-identical.
/// Each sample's RNG stream derives from (seed, id), and the train/val/test
/// split (80/10/10) comes from a hash of the id alone, so it is stable under
/// re-generation.
std::vector<ManifestEntry> generate_corpus(const CorpusArgs& args);

std::vector<ManifestEntry> load_manifest(const std::string& corpus_dir);

/// Split fraction in [0,1) derived from the sample id.
double split_point(const std::string& id);
std::string split_of_id(const std::string& id);

}  // namespace teachlab
