#include "teachlab/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "teachlab/errors.hpp"
#include "teachlab/rng.hpp"

namespace teachlab {

namespace fs = std::filesystem;

TierMix parse_tier_mix(const std::string& s) {
    TierMix mix;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string item = s.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw ContractError("tier mix item '" + item + "' is not name=weight");
        }
        const Tier t = tier_from_string(item.substr(0, eq));
        const double w = std::stod(item.substr(eq + 1));
        mix.emplace_back(t, w);
        pos = comma + 1;
    }
    if (mix.empty()) {
        throw ContractError("empty tier mix");
    }
    return mix;
}

std::string tier_mix_to_string(const TierMix& mix) {
    std::string out;
    for (const auto& [t, w] : mix) {
        if (!out.empty()) out += ",";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s=%g", tier_to_string(t).c_str(), w);
        out += buf;
    }
    return out;
}

double split_point(const std::string& id) {
    // FNV alone clusters in the high bits on short ids; finalize for avalanche
    return static_cast<double>(mix64(hash_str(id))) * 0x1.0p-64;
}

std::string split_of_id(const std::string& id) {
    const double u = split_point(id);
    if (u < 0.8) return "train";
    if (u < 0.9) return "val";
    return "test";
}

namespace {

Tier draw_tier(const TierMix& mix, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& [t, w] : mix) {
        acc += w;
        if (u < acc) return t;
    }
    return mix.back().first;
}

}  // namespace

std::vector<ManifestEntry> generate_corpus(const CorpusArgs& args) {
    if (args.count == 0) {
        throw ContractError("generate_corpus: count must be > 0");
    }
    if (args.min_len == 0 || args.min_len > args.max_len) {
        throw ContractError("generate_corpus: bad length range");
    }
    double wsum = 0.0;
    for (const auto& [t, w] : args.tier_mix) {
        if (w < 0.0) throw ContractError("generate_corpus: negative tier weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) {
        throw ContractError("generate_corpus: tier mix sums to " + std::to_string(wsum) +
                            ", expected 1");
    }

    std::error_code ec;
    fs::create_directories(fs::path(args.out_dir) / "images", ec);
    if (ec) {
        throw IoError("cannot create corpus directory '" + args.out_dir + "': " + ec.message());
    }

    std::ofstream manifest(fs::path(args.out_dir) / "manifest.jsonl",
                           std::ios::binary | std::ios::trunc);
    if (!manifest) {
        throw IoError("cannot open manifest in '" + args.out_dir + "'");
    }

    const std::size_t n_alpha = args.alphabet.chars.size();
    std::vector<ManifestEntry> entries;
    entries.reserve(args.count);
    for (std::size_t i = 0; i < args.count; ++i) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "w%06zu", i);
        ManifestEntry e;
        e.id = idbuf;

        Rng rng(derive_seed(args.seed, hash_str(e.id)));
        const std::size_t len = args.min_len + rng.below(args.max_len - args.min_len + 1);
        e.label.reserve(len);
        for (std::size_t j = 0; j < len; ++j) {
            e.label += args.alphabet.chars[rng.below(n_alpha)];
        }
        e.tier = draw_tier(args.tier_mix, rng);
        e.split = split_of_id(e.id);
        e.path = "images/" + e.id + ".pgm";

        SampleSpec spec{e.id, e.label, e.tier, derive_seed(args.seed, hash_str(e.id), 1)};
        const RenderResult r = render(spec, args.alphabet, args.img_h, args.img_w);
        write_pgm((fs::path(args.out_dir) / e.path).string(), r.image);

        nlohmann::ordered_json line;
        line["id"] = e.id;
        line["label"] = e.label;
        line["tier"] = tier_to_string(e.tier);
        line["split"] = e.split;
        line["path"] = e.path;
        manifest << line.dump() << "\n";
        entries.push_back(std::move(e));
    }
    if (!manifest) {
        throw IoError("write failure on manifest in '" + args.out_dir + "'");
    }

    nlohmann::ordered_json meta;
    meta["count"] = args.count;
    meta["alphabet"] = args.alphabet.chars;
    meta["tier_mix"] = tier_mix_to_string(args.tier_mix);
    meta["min_len"] = args.min_len;
    meta["max_len"] = args.max_len;
    meta["seed"] = args.seed;
    meta["img_h"] = args.img_h;
    meta["img_w"] = args.img_w;
    std::ofstream metaf(fs::path(args.out_dir) / "corpus.json", std::ios::binary | std::ios::trunc);
    metaf << meta.dump(2) << "\n";

    return entries;
}

std::vector<ManifestEntry> load_manifest(const std::string& corpus_dir) {
    const fs::path p = fs::path(corpus_dir) / "manifest.jsonl";
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw IoError("cannot open manifest '" + p.string() + "'");
    }
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw IoError("manifest '" + p.string() + "' line " + std::to_string(lineno) + ": " +
                          ex.what());
        }
        ManifestEntry e;
        try {
            e.id = j.at("id").get<std::string>();
            e.label = j.at("label").get<std::string>();
            e.tier = tier_from_string(j.at("tier").get<std::string>());
            e.split = j.at("split").get<std::string>();
            e.path = j.at("path").get<std::string>();
        } catch (const nlohmann::json::exception& ex) {
            throw IoError("manifest '" + p.string() + "' line " + std::to_string(lineno) + ": " +
                          ex.what());
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace teachlab
