#include "teachlab/metrics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "teachlab/checkpoint.hpp"
#include "teachlab/errors.hpp"
#include "teachlab/ops.hpp"
#include "teachlab/rng.hpp"
#include "teachlab/textio.hpp"

namespace teachlab {

namespace fs = std::filesystem;

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double char_accuracy(const std::string& ref, const std::string& hyp) {
    const std::size_t denom = std::max({ref.size(), hyp.size(), std::size_t{1}});
    const double d = static_cast<double>(levenshtein(ref, hyp));
    return 1.0 - d / static_cast<double>(denom);
}

SplitEval evaluate_dataset(const ModelBundle& m, const Dataset& ds, bool pad_positional,
                           std::size_t batch_size, InjectionMode mode) {
    if (ds.size() == 0) {
        throw ContractError("evaluate: empty split");
    }
    SplitEval out;
    out.predictions.reserve(ds.size());
    double loss_sum = 0.0;
    std::size_t loss_batches = 0;

    for (std::size_t start = 0; start < ds.size(); start += batch_size) {
        const std::size_t end = std::min(ds.size(), start + batch_size);
        std::vector<std::size_t> idx(end - start);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
        Batch batch = make_batch(ds, idx);

        Tensor visual = encode_image(m, batch.images);
        Tensor injected;
        if (mode == InjectionMode::pad) {
            injected = inference_injection(m, idx.size(), pad_positional);
        }
        Tensor logits = decode(m, visual, injected, batch.input_ids);
        loss_sum += ops::cross_entropy(logits, batch.targets, /*ignore_pad=*/true).item();
        ++loss_batches;

        if (m.config.decoder_kind == DecoderKind::linear_head) {
            const auto d = logits.data();
            const std::size_t s = m.config.S, v = m.config.vocab_size;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                std::vector<int> ids(s);
                for (std::size_t t = 0; t < s; ++t) {
                    const double* x = d.data() + (i * s + t) * v;
                    std::size_t best = 0;
                    for (std::size_t j = 1; j < v; ++j) {
                        if (x[j] > x[best]) best = j;
                    }
                    ids[t] = static_cast<int>(best);
                }
                out.predictions.push_back(decode_ids(ids, ds.alphabet));
            }
        } else {
            auto preds = predict(m, batch.images, mode, ds.alphabet, pad_positional);
            out.predictions.insert(out.predictions.end(), preds.begin(), preds.end());
        }
    }

    std::size_t word_hits = 0;
    double char_sum = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (out.predictions[i] == ds.labels[i]) ++word_hits;
        char_sum += char_accuracy(ds.labels[i], out.predictions[i]);
    }
    out.loss = loss_sum / static_cast<double>(loss_batches);
    out.word_acc = static_cast<double>(word_hits) / static_cast<double>(ds.size());
    out.char_acc = char_sum / static_cast<double>(ds.size());
    return out;
}

EvalReport build_report(const ModelBundle& m, const Dataset& ds, bool pad_positional,
                        std::size_t batch_size, const std::string& checkpoint_id,
                        std::vector<std::uint64_t> seeds, InjectionMode mode) {
    const SplitEval ev = evaluate_dataset(m, ds, pad_positional, batch_size, mode);

    EvalReport rep;
    rep.checkpoint_id = checkpoint_id;
    rep.seeds = std::move(seeds);
    rep.total_count = ds.size();

    for (const Tier tier : {Tier::clean, Tier::noisy, Tier::occluded, Tier::perspective}) {
        TierReport tr;
        tr.tier = tier_to_string(tier);
        double char_sum = 0.0;
        std::size_t word_hits = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.tiers[i] != tier) continue;
            ++tr.count;
            if (ev.predictions[i] == ds.labels[i]) ++word_hits;
            char_sum += char_accuracy(ds.labels[i], ev.predictions[i]);
        }
        if (tr.count == 0) continue;
        tr.word_acc = static_cast<double>(word_hits) / static_cast<double>(tr.count);
        tr.char_acc = char_sum / static_cast<double>(tr.count);
        rep.per_tier.push_back(tr);
    }
    // overall = count-weighted tier mean, so the aggregation identity is exact
    double ww = 0.0, cw = 0.0;
    for (const auto& tr : rep.per_tier) {
        const double w = static_cast<double>(tr.count) / static_cast<double>(rep.total_count);
        ww += w * tr.word_acc;
        cw += w * tr.char_acc;
    }
    rep.word_acc = ww;
    rep.char_acc = cw;
    return rep;
}

std::string checkpoint_id_of(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path + "'");
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_str(bytes)));
    return fs::path(path).filename().string() + "@" + buf;
}

EvalReport evaluate_run(const std::string& run_dir, const std::string& data_dir,
                        const std::string& split, InjectionMode mode) {
    const RunConfig cfg = load_run_config((fs::path(run_dir) / "config.json").string());
    const std::string ckpt = (fs::path(run_dir) / "model.tchk").string();

    ModelBundle bundle = ModelBundle::init(cfg.model);
    apply_checkpoint(load_checkpoint(ckpt), bundle.params);

    const std::string dir = data_dir.empty() ? cfg.data_dir : data_dir;
    Dataset ds = load_split(dir, split, cfg.model.S);
    if (ds.size() == 0) {
        throw ContractError("evaluate: split '" + split + "' of '" + dir + "' is empty");
    }
    return build_report(bundle, ds, cfg.schedule.pad_positional, cfg.batch_size,
                        checkpoint_id_of(ckpt), {cfg.seed}, mode);
}

std::string eval_report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["checkpoint"] = r.checkpoint_id;
    j["seeds"] = r.seeds;
    nlohmann::ordered_json tiers;
    for (const auto& t : r.per_tier) {
        tiers[t.tier] = {{"count", t.count}, {"word_acc", t.word_acc}, {"char_acc", t.char_acc}};
    }
    j["per_tier"] = tiers;
    j["overall"] = {{"count", r.total_count}, {"word_acc", r.word_acc}, {"char_acc", r.char_acc}};
    return j.dump(2) + "\n";
}

}  // namespace teachlab
