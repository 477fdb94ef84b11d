#include "teachlab/train.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "teachlab/checkpoint.hpp"
#include "teachlab/errors.hpp"
#include "teachlab/metrics.hpp"
#include "teachlab/ops.hpp"
#include "teachlab/pgm.hpp"
#include "teachlab/textio.hpp"

namespace teachlab {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void RunConfig::validate() const {
    model.validate();
    schedule.validate();
    if (eval_every == 0) {
        throw ContractError("run config: eval_every must be >= 1");
    }
    if (steps > 0 && steps < eval_every) {
        throw ContractError("run config: steps must be >= eval_every");
    }
    if (batch_size == 0) {
        throw ContractError("run config: batch_size must be >= 1");
    }
    if (data_dir.empty() || out_dir.empty()) {
        throw ContractError("run config: data_dir and out_dir are required");
    }
}

namespace {

ordered_json model_to_json(const ModelConfig& m) {
    ordered_json j;
    j["H"] = m.H;
    j["W"] = m.W;
    j["patch_size"] = m.patch_size;
    j["E_s"] = m.E_s;
    j["encoder_depth"] = m.encoder_depth;
    j["encoder_heads"] = m.encoder_heads;
    j["decoder_kind"] = decoder_kind_to_string(m.decoder_kind);
    j["decoder_depth"] = m.decoder_depth;
    j["decoder_heads"] = m.decoder_heads;
    j["S"] = m.S;
    j["vocab_size"] = m.vocab_size;
    j["seed"] = m.seed;
    return j;
}

ModelConfig model_from_json(const json& j) {
    ModelConfig m;
    m.H = j.at("H").get<std::size_t>();
    m.W = j.at("W").get<std::size_t>();
    m.patch_size = j.at("patch_size").get<std::size_t>();
    m.E_s = j.at("E_s").get<std::size_t>();
    m.encoder_depth = j.at("encoder_depth").get<std::size_t>();
    m.encoder_heads = j.at("encoder_heads").get<std::size_t>();
    m.decoder_kind = decoder_kind_from_string(j.at("decoder_kind").get<std::string>());
    m.decoder_depth = j.at("decoder_depth").get<std::size_t>();
    m.decoder_heads = j.at("decoder_heads").get<std::size_t>();
    m.S = j.at("S").get<std::size_t>();
    m.vocab_size = j.at("vocab_size").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
}

ordered_json schedule_to_json(const ScheduleParams& s) {
    ordered_json j;
    j["kind"] = schedule_kind_to_string(s.kind);
    j["alpha"] = s.alpha;
    j["beta"] = s.beta;
    j["total_mask_steps"] = s.total_mask_steps;
    j["constant_r"] = s.constant_r;
    j["loss_smoothing"] = s.loss_smoothing;
    j["mask_mode"] = s.mask_mode == MaskMode::shared ? "shared" : "per_sample";
    j["keep_pattern"] = s.keep_pattern == KeepPattern::prefix ? "prefix" : "random";
    j["pad_positional"] = s.pad_positional;
    j["pad_learnable"] = s.pad_learnable;
    return j;
}

ScheduleParams schedule_from_json(const json& j) {
    ScheduleParams s;
    s.kind = schedule_kind_from_string(j.at("kind").get<std::string>());
    s.alpha = j.at("alpha").get<double>();
    s.beta = j.at("beta").get<double>();
    s.total_mask_steps = j.at("total_mask_steps").get<std::uint64_t>();
    s.constant_r = j.at("constant_r").get<double>();
    s.loss_smoothing = j.at("loss_smoothing").get<double>();
    const std::string mm = j.value("mask_mode", "per_sample");
    if (mm != "per_sample" && mm != "shared") {
        throw ContractError("schedule: unknown mask_mode '" + mm + "'");
    }
    s.mask_mode = mm == "shared" ? MaskMode::shared : MaskMode::per_sample;
    const std::string kp = j.value("keep_pattern", "random");
    if (kp != "random" && kp != "prefix") {
        throw ContractError("schedule: unknown keep_pattern '" + kp + "'");
    }
    s.keep_pattern = kp == "prefix" ? KeepPattern::prefix : KeepPattern::random;
    s.pad_positional = j.value("pad_positional", false);
    s.pad_learnable = j.value("pad_learnable", true);
    return s;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["model"] = model_to_json(cfg.model);
    j["schedule"] = schedule_to_json(cfg.schedule);
    j["optimizer"] = {{"lr", cfg.optimizer.lr},
                      {"beta1", cfg.optimizer.beta1},
                      {"beta2", cfg.optimizer.beta2},
                      {"eps", cfg.optimizer.eps}};
    j["steps"] = cfg.steps;
    j["batch_size"] = cfg.batch_size;
    j["data_dir"] = cfg.data_dir;
    j["seed"] = cfg.seed;
    j["eval_every"] = cfg.eval_every;
    j["out_dir"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw IoError(std::string("bad run config JSON: ") + ex.what());
    }
    try {
        RunConfig cfg;
        cfg.model = model_from_json(j.at("model"));
        cfg.schedule = schedule_from_json(j.at("schedule"));
        const json& o = j.at("optimizer");
        cfg.optimizer.lr = o.at("lr").get<double>();
        cfg.optimizer.beta1 = o.at("beta1").get<double>();
        cfg.optimizer.beta2 = o.at("beta2").get<double>();
        cfg.optimizer.eps = o.at("eps").get<double>();
        cfg.steps = j.at("steps").get<std::uint64_t>();
        cfg.batch_size = j.at("batch_size").get<std::size_t>();
        cfg.data_dir = j.at("data_dir").get<std::string>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.eval_every = j.at("eval_every").get<std::uint64_t>();
        cfg.out_dir = j.at("out_dir").get<std::string>();
        return cfg;
    } catch (const json::exception& ex) {
        throw ContractError(std::string("run config missing field: ") + ex.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open run config '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_config_from_json(text);
}

void write_run_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write run config '" + path + "'");
    }
    out << run_config_to_json(cfg);
}

std::vector<RunRecord> load_metrics(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open metrics '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) {
        throw IoError("metrics '" + path + "' line 1: bad header");
    }
    std::vector<RunRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) {
            throw IoError("metrics '" + path + "' line " + std::to_string(lineno) +
                          ": expected 8 fields, got " + std::to_string(f.size()));
        }
        try {
            RunRecord r;
            r.step = std::stoull(f[0]);
            r.split = f[1];
            r.loss = parse_double(f[2]);
            r.keep_ratio = parse_double(f[3]);
            r.word_acc = parse_double(f[4]);
            r.char_acc = parse_double(f[5]);
            r.seed = std::stoull(f[6]);
            r.wall_ms = parse_double(f[7]);
            out.push_back(std::move(r));
        } catch (const std::exception&) {
            throw IoError("metrics '" + path + "' line " + std::to_string(lineno) +
                          ": malformed row");
        }
    }
    return out;
}

Dataset load_split(const std::string& data_dir, const std::string& split, std::size_t seq_len) {
    std::ifstream meta_in(fs::path(data_dir) / "corpus.json", std::ios::binary);
    if (!meta_in) {
        throw IoError("corpus metadata missing in '" + data_dir + "'");
    }
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::exception& ex) {
        throw IoError("bad corpus.json in '" + data_dir + "': " + ex.what());
    }

    Dataset ds;
    ds.alphabet = Alphabet::from_chars(meta.at("alphabet").get<std::string>());
    ds.img_h = meta.at("img_h").get<std::size_t>();
    ds.img_w = meta.at("img_w").get<std::size_t>();

    const auto entries = load_manifest(data_dir);
    for (const auto& e : entries) {
        if (e.split != split) continue;
        const GlyphImage img = read_pgm((fs::path(data_dir) / e.path).string());
        if (img.height != ds.img_h || img.width != ds.img_w) {
            throw IoError("image '" + e.path + "' does not match corpus dimensions");
        }
        std::vector<double> px(img.pixels.size());
        for (std::size_t i = 0; i < px.size(); ++i) {
            px[i] = static_cast<double>(img.pixels[i]) / 255.0;
        }
        ds.images.push_back(std::move(px));
        ds.labels.push_back(e.label);
        ds.input_ids.push_back(encode_label(e.label, seq_len, ds.alphabet));
        ds.targets.push_back(shifted_targets(ds.input_ids.back()));
        ds.tiers.push_back(e.tier);
    }
    return ds;
}

Batch make_batch(const Dataset& ds, const std::vector<std::size_t>& indices) {
    const std::size_t b = indices.size();
    const std::size_t hw = ds.img_h * ds.img_w;
    const std::size_t s = ds.input_ids.empty() ? 0 : ds.input_ids.front().size();
    Batch out;
    out.indices = indices;
    std::vector<double> px(b * hw);
    out.input_ids.reserve(b * s);
    out.targets.reserve(b * s);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t idx = indices[i];
        std::copy(ds.images[idx].begin(), ds.images[idx].end(), px.begin() + i * hw);
        out.input_ids.insert(out.input_ids.end(), ds.input_ids[idx].begin(),
                             ds.input_ids[idx].end());
        out.targets.insert(out.targets.end(), ds.targets[idx].begin(), ds.targets[idx].end());
    }
    out.images = Tensor::from_data({b, ds.img_h, ds.img_w}, std::move(px));
    return out;
}

namespace {

struct BatchAccuracy {
    double word_acc = 0.0;
    double token_acc = 0.0;
};

// token/word agreement of argmax vs targets over counted (non-pad) positions
BatchAccuracy batch_accuracy(const Tensor& logits, const std::vector<int>& targets) {
    const std::size_t b = logits.shape()[0];
    const std::size_t s = logits.shape()[1];
    const std::size_t v = logits.shape()[2];
    const auto d = logits.data();
    std::size_t tok_hit = 0, tok_total = 0, word_hit = 0;
    for (std::size_t i = 0; i < b; ++i) {
        bool all = true;
        for (std::size_t t = 0; t < s; ++t) {
            const int tgt = targets[i * s + t];
            if (tgt == Alphabet::kPad) continue;
            const double* x = d.data() + (i * s + t) * v;
            std::size_t best = 0;
            for (std::size_t j = 1; j < v; ++j) {
                if (x[j] > x[best]) best = j;
            }
            ++tok_total;
            if (static_cast<int>(best) == tgt) {
                ++tok_hit;
            } else {
                all = false;
            }
        }
        if (all) ++word_hit;
    }
    BatchAccuracy acc;
    acc.word_acc = static_cast<double>(word_hit) / static_cast<double>(b);
    acc.token_acc =
        tok_total == 0 ? 0.0 : static_cast<double>(tok_hit) / static_cast<double>(tok_total);
    return acc;
}

void append_record(std::ofstream& csv, const RunRecord& r) {
    csv << r.step << "," << r.split << "," << fmt_double(r.loss) << ","
        << fmt_double(r.keep_ratio) << "," << fmt_double(r.word_acc) << ","
        << fmt_double(r.char_acc) << "," << r.seed << "," << fmt_double(r.wall_ms) << "\n";
    csv.flush();
}

}  // namespace

TrainResult train(const RunConfig& config) {
    config.validate();

    Dataset train_ds = load_split(config.data_dir, "train", config.model.S);
    Dataset val_ds = load_split(config.data_dir, "val", config.model.S);
    if (train_ds.size() == 0) {
        throw IoError("no training samples in '" + config.data_dir + "'");
    }
    if (train_ds.size() < config.batch_size) {
        throw ContractError("training split smaller than one batch");
    }
    if (static_cast<std::size_t>(train_ds.alphabet.vocab_size()) != config.model.vocab_size) {
        throw ContractError("model vocab " + std::to_string(config.model.vocab_size) +
                            " does not match corpus vocab " +
                            std::to_string(train_ds.alphabet.vocab_size()));
    }
    if (train_ds.img_h != config.model.H || train_ds.img_w != config.model.W) {
        throw ContractError("model expects " + std::to_string(config.model.H) + "x" +
                            std::to_string(config.model.W) + " images, corpus has " +
                            std::to_string(train_ds.img_h) + "x" + std::to_string(train_ds.img_w));
    }

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        throw IoError("cannot create out dir '" + config.out_dir + "': " + ec.message());
    }

    TrainResult res;
    res.config_path = (fs::path(config.out_dir) / "config.json").string();
    res.metrics_path = (fs::path(config.out_dir) / "metrics.csv").string();
    res.checkpoint_path = (fs::path(config.out_dir) / "model.tchk").string();
    write_run_config(res.config_path, config);

    res.bundle = ModelBundle::init(config.model);
    save_checkpoint(res.checkpoint_path, res.bundle.params);  // init = last good state

    std::ofstream csv(res.metrics_path, std::ios::binary | std::ios::trunc);
    if (!csv) {
        throw IoError("cannot open metrics '" + res.metrics_path + "'");
    }
    csv << kMetricsHeader << "\n";
    csv.flush();

    std::vector<Parameter> trainable =
        res.bundle.trainable(/*freeze_encoder=*/false, config.schedule.pad_learnable);
    Adam opt(config.optimizer);
    ScheduleState state;

    const bool strict = strict_determinism();
    std::vector<std::size_t> order(train_ds.size());
    std::size_t cursor = order.size();  // forces a shuffle on first use
    std::uint64_t epoch = 0;

    for (std::uint64_t step = 0; step < config.steps; ++step) {
        if (cursor + config.batch_size > order.size()) {
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            Rng rng(derive_seed(config.seed, "data", epoch));
            rng.shuffle(order);
            cursor = 0;
            ++epoch;
        }
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                     order.begin() + static_cast<std::ptrdiff_t>(cursor) +
                                         static_cast<std::ptrdiff_t>(config.batch_size));
        cursor += config.batch_size;
        Batch batch = make_batch(train_ds, idx);

        const std::optional<double> prev = state.last_loss;
        const double r = compute_keep_ratio(state, config.schedule, prev);

        double loss_val = 0.0;
        BatchAccuracy acc;
        try {
            InjectionResult inj =
                build_injection(res.bundle, batch.input_ids, idx.size(), r,
                                derive_seed(config.seed, "mask", step), config.schedule);
            Tensor visual = encode_image(res.bundle, batch.images);
            Tensor logits = decode(res.bundle, visual, inj.injected, batch.input_ids);
            Tensor loss = ops::cross_entropy(logits, batch.targets, /*ignore_pad=*/true);
            loss_val = loss.item();
            acc = batch_accuracy(logits, batch.targets);
            for (auto& p : trainable) p.tensor.zero_grad();
            backward(loss);
            opt.step(trainable);
        } catch (const ContractError& ex) {
            // leave the last good checkpoint in place
            throw ContractError("step " + std::to_string(step) + ": " + ex.what());
        }
        record_loss(state, loss_val);
        res.final_train_loss = loss_val;

        const auto t1 = std::chrono::steady_clock::now();
        RunRecord rec;
        rec.step = step;
        rec.split = "train";
        rec.loss = loss_val;
        rec.keep_ratio = r;
        rec.word_acc = acc.word_acc;
        rec.char_acc = acc.token_acc;
        rec.seed = config.seed;
        rec.wall_ms = strict ? 0.0
                             : std::chrono::duration<double, std::milli>(t1 - t0).count();
        append_record(csv, rec);
        res.records.push_back(rec);

        if ((step + 1) % config.eval_every == 0 || step + 1 == config.steps) {
            if (val_ds.size() > 0) {
                const auto t2 = std::chrono::steady_clock::now();
                const SplitEval ev = evaluate_dataset(res.bundle, val_ds,
                                                      config.schedule.pad_positional,
                                                      config.batch_size);
                const auto t3 = std::chrono::steady_clock::now();
                RunRecord vrec;
                vrec.step = step;
                vrec.split = "val";
                vrec.loss = ev.loss;
                vrec.keep_ratio = 0.0;  // inference path is the fully masked one
                vrec.word_acc = ev.word_acc;
                vrec.char_acc = ev.char_acc;
                vrec.seed = config.seed;
                vrec.wall_ms = strict ? 0.0
                                      : std::chrono::duration<double, std::milli>(t3 - t2).count();
                append_record(csv, vrec);
                res.records.push_back(vrec);
                res.final_val_word_acc = ev.word_acc;
                res.final_val_char_acc = ev.char_acc;
            }
            save_checkpoint(res.checkpoint_path, res.bundle.params);
        }
    }
    if (config.steps == 0) {
        // metrics stays header-only; checkpoint equals initialization
        save_checkpoint(res.checkpoint_path, res.bundle.params);
    }
    return res;
}

}  // namespace teachlab
