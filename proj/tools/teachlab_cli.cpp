// teachlab: synthetic scene-text corpus generation, curriculum training with
// loss-aware label masking, evaluation, and ablation reports.
//
// Exit codes: 0 success, 1 contract/usage error, 2 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teachlab/corpus.hpp"
#include "teachlab/errors.hpp"
#include "teachlab/experiments.hpp"
#include "teachlab/gradcheck.hpp"
#include "teachlab/metrics.hpp"
#include "teachlab/svg_plot.hpp"
#include "teachlab/textio.hpp"
#include "teachlab/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        if (comma > pos) out.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(teachlab::parse_double(item));
    return out;
}

struct ModelFlags {
    std::size_t embed = 64;
    std::size_t enc_depth = 2;
    std::size_t dec_depth = 2;
    std::size_t heads = 4;
    std::size_t patch = 8;
    std::size_t max_seq = 10;
    std::string decoder = "linear_head";
};

struct ScheduleFlags {
    std::string schedule = "loss_aware";
    double alpha = 2.0;
    double beta = 0.1;
    double smoothing = 0.0;
    std::uint64_t total_mask_steps = 1000;
    double constant_r = 0.0;
    std::string mask_mode = "per_sample";
    std::string keep_pattern = "random";
    bool pad_positional = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--embed", f.embed, "embedding dim E_s");
    cmd->add_option("--enc-depth", f.enc_depth, "encoder blocks");
    cmd->add_option("--dec-depth", f.dec_depth, "decoder blocks");
    cmd->add_option("--heads", f.heads, "attention heads");
    cmd->add_option("--patch", f.patch, "patch size");
    cmd->add_option("--max-seq", f.max_seq, "label sequence length S");
    cmd->add_option("--decoder", f.decoder, "linear_head|ar_decoder");
}

void add_schedule_flags(CLI::App* cmd, ScheduleFlags& f) {
    cmd->add_option("--schedule", f.schedule, "loss_aware|linear|none|constant");
    cmd->add_option("--alpha", f.alpha, "loss-aware sensitivity");
    cmd->add_option("--beta", f.beta, "loss-aware threshold");
    cmd->add_option("--smoothing", f.smoothing, "EMA coefficient for the scheduler loss");
    cmd->add_option("--total-mask-steps", f.total_mask_steps, "linear schedule horizon");
    cmd->add_option("--constant-r", f.constant_r, "constant schedule keep ratio");
    cmd->add_option("--mask-mode", f.mask_mode, "per_sample|shared");
    cmd->add_option("--keep-pattern", f.keep_pattern, "random|prefix");
    cmd->add_flag("--pad-positional", f.pad_positional,
                  "keep text positional embeddings at masked slots");
}

teachlab::ScheduleParams schedule_from_flags(const std::string& kind, const ScheduleFlags& f) {
    teachlab::ScheduleParams s;
    s.kind = teachlab::schedule_kind_from_string(kind);
    s.alpha = f.alpha;
    s.beta = f.beta;
    s.loss_smoothing = f.smoothing;
    s.total_mask_steps = f.total_mask_steps;
    s.constant_r = f.constant_r;
    s.mask_mode = f.mask_mode == "shared" ? teachlab::MaskMode::shared
                                          : teachlab::MaskMode::per_sample;
    s.keep_pattern = f.keep_pattern == "prefix" ? teachlab::KeepPattern::prefix
                                                : teachlab::KeepPattern::random;
    s.pad_positional = f.pad_positional;
    s.validate();
    return s;
}

// model geometry comes from the corpus; the rest from flags
teachlab::ModelConfig model_from_flags(const std::string& data_dir, const ModelFlags& f,
                                       std::uint64_t seed) {
    std::ifstream meta_in(fs::path(data_dir) / "corpus.json", std::ios::binary);
    if (!meta_in) {
        throw teachlab::IoError("corpus metadata missing in '" + data_dir + "'");
    }
    json meta = json::parse(meta_in);
    teachlab::ModelConfig m;
    m.H = meta.at("img_h").get<std::size_t>();
    m.W = meta.at("img_w").get<std::size_t>();
    m.vocab_size = teachlab::Alphabet::from_chars(meta.at("alphabet").get<std::string>())
                       .vocab_size();
    m.patch_size = f.patch;
    m.E_s = f.embed;
    m.encoder_depth = f.enc_depth;
    m.encoder_heads = f.heads;
    m.decoder_kind = teachlab::decoder_kind_from_string(f.decoder);
    m.decoder_depth = f.dec_depth;
    m.decoder_heads = f.heads;
    m.S = f.max_seq;
    m.seed = seed;
    return m;
}

int cmd_gen_data(const std::string& config_path, std::string out_dir, std::size_t count,
                 std::uint64_t seed, const std::string& alphabet, const std::string& tier_mix,
                 std::size_t min_len, std::size_t max_len, std::size_t height, std::size_t width) {
    teachlab::CorpusArgs args;
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw teachlab::IoError("cannot open '" + config_path + "'");
        json j = json::parse(in);
        args.count = j.at("count").get<std::size_t>();
        args.alphabet = teachlab::Alphabet::from_chars(j.at("alphabet").get<std::string>());
        args.tier_mix = teachlab::parse_tier_mix(j.at("tier_mix").get<std::string>());
        args.min_len = j.at("min_len").get<std::size_t>();
        args.max_len = j.at("max_len").get<std::size_t>();
        args.seed = j.at("seed").get<std::uint64_t>();
        args.img_h = j.at("img_h").get<std::size_t>();
        args.img_w = j.at("img_w").get<std::size_t>();
        args.out_dir = out_dir.empty() ? fs::path(config_path).parent_path().string() : out_dir;
    } else {
        args.count = count;
        args.alphabet = teachlab::Alphabet::from_chars(alphabet);
        args.tier_mix = teachlab::parse_tier_mix(tier_mix);
        args.min_len = min_len;
        args.max_len = max_len;
        args.seed = seed;
        args.img_h = height;
        args.img_w = width;
        args.out_dir = out_dir;
    }
    if (args.out_dir.empty()) {
        throw teachlab::ContractError("gen-data: --out is required");
    }
    const auto entries = teachlab::generate_corpus(args);
    std::size_t train = 0, val = 0, test = 0;
    for (const auto& e : entries) {
        if (e.split == "train") ++train;
        else if (e.split == "val") ++val;
        else ++test;
    }
    std::cout << "wrote " << entries.size() << " samples to " << args.out_dir << " (train "
              << train << ", val " << val << ", test " << test << ")\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, std::uint64_t seed, std::uint64_t steps,
              std::size_t batch, std::uint64_t eval_every, double lr, const ModelFlags& mf,
              const ScheduleFlags& sf) {
    teachlab::RunConfig cfg;
    if (!config_path.empty()) {
        cfg = teachlab::load_run_config(config_path);
    } else {
        if (data_dir.empty() || out_dir.empty()) {
            throw teachlab::ContractError("train: --data and --out are required");
        }
        cfg.model = model_from_flags(data_dir, mf, seed);
        cfg.schedule = schedule_from_flags(sf.schedule, sf);
        cfg.optimizer.lr = lr;
        cfg.steps = steps;
        cfg.batch_size = batch;
        cfg.data_dir = data_dir;
        cfg.seed = seed;
        cfg.eval_every = eval_every;
        cfg.out_dir = out_dir;
    }
    const teachlab::TrainResult res = teachlab::train(cfg);
    std::cout << "trained " << cfg.steps << " steps; final train loss "
              << teachlab::fmt_double(res.final_train_loss) << ", val word acc "
              << teachlab::fmt_double(res.final_val_word_acc) << "\n"
              << "checkpoint: " << res.checkpoint_path << "\n"
              << "metrics:    " << res.metrics_path << "\n";
    return 0;
}

int cmd_eval(const std::string& config_path, std::string run_dir, std::string data_dir,
             std::string split, std::string injection, std::string out_file) {
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw teachlab::IoError("cannot open '" + config_path + "'");
        json j = json::parse(in);
        run_dir = j.at("run").get<std::string>();
        data_dir = j.at("data").get<std::string>();
        split = j.at("split").get<std::string>();
        injection = j.at("injection").get<std::string>();
        out_file = j.at("out").get<std::string>();
    }
    if (run_dir.empty()) {
        throw teachlab::ContractError("eval: --run is required");
    }
    const auto mode = teachlab::injection_mode_from_string(injection);
    const teachlab::EvalReport rep = teachlab::evaluate_run(run_dir, data_dir, split, mode);
    const std::string text = teachlab::eval_report_to_json(rep);
    if (out_file.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
        if (!out) throw teachlab::IoError("cannot write '" + out_file + "'");
        out << text;
        ordered_json side;
        side["run"] = run_dir;
        side["data"] = data_dir;
        side["split"] = split;
        side["injection"] = injection;
        side["out"] = out_file;
        std::ofstream sidecar(out_file + ".config.json", std::ios::binary | std::ios::trunc);
        sidecar << side.dump(2) << "\n";
    }
    return 0;
}

int cmd_compare(const std::string& config_path, std::string data_dir, std::string out_dir,
                std::string schedules_csv, std::uint64_t base_seed, std::size_t n_seeds,
                std::uint64_t steps, std::size_t batch, std::uint64_t eval_every, double lr,
                ModelFlags mf, ScheduleFlags sf) {
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw teachlab::IoError("cannot open '" + config_path + "'");
        json j = json::parse(in);
        data_dir = j.at("data").get<std::string>();
        out_dir = j.at("out").get<std::string>();
        schedules_csv = j.at("schedules").get<std::string>();
        base_seed = j.at("seed").get<std::uint64_t>();
        n_seeds = j.at("seeds").get<std::size_t>();
        steps = j.at("steps").get<std::uint64_t>();
        batch = j.at("batch").get<std::size_t>();
        eval_every = j.at("eval_every").get<std::uint64_t>();
        lr = j.at("lr").get<double>();
        mf.embed = j.at("embed").get<std::size_t>();
        mf.enc_depth = j.at("enc_depth").get<std::size_t>();
        mf.dec_depth = j.at("dec_depth").get<std::size_t>();
        mf.heads = j.at("heads").get<std::size_t>();
        mf.patch = j.at("patch").get<std::size_t>();
        mf.max_seq = j.at("max_seq").get<std::size_t>();
        mf.decoder = j.at("decoder").get<std::string>();
        sf.alpha = j.at("alpha").get<double>();
        sf.beta = j.at("beta").get<double>();
        sf.smoothing = j.at("smoothing").get<double>();
        sf.total_mask_steps = j.at("total_mask_steps").get<std::uint64_t>();
        sf.constant_r = j.at("constant_r").get<double>();
    }
    if (data_dir.empty() || out_dir.empty()) {
        throw teachlab::ContractError("compare: --data and --out are required");
    }
    const auto labels = split_list(schedules_csv);
    if (labels.size() < 1) {
        throw teachlab::ContractError("compare: at least one schedule");
    }
    std::vector<teachlab::ScheduleParams> schedules;
    for (const auto& l : labels) schedules.push_back(schedule_from_flags(l, sf));
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(base_seed + i);

    teachlab::RunConfig base;
    base.model = model_from_flags(data_dir, mf, base_seed);
    base.schedule = schedules.front();
    base.optimizer.lr = lr;
    base.steps = steps;
    base.batch_size = batch;
    base.data_dir = data_dir;
    base.seed = base_seed;
    base.eval_every = eval_every;
    base.out_dir = out_dir;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    ordered_json side;
    side["data"] = data_dir;
    side["out"] = out_dir;
    side["schedules"] = schedules_csv;
    side["seed"] = base_seed;
    side["seeds"] = n_seeds;
    side["steps"] = steps;
    side["batch"] = batch;
    side["eval_every"] = eval_every;
    side["lr"] = lr;
    side["embed"] = mf.embed;
    side["enc_depth"] = mf.enc_depth;
    side["dec_depth"] = mf.dec_depth;
    side["heads"] = mf.heads;
    side["patch"] = mf.patch;
    side["max_seq"] = mf.max_seq;
    side["decoder"] = mf.decoder;
    side["alpha"] = sf.alpha;
    side["beta"] = sf.beta;
    side["smoothing"] = sf.smoothing;
    side["total_mask_steps"] = sf.total_mask_steps;
    side["constant_r"] = sf.constant_r;
    std::ofstream sidecar(fs::path(out_dir) / "compare_config.json",
                          std::ios::binary | std::ios::trunc);
    sidecar << side.dump(2) << "\n";
    sidecar.close();

    const auto rows = teachlab::matched_pair_run(base, schedules, labels, seeds, out_dir);
    const std::string csv_path = (fs::path(out_dir) / "compare.csv").string();
    teachlab::write_compare_csv(csv_path, rows);
    for (const auto& r : rows) {
        std::cout << r.schedule << " seed=" << r.seed
                  << " word_acc=" << teachlab::fmt_double(r.word_acc)
                  << " final_loss=" << teachlab::fmt_double(r.final_loss) << "\n";
    }
    std::cout << "report: " << csv_path << "\n";
    return 0;
}

int cmd_ablate(const std::string& config_path, std::string data_dir, std::string out_dir,
               std::string alphas_csv, std::string betas_csv, std::uint64_t base_seed,
               std::size_t n_seeds, std::uint64_t steps, std::size_t batch,
               std::uint64_t eval_every, double lr, ModelFlags mf, ScheduleFlags sf) {
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw teachlab::IoError("cannot open '" + config_path + "'");
        json j = json::parse(in);
        data_dir = j.at("data").get<std::string>();
        out_dir = j.at("out").get<std::string>();
        alphas_csv = j.at("alphas").get<std::string>();
        betas_csv = j.at("betas").get<std::string>();
        base_seed = j.at("seed").get<std::uint64_t>();
        n_seeds = j.at("seeds").get<std::size_t>();
        steps = j.at("steps").get<std::uint64_t>();
        batch = j.at("batch").get<std::size_t>();
        eval_every = j.at("eval_every").get<std::uint64_t>();
        lr = j.at("lr").get<double>();
        mf.embed = j.at("embed").get<std::size_t>();
        mf.enc_depth = j.at("enc_depth").get<std::size_t>();
        mf.dec_depth = j.at("dec_depth").get<std::size_t>();
        mf.heads = j.at("heads").get<std::size_t>();
        mf.patch = j.at("patch").get<std::size_t>();
        mf.max_seq = j.at("max_seq").get<std::size_t>();
        mf.decoder = j.at("decoder").get<std::string>();
        sf.smoothing = j.at("smoothing").get<double>();
    }
    if (data_dir.empty() || out_dir.empty()) {
        throw teachlab::ContractError("ablate: --data and --out are required");
    }
    const auto alphas = parse_double_list(alphas_csv);
    const auto betas = parse_double_list(betas_csv);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(base_seed + i);

    teachlab::RunConfig base;
    base.model = model_from_flags(data_dir, mf, base_seed);
    base.schedule = schedule_from_flags("loss_aware", sf);
    base.optimizer.lr = lr;
    base.steps = steps;
    base.batch_size = batch;
    base.data_dir = data_dir;
    base.seed = base_seed;
    base.eval_every = eval_every;
    base.out_dir = out_dir;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    ordered_json side;
    side["data"] = data_dir;
    side["out"] = out_dir;
    side["alphas"] = alphas_csv;
    side["betas"] = betas_csv;
    side["seed"] = base_seed;
    side["seeds"] = n_seeds;
    side["steps"] = steps;
    side["batch"] = batch;
    side["eval_every"] = eval_every;
    side["lr"] = lr;
    side["embed"] = mf.embed;
    side["enc_depth"] = mf.enc_depth;
    side["dec_depth"] = mf.dec_depth;
    side["heads"] = mf.heads;
    side["patch"] = mf.patch;
    side["max_seq"] = mf.max_seq;
    side["decoder"] = mf.decoder;
    side["smoothing"] = sf.smoothing;
    std::ofstream sidecar(fs::path(out_dir) / "ablate_config.json",
                          std::ios::binary | std::ios::trunc);
    sidecar << side.dump(2) << "\n";
    sidecar.close();

    const auto res = teachlab::ablate(base, alphas, betas, seeds, out_dir);
    for (const auto& c : res.cells) {
        std::cout << "alpha=" << teachlab::fmt_double(c.alpha)
                  << " beta=" << teachlab::fmt_double(c.beta)
                  << " word_acc=" << teachlab::fmt_double(c.mean_word_acc) << "±"
                  << teachlab::fmt_double(c.std_word_acc) << (c.best ? "  <-- best" : "") << "\n";
    }
    std::cout << "grid: " << (fs::path(out_dir) / "grid.csv").string() << "\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, bool verbose) {
    const teachlab::GradCheckReport rep = teachlab::run_gradcheck(seed);
    if (verbose) {
        for (const auto& c : rep.cases) {
            std::printf("%-24s %.3e\n", c.name.c_str(), c.rel_err);
        }
    }
    std::printf("max relative error %.6e (%s)\n", rep.max_rel_err, rep.worst_case.c_str());
    return rep.pass() ? 0 : 1;
}

int cmd_plot(const std::string& config_path, std::vector<std::string> files, std::string window,
             std::string out_svg) {
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw teachlab::IoError("cannot open '" + config_path + "'");
        json j = json::parse(in);
        files = j.at("files").get<std::vector<std::string>>();
        window = j.at("window").get<std::string>();
        out_svg = j.at("out").get<std::string>();
    }
    if (out_svg.empty()) {
        throw teachlab::ContractError("plot: --out is required");
    }
    teachlab::plot_loss_curves(files, teachlab::plot_window_from_string(window), out_svg);
    ordered_json side;
    side["files"] = files;
    side["window"] = window;
    side["out"] = out_svg;
    std::ofstream sidecar(out_svg + ".config.json", std::ios::binary | std::ios::trunc);
    sidecar << side.dump(2) << "\n";
    std::cout << "wrote " << out_svg << "\n";
    return 0;
}

int cmd_select_beta(const std::string& metrics) {
    std::cout << teachlab::fmt_double(teachlab::select_beta(metrics)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"teachlab: curriculum label-injection training at desk scale"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "synthesize a labeled word-image corpus");
    std::string g_config, g_out, g_alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string g_mix = "clean=1";
    std::size_t g_count = 1000, g_min = 1, g_max = 8, g_h = 32, g_w = 128;
    std::uint64_t g_seed = 0;
    gen->add_option("--config", g_config, "resolved corpus.json to regenerate from");
    gen->add_option("--out", g_out, "corpus directory");
    gen->add_option("--count", g_count, "number of samples");
    gen->add_option("--seed", g_seed, "corpus seed");
    gen->add_option("--alphabet", g_alphabet, "recognizable characters");
    gen->add_option("--tier-mix", g_mix, "e.g. clean=0.5,noisy=0.5");
    gen->add_option("--min-len", g_min, "min label length");
    gen->add_option("--max-len", g_max, "max label length");
    gen->add_option("--height", g_h, "image height");
    gen->add_option("--width", g_w, "image width");

    // train
    auto* tr = app.add_subcommand("train", "one training run");
    std::string t_config, t_data, t_out;
    std::uint64_t t_seed = 0, t_steps = 2000, t_eval = 100;
    std::size_t t_batch = 32;
    double t_lr = 1e-3;
    ModelFlags t_mf;
    ScheduleFlags t_sf;
    tr->add_option("--config", t_config, "resolved run config JSON");
    tr->add_option("--data", t_data, "corpus directory");
    tr->add_option("--out", t_out, "run output directory");
    tr->add_option("--seed", t_seed, "run seed");
    tr->add_option("--steps", t_steps, "optimizer steps");
    tr->add_option("--batch", t_batch, "batch size");
    tr->add_option("--eval-every", t_eval, "val evaluation period");
    tr->add_option("--lr", t_lr, "Adam learning rate");
    add_model_flags(tr, t_mf);
    add_schedule_flags(tr, t_sf);

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a finished run on a split");
    std::string e_config, e_run, e_data, e_split = "test", e_injection = "pad", e_out;
    ev->add_option("--config", e_config, "resolved eval config JSON");
    ev->add_option("--run", e_run, "run directory (config.json + model.tchk)");
    ev->add_option("--data", e_data, "corpus override");
    ev->add_option("--split", e_split, "train|val|test");
    ev->add_option("--injection", e_injection, "pad|none");
    ev->add_option("--out", e_out, "report file (stdout when omitted)");

    // compare
    auto* cp = app.add_subcommand("compare", "budget-matched schedule comparison");
    std::string c_config, c_data, c_out, c_schedules = "loss_aware,linear,none";
    std::uint64_t c_seed = 0, c_steps = 2000, c_eval = 100;
    std::size_t c_nseeds = 3, c_batch = 32;
    double c_lr = 1e-3;
    ModelFlags c_mf;
    ScheduleFlags c_sf;
    cp->add_option("--config", c_config, "resolved compare config JSON");
    cp->add_option("--data", c_data, "corpus directory");
    cp->add_option("--out", c_out, "output directory");
    cp->add_option("--schedules", c_schedules, "comma list of schedule kinds");
    cp->add_option("--seed", c_seed, "base seed");
    cp->add_option("--seeds", c_nseeds, "number of seeds (seed, seed+1, ...)");
    cp->add_option("--steps", c_steps, "steps per run");
    cp->add_option("--batch", c_batch, "batch size");
    cp->add_option("--eval-every", c_eval, "val evaluation period");
    cp->add_option("--lr", c_lr, "Adam learning rate");
    add_model_flags(cp, c_mf);
    add_schedule_flags(cp, c_sf);

    // ablate
    auto* ab = app.add_subcommand("ablate", "alpha/beta grid, loss-aware schedule");
    std::string a_config, a_data, a_out, a_alphas = "0.5,2", a_betas = "0.01,0.1";
    std::uint64_t a_seed = 0, a_steps = 2000, a_eval = 100;
    std::size_t a_nseeds = 3, a_batch = 32;
    double a_lr = 1e-3;
    ModelFlags a_mf;
    ScheduleFlags a_sf;
    ab->add_option("--config", a_config, "resolved ablate config JSON");
    ab->add_option("--data", a_data, "corpus directory");
    ab->add_option("--out", a_out, "output directory");
    ab->add_option("--alphas", a_alphas, "comma list");
    ab->add_option("--betas", a_betas, "comma list");
    ab->add_option("--seed", a_seed, "base seed");
    ab->add_option("--seeds", a_nseeds, "number of seeds");
    ab->add_option("--steps", a_steps, "steps per run");
    ab->add_option("--batch", a_batch, "batch size");
    ab->add_option("--eval-every", a_eval, "val evaluation period");
    ab->add_option("--lr", a_lr, "Adam learning rate");
    add_model_flags(ab, a_mf);
    add_schedule_flags(ab, a_sf);

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "finite-difference check of every op");
    std::uint64_t gc_seed = 0;
    bool gc_verbose = false;
    gc->add_option("--seed", gc_seed, "randomization seed");
    gc->add_flag("--verbose", gc_verbose, "per-case errors");

    // plot
    auto* pl = app.add_subcommand("plot", "SVG loss curves from metrics files");
    std::string p_config, p_window = "full", p_out;
    std::vector<std::string> p_files;
    pl->add_option("--config", p_config, "resolved plot config JSON");
    pl->add_option("--window", p_window, "full|early|late");
    pl->add_option("--out", p_out, "output SVG path");
    pl->add_option("files", p_files, "metrics CSV files");

    // select-beta
    auto* sb = app.add_subcommand("select-beta", "beta from a baseline pre-run");
    std::string s_metrics;
    sb->add_option("--metrics", s_metrics, "baseline metrics.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_data(g_config, g_out, g_count, g_seed, g_alphabet, g_mix, g_min, g_max,
                                g_h, g_w);
        }
        if (tr->parsed()) {
            return cmd_train(t_config, t_data, t_out, t_seed, t_steps, t_batch, t_eval, t_lr, t_mf,
                             t_sf);
        }
        if (ev->parsed()) {
            return cmd_eval(e_config, e_run, e_data, e_split, e_injection, e_out);
        }
        if (cp->parsed()) {
            return cmd_compare(c_config, c_data, c_out, c_schedules, c_seed, c_nseeds, c_steps,
                               c_batch, c_eval, c_lr, c_mf, c_sf);
        }
        if (ab->parsed()) {
            return cmd_ablate(a_config, a_data, a_out, a_alphas, a_betas, a_seed, a_nseeds,
                              a_steps, a_batch, a_eval, a_lr, a_mf, a_sf);
        }
        if (gc->parsed()) {
            return cmd_gradcheck(gc_seed, gc_verbose);
        }
        if (pl->parsed()) {
            return cmd_plot(p_config, p_files, p_window, p_out);
        }
        if (sb->parsed()) {
            return cmd_select_beta(s_metrics);
        }
    } catch (const teachlab::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const teachlab::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
