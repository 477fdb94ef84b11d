#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "teachlab/adam.hpp"
#include "teachlab/corpus.hpp"
#include "teachlab/model.hpp"
#include "teachlab/schedule.hpp"

namespace teachlab {

struct RunConfig {
    ModelConfig model;
    ScheduleParams schedule;
    OptimizerConfig optimizer;
    std::uint64_t steps = 2000;
    std::size_t batch_size = 32;
    std::string data_dir;
    std::uint64_t seed = 0;
    std::uint64_t eval_every = 100;
    std::string out_dir;

    void validate() const;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
void write_run_config(const std::string& path, const RunConfig& cfg);

struct RunRecord {
    std::uint64_t step = 0;
    std::string split;  // train | val
    double loss = 0.0;
    double keep_ratio = 0.0;
    double word_acc = 0.0;
    double char_acc = 0.0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "step,split,loss,keep_ratio,word_acc,char_acc,seed,wall_ms";

std::vector<RunRecord> load_metrics(const std::string& path);

/// One in-memory corpus split: normalized pixels plus tokenized labels.
struct Dataset {
    Alphabet alphabet;
    std::size_t img_h = 0, img_w = 0;
    std::vector<std::vector<double>> images;  // each H*W, in [0,1]
    std::vector<std::string> labels;
    std::vector<std::vector<int>> input_ids;  // encode_label, length S
    std::vector<std::vector<int>> targets;    // shifted, length S
    std::vector<Tier> tiers;

    std::size_t size() const { return images.size(); }
};

Dataset load_split(const std::string& data_dir, const std::string& split, std::size_t seq_len);

/// Assemble a batch tensor plus flattened id/target vectors.
struct Batch {
    Tensor images;  // B x H x W
    std::vector<int> input_ids;
    std::vector<int> targets;
    std::vector<std::size_t> indices;
};
Batch make_batch(const Dataset& ds, const std::vector<std::size_t>& indices);

struct TrainResult {
    ModelBundle bundle;
    std::vector<RunRecord> records;
    std::string checkpoint_path;
    std::string metrics_path;
    std::string config_path;
    double final_val_word_acc = 0.0;
    double final_val_char_acc = 0.0;
    double final_train_loss = 0.0;
};

/// Deterministic curriculum training run. Writes config.json, metrics.csv
/// and model.tchk into out_dir; the checkpoint is written at init, at every
/// eval point, and at the end, so an aborted run keeps its last good state.
/// Batch order is a pure function of the seed. schedule.kind == none trains
/// the plain baseline: label slots receive the pad block and the curriculum
/// machinery is bypassed.
TrainResult train(const RunConfig& config);

}  // namespace teachlab
