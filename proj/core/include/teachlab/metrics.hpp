#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "teachlab/model.hpp"
#include "teachlab/train.hpp"

namespace teachlab {

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - normalized edit distance, in [0,1].
double char_accuracy(const std::string& ref, const std::string& hyp);

struct SplitEval {
    double loss = 0.0;  // teacher-forced CE with pad injection
    double word_acc = 0.0;
    double char_acc = 0.0;
    std::vector<std::string> predictions;
};

/// Vision-only evaluation of a whole dataset, batched. pad mode feeds the
/// pad-vector block into the label slots; none feeds visual memory alone
/// (ar_decoder only).
SplitEval evaluate_dataset(const ModelBundle& m, const Dataset& ds, bool pad_positional,
                           std::size_t batch_size, InjectionMode mode = InjectionMode::pad);

struct TierReport {
    std::string tier;
    std::size_t count = 0;
    double word_acc = 0.0;
    double char_acc = 0.0;
};

struct EvalReport {
    std::vector<TierReport> per_tier;
    std::size_t total_count = 0;
    // count-weighted mean of the tier accuracies, by construction
    double word_acc = 0.0;
    double char_acc = 0.0;
    std::string checkpoint_id;
    std::vector<std::uint64_t> seeds;
};

EvalReport build_report(const ModelBundle& m, const Dataset& ds, bool pad_positional,
                        std::size_t batch_size, const std::string& checkpoint_id,
                        std::vector<std::uint64_t> seeds, InjectionMode mode = InjectionMode::pad);

/// Load the run in run_dir (config.json + model.tchk) and evaluate one split.
/// data_dir falls back to the run config when empty.
EvalReport evaluate_run(const std::string& run_dir, const std::string& data_dir,
                        const std::string& split, InjectionMode mode = InjectionMode::pad);

std::string eval_report_to_json(const EvalReport& r);

/// Stable id for a checkpoint file: basename plus a hash of its bytes.
std::string checkpoint_id_of(const std::string& path);

}  // namespace teachlab
