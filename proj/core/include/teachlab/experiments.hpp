#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "teachlab/train.hpp"

namespace teachlab {

struct CompareRow {
    std::string schedule;
    std::uint64_t seed = 0;
    double word_acc = 0.0;
    double char_acc = 0.0;
    double final_loss = 0.0;
    std::string run_dir;
};

/// Budget-matched comparison: every (schedule, seed) trains with the same
/// initialization and batch order (both derive from the seed alone), so the
/// schedule is the only difference. Each run lands in
/// out_root/<label>_seed<seed>/ with its own metrics trace.
std::vector<CompareRow> matched_pair_run(const RunConfig& base,
                                         const std::vector<ScheduleParams>& schedules,
                                         const std::vector<std::string>& labels,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::string& out_root);

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);

struct GridRow {
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    double word_acc = 0.0;
    double char_acc = 0.0;
    double final_loss = 0.0;
};

struct GridCellSummary {
    double alpha = 0.0;
    double beta = 0.0;
    double mean_word_acc = 0.0;
    double std_word_acc = 0.0;
    bool best = false;
};

struct AblateResult {
    std::vector<GridRow> rows;
    std::vector<GridCellSummary> cells;
    std::size_t best_cell = 0;
};

/// One loss-aware run per (alpha, beta, seed), budget-matched. Writes
/// grid.csv (header: alpha,beta,seed,word_acc,char_acc,final_loss) and
/// summary.csv with per-cell mean/std and the argmax flag.
AblateResult ablate(const RunConfig& base, const std::vector<double>& alphas,
                    const std::vector<double>& betas, const std::vector<std::uint64_t>& seeds,
                    const std::string& out_root);

/// Beta selection from a baseline pre-run: 0.9 x mean train loss over the
/// last 10% of steps.
double select_beta(const std::string& metrics_csv);

}  // namespace teachlab
