#include "teachlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "teachlab/errors.hpp"
#include "teachlab/textio.hpp"

namespace teachlab {

namespace fs = std::filesystem;

std::vector<CompareRow> matched_pair_run(const RunConfig& base,
                                         const std::vector<ScheduleParams>& schedules,
                                         const std::vector<std::string>& labels,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::string& out_root) {
    if (schedules.empty() || schedules.size() != labels.size()) {
        throw ContractError("matched_pair_run: schedules and labels must be non-empty and match");
    }
    if (seeds.empty()) {
        throw ContractError("matched_pair_run: at least one seed");
    }
    std::vector<CompareRow> rows;
    for (std::size_t si = 0; si < schedules.size(); ++si) {
        // duplicate labels get a disambiguating suffix for their run dirs
        std::string label = labels[si];
        for (std::size_t prev = 0; prev < si; ++prev) {
            if (labels[prev] == labels[si]) {
                label += "_dup" + std::to_string(si);
                break;
            }
        }
        for (const std::uint64_t seed : seeds) {
            RunConfig cfg = base;
            cfg.schedule = schedules[si];
            cfg.seed = seed;
            cfg.model.seed = seed;  // same init across schedules, per matched-pair contract
            cfg.out_dir = (fs::path(out_root) / (label + "_seed" + std::to_string(seed))).string();
            const TrainResult res = train(cfg);
            CompareRow row;
            row.schedule = labels[si];
            row.seed = seed;
            row.word_acc = res.final_val_word_acc;
            row.char_acc = res.final_val_char_acc;
            row.final_loss = res.final_train_loss;
            row.run_dir = cfg.out_dir;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << "schedule,seed,word_acc,char_acc,final_loss\n";
    for (const auto& r : rows) {
        out << r.schedule << "," << r.seed << "," << fmt_double(r.word_acc) << ","
            << fmt_double(r.char_acc) << "," << fmt_double(r.final_loss) << "\n";
    }
}

AblateResult ablate(const RunConfig& base, const std::vector<double>& alphas,
                    const std::vector<double>& betas, const std::vector<std::uint64_t>& seeds,
                    const std::string& out_root) {
    if (alphas.empty() || betas.empty() || seeds.empty()) {
        throw ContractError("ablate: alphas, betas and seeds must be non-empty");
    }
    std::error_code ec;
    fs::create_directories(out_root, ec);

    AblateResult res;
    for (const double alpha : alphas) {
        for (const double beta : betas) {
            GridCellSummary cell;
            cell.alpha = alpha;
            cell.beta = beta;
            std::vector<double> accs;
            for (const std::uint64_t seed : seeds) {
                RunConfig cfg = base;
                cfg.schedule.kind = ScheduleKind::loss_aware;
                cfg.schedule.alpha = alpha;
                cfg.schedule.beta = beta;
                cfg.seed = seed;
                cfg.model.seed = seed;
                cfg.out_dir =
                    (fs::path(out_root) / ("a" + fmt_double(alpha) + "_b" + fmt_double(beta) +
                                           "_seed" + std::to_string(seed)))
                        .string();
                const TrainResult r = train(cfg);
                GridRow row;
                row.alpha = alpha;
                row.beta = beta;
                row.seed = seed;
                row.word_acc = r.final_val_word_acc;
                row.char_acc = r.final_val_char_acc;
                row.final_loss = r.final_train_loss;
                res.rows.push_back(row);
                accs.push_back(row.word_acc);
            }
            double mean = 0.0;
            for (double a : accs) mean += a;
            mean /= static_cast<double>(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            var /= static_cast<double>(accs.size());
            cell.mean_word_acc = mean;
            cell.std_word_acc = std::sqrt(var);
            res.cells.push_back(cell);
        }
    }
    res.best_cell = 0;
    for (std::size_t i = 1; i < res.cells.size(); ++i) {
        if (res.cells[i].mean_word_acc > res.cells[res.best_cell].mean_word_acc) {
            res.best_cell = i;
        }
    }
    res.cells[res.best_cell].best = true;

    std::ofstream grid(fs::path(out_root) / "grid.csv", std::ios::binary | std::ios::trunc);
    if (!grid) {
        throw IoError("cannot write grid.csv in '" + out_root + "'");
    }
    grid << "alpha,beta,seed,word_acc,char_acc,final_loss\n";
    for (const auto& r : res.rows) {
        grid << fmt_double(r.alpha) << "," << fmt_double(r.beta) << "," << r.seed << ","
             << fmt_double(r.word_acc) << "," << fmt_double(r.char_acc) << ","
             << fmt_double(r.final_loss) << "\n";
    }

    std::ofstream sum(fs::path(out_root) / "summary.csv", std::ios::binary | std::ios::trunc);
    sum << "alpha,beta,mean_word_acc,std_word_acc,best\n";
    for (const auto& c : res.cells) {
        sum << fmt_double(c.alpha) << "," << fmt_double(c.beta) << ","
            << fmt_double(c.mean_word_acc) << "," << fmt_double(c.std_word_acc) << ","
            << (c.best ? 1 : 0) << "\n";
    }
    return res;
}

double select_beta(const std::string& metrics_csv) {
    const auto records = load_metrics(metrics_csv);
    std::vector<double> losses;
    for (const auto& r : records) {
        if (r.split == "train") losses.push_back(r.loss);
    }
    if (losses.empty()) {
        throw ContractError("select_beta: no train rows in '" + metrics_csv + "'");
    }
    const std::size_t tail = std::max<std::size_t>(1, losses.size() / 10);
    double mean = 0.0;
    for (std::size_t i = losses.size() - tail; i < losses.size(); ++i) mean += losses[i];
    mean /= static_cast<double>(tail);
    return 0.9 * mean;
}

}  // namespace teachlab
