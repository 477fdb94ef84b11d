#include "teachlab/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "teachlab/errors.hpp"
#include "teachlab/ops.hpp"

namespace teachlab {

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "loss_aware") return ScheduleKind::loss_aware;
    if (s == "linear") return ScheduleKind::linear;
    if (s == "constant") return ScheduleKind::constant;
    if (s == "none") return ScheduleKind::none;
    throw ContractError("unknown schedule kind '" + s + "'");
}

std::string schedule_kind_to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::loss_aware: return "loss_aware";
        case ScheduleKind::linear: return "linear";
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::none: return "none";
    }
    throw ContractError("invalid schedule kind");
}

void ScheduleParams::validate() const {
    switch (kind) {
        case ScheduleKind::loss_aware:
            if (alpha <= 0.0) throw ContractError("schedule: alpha must be > 0");
            if (beta < 0.0) throw ContractError("schedule: beta must be >= 0");
            if (loss_smoothing < 0.0 || loss_smoothing >= 1.0) {
                throw ContractError("schedule: loss_smoothing must be in [0,1)");
            }
            break;
        case ScheduleKind::linear:
            if (total_mask_steps == 0) {
                throw ContractError("schedule: total_mask_steps must be positive");
            }
            break;
        case ScheduleKind::constant:
            if (constant_r < 0.0 || constant_r > 1.0) {
                throw ContractError("schedule: constant_r must be in [0,1]");
            }
            break;
        case ScheduleKind::none:
            break;
    }
}

double compute_keep_ratio(ScheduleState& state, const ScheduleParams& params,
                          std::optional<double> observed_loss) {
    if (observed_loss && (*observed_loss < 0.0 || !std::isfinite(*observed_loss))) {
        throw ContractError("compute_keep_ratio: observed loss must be finite and >= 0");
    }
    double r = 0.0;
    switch (params.kind) {
        case ScheduleKind::loss_aware: {
            if (!observed_loss) {
                r = 1.0;  // initial stage: inject the full label embedding
            } else {
                double level = *observed_loss;
                if (params.loss_smoothing > 0.0) {
                    if (state.smoothed_loss) {
                        level = params.loss_smoothing * *state.smoothed_loss +
                                (1.0 - params.loss_smoothing) * *observed_loss;
                    }
                    state.smoothed_loss = level;
                }
                r = std::clamp(params.alpha * (level - params.beta), 0.0, 1.0);
            }
            break;
        }
        case ScheduleKind::linear: {
            const double frac = static_cast<double>(state.step) /
                                static_cast<double>(params.total_mask_steps);
            r = std::max(0.0, 1.0 - frac);
            break;
        }
        case ScheduleKind::constant:
            r = params.constant_r;
            break;
        case ScheduleKind::none:
            r = 0.0;
            break;
    }
    if (observed_loss) {
        state.last_loss = observed_loss;
    }
    state.keep_ratio = r;
    ++state.step;
    return r;
}

void record_loss(ScheduleState& state, double loss) {
    if (loss < 0.0 || !std::isfinite(loss)) {
        throw ContractError("record_loss: loss must be finite and >= 0");
    }
    state.last_loss = loss;
}

std::size_t keep_count(double r, std::size_t seq_len) {
    if (r < 0.0 || r > 1.0) {
        throw ContractError("keep_count: r must be in [0,1]");
    }
    const long long k = std::llround(r * static_cast<double>(seq_len));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(seq_len)));
}

TokenMask draw_mask(double r, std::size_t batch, std::size_t seq_len, std::uint64_t seed,
                    MaskMode mode, KeepPattern pattern) {
    const std::size_t k = keep_count(r, seq_len);
    TokenMask mask;
    mask.keep_ratio_used = r;
    mask.rng_seed_used = seed;
    mask.bits.assign(batch * seq_len, 0);

    Rng rng(seed);
    auto fill_row = [&](std::size_t row, const std::vector<std::uint32_t>& kept) {
        for (auto p : kept) {
            mask.bits[row * seq_len + p] = 1;
        }
    };

    if (k == seq_len) {
        std::fill(mask.bits.begin(), mask.bits.end(), 1);
        return mask;
    }
    if (k == 0) {
        return mask;
    }
    if (pattern == KeepPattern::prefix) {
        for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t p = 0; p < k; ++p) mask.bits[b * seq_len + p] = 1;
        }
        return mask;
    }
    if (mode == MaskMode::shared) {
        const auto kept = rng.sample_without_replacement(static_cast<std::uint32_t>(seq_len),
                                                         static_cast<std::uint32_t>(k));
        for (std::size_t b = 0; b < batch; ++b) fill_row(b, kept);
    } else {
        for (std::size_t b = 0; b < batch; ++b) {
            fill_row(b, rng.sample_without_replacement(static_cast<std::uint32_t>(seq_len),
                                                       static_cast<std::uint32_t>(k)));
        }
    }
    return mask;
}

InjectionResult build_injection(const ModelBundle& m, const std::vector<int>& ids,
                                std::size_t batch, double r, std::uint64_t mask_seed,
                                const ScheduleParams& params) {
    const std::size_t s = m.config.S;
    InjectionResult res;
    res.mask = draw_mask(r, batch, s, mask_seed, params.mask_mode, params.keep_pattern);
    const std::size_t k = keep_count(r, s);

    const Tensor& pad = m.param("pad.vec");
    if (k == 0) {
        // Eq.-6 stage: label input fully removed; matches the inference path
        res.injected = ops::tile_rows(pad, batch, s);
        if (params.pad_positional) {
            res.injected = ops::add(res.injected, m.param("text.pos"));
        }
        return res;
    }
    if (k == s) {
        res.injected = embed_labels(m, ids, batch);  // identity, Eq.-2 stage
        return res;
    }
    if (params.pad_positional) {
        Tensor lookup = embed_labels_no_pos(m, ids, batch);
        res.injected = ops::add(ops::mask_rows(lookup, pad, res.mask.bits), m.param("text.pos"));
    } else {
        Tensor emb = embed_labels(m, ids, batch);
        res.injected = ops::mask_rows(emb, pad, res.mask.bits);
    }
    return res;
}

}  // namespace teachlab
