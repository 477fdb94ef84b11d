#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teachlab/model.hpp"
#include "teachlab/rng.hpp"
#include "teachlab/tensor.hpp"

namespace teachlab {

// r is the KEEP ratio throughout: the fraction of label slots whose true
// embedding is injected. The masked fraction is 1 - r.

enum class ScheduleKind { loss_aware, linear, constant, none };

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string schedule_kind_to_string(ScheduleKind k);

enum class MaskMode { per_sample, shared };
enum class KeepPattern { random, prefix };

struct ScheduleParams {
    ScheduleKind kind = ScheduleKind::loss_aware;
    double alpha = 2.0;                     // sensitivity, > 0
    double beta = 0.1;                      // loss threshold, >= 0
    std::uint64_t total_mask_steps = 1000;  // linear kind
    double constant_r = 0.0;                // constant kind
    double loss_smoothing = 0.0;            // EMA coefficient, 0 = raw previous loss

    // documented extras beyond the core schedule fields
    MaskMode mask_mode = MaskMode::per_sample;
    KeepPattern keep_pattern = KeepPattern::random;
    bool pad_positional = false;  // keep text positions at masked slots
    bool pad_learnable = true;

    void validate() const;
};

struct ScheduleState {
    std::uint64_t step = 0;
    std::optional<double> last_loss;
    std::optional<double> smoothed_loss;
    double keep_ratio = 1.0;
};

/// One keep-ratio decision. loss_aware: r = clamp(alpha*(L - beta), 0, 1)
/// from the previous batch's (optionally EMA-smoothed) loss, r = 1 before the
/// first observation. linear: r = max(0, 1 - step/total_mask_steps).
/// constant: r = constant_r; none: r = 0. Advances state.step and records
/// the observation.
double compute_keep_ratio(ScheduleState& state, const ScheduleParams& params,
                          std::optional<double> observed_loss);

/// Loss value stored for the next step's ratio decision.
void record_loss(ScheduleState& state, double loss);

struct TokenMask {
    std::vector<std::uint8_t> bits;  // B*S, 1 = keep
    double keep_ratio_used = 1.0;
    std::uint64_t rng_seed_used = 0;
};

/// round(r*S), half away from zero.
std::size_t keep_count(double r, std::size_t seq_len);

/// Per sample (or shared across the batch), exactly keep_count positions
/// keep their embedding; the selection is uniform without replacement for
/// the random pattern, or the leading positions for prefix keep.
TokenMask draw_mask(double r, std::size_t batch, std::size_t seq_len, std::uint64_t seed,
                    MaskMode mode, KeepPattern pattern);

struct InjectionResult {
    Tensor injected;  // B x S x E_s
    TokenMask mask;
};

/// Eq.-4-style injection: kept rows pass the label embedding through, masked
/// rows are replaced by the pad vector (plus text positions when
/// pad_positional). r=1 passes the embedding tensor through untouched; r=0
/// never touches the embedding table at all.
InjectionResult build_injection(const ModelBundle& m, const std::vector<int>& ids,
                                std::size_t batch, double r, std::uint64_t mask_seed,
                                const ScheduleParams& params);

}  // namespace teachlab
