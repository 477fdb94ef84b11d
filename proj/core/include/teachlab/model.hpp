#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "teachlab/alphabet.hpp"
#include "teachlab/tensor.hpp"

namespace teachlab {

enum class DecoderKind { linear_head, ar_decoder };

DecoderKind decoder_kind_from_string(const std::string& s);
std::string decoder_kind_to_string(DecoderKind k);

struct ModelConfig {
    std::size_t H = 32;
    std::size_t W = 128;
    std::size_t patch_size = 8;
    std::size_t E_s = 64;
    std::size_t encoder_depth = 2;
    std::size_t encoder_heads = 4;
    DecoderKind decoder_kind = DecoderKind::linear_head;
    std::size_t decoder_depth = 2;
    std::size_t decoder_heads = 4;
    std::size_t S = 10;
    std::size_t vocab_size = 39;
    std::uint64_t seed = 0;

    std::size_t num_patches() const { return (H / patch_size) * (W / patch_size); }
    void validate() const;
};

/// All named parameters of one model. Construction order is fixed, so two
/// bundles built from the same config and seed are bit-identical.
struct ModelBundle {
    ModelConfig config;
    std::vector<Parameter> params;

    static ModelBundle init(const ModelConfig& cfg);

    const Tensor& param(const std::string& name) const;
    bool has_param(const std::string& name) const;

    /// Total scalar count over all parameters.
    std::size_t scalar_count() const;

    /// Parameters the optimizer may update. The encoder can be frozen; a
    /// non-learnable pad vector stays at its zero init.
    std::vector<Parameter> trainable(bool freeze_encoder, bool pad_learnable) const;
};

/// Patch embedding + learned positional embeddings + transformer blocks.
/// Output B x L x E_s. Pixels must already be normalized to [0,1].
Tensor encode_image(const ModelBundle& m, const Tensor& images);

/// Token lookup plus positional embedding; [P] positions pass through the
/// table like any other id (masking is the curriculum's job).
Tensor embed_labels(const ModelBundle& m, const std::vector<int>& ids, std::size_t batch);

/// Token lookup only, without positional embedding (used when masking is
/// configured to retain positions at padded slots).
Tensor embed_labels_no_pos(const ModelBundle& m, const std::vector<int>& ids, std::size_t batch);

/// Fused decoding. linear_head: full self-attention over [F; X] with logits
/// read from the last S positions. ar_decoder: causal self-attention over the
/// embedded tgt_ids with cross-attention over memory = [F; X] (or F alone
/// when injected is undefined); tgt_ids are required for this kind.
Tensor decode(const ModelBundle& m, const Tensor& visual, const Tensor& injected,
              const std::vector<int>& tgt_ids = {});

enum class InjectionMode { pad, none };

InjectionMode injection_mode_from_string(const std::string& s);

/// Label-free inference logits (single fused forward). linear_head only;
/// the ar_decoder needs the step-wise greedy loop in predict().
Tensor inference_logits(const ModelBundle& m, const Tensor& images, InjectionMode mode,
                        bool pad_positional = false);

/// Vision-only prediction. pad mode substitutes the full pad-vector block
/// for the label slots; none feeds only visual memory (ar_decoder only).
/// Decoding stops at the first [E].
std::vector<std::string> predict(const ModelBundle& m, const Tensor& images, InjectionMode mode,
                                 const Alphabet& alphabet, bool pad_positional = false);

/// Pad block as injected at inference: tiled pad vector, optionally with the
/// text positional embeddings on top.
Tensor inference_injection(const ModelBundle& m, std::size_t batch, bool pad_positional);

}  // namespace teachlab
