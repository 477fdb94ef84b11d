#pragma once

#include <cstdint>
#include <vector>

#include "teachlab/tensor.hpp"

namespace teachlab::ops {

// Forward semantics are standard; every op registers a reverse-mode node and
// raises ContractError on shape mismatch (message carries both shapes) or on
// a non-finite forward output. Broadcasting is limited to the bias-add
// pattern: b's shape must be a trailing suffix of a's shape.

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

/// a: (..., M, K). b 2D is shared across batches; b batched must carry the
/// same leading dims as a. With transb, b holds (..., N, K) and is used
/// transposed.
Tensor matmul(const Tensor& a, const Tensor& b, bool transb = false);

Tensor transpose(const Tensor& a, std::size_t ax1, std::size_t ax2);
Tensor reshape(const Tensor& a, Shape new_shape);
Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t end);

/// Softmax over the last axis. With causal=true the input must be
/// (..., Tq, Tk), Tq <= Tk; query i sees keys j <= i + (Tk - Tq).
Tensor softmax(const Tensor& a, bool causal = false);

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
Tensor gelu(const Tensor& x);

/// table: V x E; ids: B*S entries in [0, V). Output B x S x E.
Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids, std::size_t batch,
                        std::size_t seq_len);

/// images: B x H x W -> B x L x (ph*pw), patches row-major over the grid.
Tensor image_to_patches(const Tensor& images, std::size_t ph, std::size_t pw);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Mean NLL over counted positions of logits (B x S x V) vs. target ids
/// (B*S). With ignore_pad, positions whose target equals pad_id are excluded
/// from numerator and denominator.
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& targets, bool ignore_pad,
                     int pad_id = 0);

/// x: B x S x E, pad: E, keep: B*S flags. Rows with keep=1 pass through; the
/// others are replaced wholesale by the pad vector. Gradient flows through
/// kept rows and into pad at masked rows.
Tensor mask_rows(const Tensor& x, const Tensor& pad, const std::vector<std::uint8_t>& keep);

/// pad vector tiled to B x S x E; gradient sums back into pad.
Tensor tile_rows(const Tensor& pad, std::size_t batch, std::size_t seq_len);

}  // namespace teachlab::ops
