#include "teachlab/gradcheck.hpp"

#include <cmath>
#include <functional>

#include "teachlab/model.hpp"
#include "teachlab/ops.hpp"
#include "teachlab/rng.hpp"
#include "teachlab/schedule.hpp"
#include "teachlab/tensor.hpp"

namespace teachlab {

namespace {

constexpr double kH = 1e-5;

Tensor rand_tensor(Shape shape, Rng& rng, bool requires_grad = true, double scale = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    for (auto& v : t.data_mut()) v = scale * (2.0 * rng.uniform() - 1.0);
    return t;
}

// Compares reverse-mode gradients of loss_fn against central differences for
// every element of every leaf.
void check_case(GradCheckReport& rep, const std::string& name, std::vector<Tensor> leaves,
                const std::function<Tensor()>& loss_fn) {
    for (auto& l : leaves) l.zero_grad();
    backward(loss_fn());

    double worst = 0.0;
    for (auto& leaf : leaves) {
        auto vals = leaf.data_mut();
        auto grads = leaf.grad();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double keep = vals[i];
            vals[i] = keep + kH;
            const double fp = loss_fn().item();
            vals[i] = keep - kH;
            const double fm = loss_fn().item();
            vals[i] = keep;
            const double fd = (fp - fm) / (2.0 * kH);
            const double ad = grads[i];
            const double rel = std::abs(ad - fd) / std::max({std::abs(ad), std::abs(fd), 1.0});
            worst = std::max(worst, rel);
        }
    }
    rep.cases.push_back({name, worst});
    if (worst > rep.max_rel_err) {
        rep.max_rel_err = worst;
        rep.worst_case = name;
    }
}

// Weighted sum gives a scalar loss with non-degenerate output gradients.
Tensor weighted(const Tensor& out, const Tensor& w) { return ops::sum(ops::mul(out, w)); }

void op_cases(GradCheckReport& rep, Rng& rng) {
    using namespace ops;
    {
        Tensor a = rand_tensor({2, 3, 4}, rng), b = rand_tensor({2, 3, 4}, rng);
        Tensor w = rand_tensor({2, 3, 4}, rng, false);
        check_case(rep, "add", {a, b}, [&] { return weighted(add(a, b), w); });
    }
    {
        Tensor a = rand_tensor({2, 3, 4}, rng), b = rand_tensor({4}, rng);
        Tensor w = rand_tensor({2, 3, 4}, rng, false);
        check_case(rep, "add_bias", {a, b}, [&] { return weighted(add(a, b), w); });
    }
    {
        Tensor a = rand_tensor({3, 5}, rng), b = rand_tensor({3, 5}, rng);
        Tensor w = rand_tensor({3, 5}, rng, false);
        check_case(rep, "mul", {a, b}, [&] { return weighted(mul(a, b), w); });
    }
    {
        Tensor a = rand_tensor({2, 6}, rng);
        Tensor w = rand_tensor({2, 6}, rng, false);
        check_case(rep, "scale", {a}, [&] { return weighted(scale(a, -1.7), w); });
    }
    {
        Tensor a = rand_tensor({3, 4}, rng), b = rand_tensor({4, 2}, rng);
        Tensor w = rand_tensor({3, 2}, rng, false);
        check_case(rep, "matmul_2d", {a, b}, [&] { return weighted(matmul(a, b), w); });
    }
    {
        Tensor a = rand_tensor({2, 3, 4}, rng), b = rand_tensor({4, 5}, rng);
        Tensor w = rand_tensor({2, 3, 5}, rng, false);
        check_case(rep, "matmul_shared_rhs", {a, b}, [&] { return weighted(matmul(a, b), w); });
    }
    {
        Tensor a = rand_tensor({2, 3, 4}, rng), b = rand_tensor({2, 4, 5}, rng);
        Tensor w = rand_tensor({2, 3, 5}, rng, false);
        check_case(rep, "matmul_batched", {a, b}, [&] { return weighted(matmul(a, b), w); });
    }
    {
        Tensor a = rand_tensor({2, 3, 4}, rng), b = rand_tensor({2, 5, 4}, rng);
        Tensor w = rand_tensor({2, 3, 5}, rng, false);
        check_case(rep, "matmul_transb", {a, b},
                   [&] { return weighted(matmul(a, b, true), w); });
    }
    {
        Tensor a = rand_tensor({2, 5, 4}, rng), b = rand_tensor({5, 4}, rng);
        Tensor w = rand_tensor({2, 5, 5}, rng, false);
        check_case(rep, "matmul_transb_shared", {a, b},
                   [&] { return weighted(matmul(a, b, true), w); });
    }
    {
        Tensor a = rand_tensor({2, 3, 4, 5}, rng);
        Tensor w = rand_tensor({2, 4, 3, 5}, rng, false);
        check_case(rep, "transpose_mid", {a}, [&] { return weighted(transpose(a, 1, 2), w); });
    }
    {
        Tensor a = rand_tensor({3, 4}, rng);
        Tensor w = rand_tensor({4, 3}, rng, false);
        check_case(rep, "transpose_last", {a}, [&] { return weighted(transpose(a, 0, 1), w); });
    }
    {
        Tensor a = rand_tensor({2, 6}, rng);
        Tensor w = rand_tensor({3, 4}, rng, false);
        check_case(rep, "reshape", {a}, [&] { return weighted(reshape(a, {3, 4}), w); });
    }
    {
        Tensor a = rand_tensor({2, 4}, rng), b = rand_tensor({3, 4}, rng);
        Tensor w = rand_tensor({5, 4}, rng, false);
        check_case(rep, "concat_axis0", {a, b}, [&] { return weighted(concat(a, b, 0), w); });
    }
    {
        Tensor a = rand_tensor({2, 2, 3}, rng), b = rand_tensor({2, 4, 3}, rng);
        Tensor w = rand_tensor({2, 6, 3}, rng, false);
        check_case(rep, "concat_axis1", {a, b}, [&] { return weighted(concat(a, b, 1), w); });
    }
    {
        Tensor a = rand_tensor({2, 6, 3}, rng);
        Tensor w = rand_tensor({2, 3, 3}, rng, false);
        check_case(rep, "slice", {a}, [&] { return weighted(slice(a, 1, 2, 5), w); });
    }
    {
        Tensor a = rand_tensor({3, 6}, rng, true, 2.0);
        Tensor w = rand_tensor({3, 6}, rng, false);
        check_case(rep, "softmax", {a}, [&] { return weighted(softmax(a), w); });
    }
    {
        Tensor a = rand_tensor({2, 2, 4, 4}, rng, true, 2.0);
        Tensor w = rand_tensor({2, 2, 4, 4}, rng, false);
        check_case(rep, "softmax_causal", {a}, [&] { return weighted(softmax(a, true), w); });
    }
    {
        Tensor x = rand_tensor({2, 3, 6}, rng);
        Tensor g = rand_tensor({6}, rng), b = rand_tensor({6}, rng);
        Tensor w = rand_tensor({2, 3, 6}, rng, false);
        check_case(rep, "layer_norm", {x, g, b},
                   [&] { return weighted(layer_norm(x, g, b), w); });
    }
    {
        Tensor x = rand_tensor({4, 5}, rng, true, 3.0);
        Tensor w = rand_tensor({4, 5}, rng, false);
        check_case(rep, "gelu", {x}, [&] { return weighted(gelu(x), w); });
    }
    {
        Tensor table = rand_tensor({7, 4}, rng);
        const std::vector<int> ids = {0, 3, 6, 3, 1, 2};
        Tensor w = rand_tensor({2, 3, 4}, rng, false);
        check_case(rep, "embedding_lookup", {table},
                   [&] { return weighted(embedding_lookup(table, ids, 2, 3), w); });
    }
    {
        Tensor img = rand_tensor({2, 4, 6}, rng);
        Tensor w = rand_tensor({2, 6, 4}, rng, false);
        check_case(rep, "image_to_patches", {img},
                   [&] { return weighted(image_to_patches(img, 2, 2), w); });
    }
    {
        Tensor a = rand_tensor({2, 3}, rng);
        check_case(rep, "sum", {a}, [&] { return ops::sum(a); });
    }
    {
        Tensor a = rand_tensor({2, 3}, rng);
        check_case(rep, "mean", {a}, [&] { return ops::mean(a); });
    }
    {
        Tensor logits = rand_tensor({2, 3, 5}, rng, true, 2.0);
        const std::vector<int> targets = {3, 2, 0, 4, 2, 0};  // includes ignored pads
        check_case(rep, "cross_entropy", {logits},
                   [&] { return cross_entropy(logits, targets, true); });
    }
    {
        Tensor x = rand_tensor({2, 4, 3}, rng);
        Tensor pad = rand_tensor({3}, rng);
        const std::vector<std::uint8_t> keep = {1, 0, 1, 0, 0, 1, 0, 1};
        Tensor w = rand_tensor({2, 4, 3}, rng, false);
        check_case(rep, "mask_rows", {x, pad},
                   [&] { return weighted(mask_rows(x, pad, keep), w); });
    }
    {
        Tensor pad = rand_tensor({5}, rng);
        Tensor w = rand_tensor({2, 3, 5}, rng, false);
        check_case(rep, "tile_rows", {pad}, [&] { return weighted(tile_rows(pad, 2, 3), w); });
    }
}

void model_case(GradCheckReport& rep, Rng& rng, DecoderKind kind) {
    ModelConfig cfg;
    cfg.H = 8;
    cfg.W = 8;
    cfg.patch_size = 4;
    cfg.E_s = 8;
    cfg.encoder_depth = 1;
    cfg.encoder_heads = 2;
    cfg.decoder_kind = kind;
    cfg.decoder_depth = 1;
    cfg.decoder_heads = 2;
    cfg.S = 4;
    cfg.vocab_size = 7;
    cfg.seed = rng.next_u64();
    ModelBundle m = ModelBundle::init(cfg);

    const std::size_t b = 2;
    Tensor images = Tensor::zeros({b, cfg.H, cfg.W});
    for (auto& v : images.data_mut()) v = rng.uniform();

    // fixed fused forward: mask half the label slots
    const std::vector<int> ids = {1, 4, 5, 2, 1, 6, 2, 0};
    const std::vector<int> targets = {4, 5, 2, 0, 6, 2, 0, 0};
    const std::vector<std::uint8_t> keep = {1, 0, 1, 0, 0, 1, 1, 0};

    std::vector<Tensor> leaves;
    for (auto& p : m.params) leaves.push_back(p.tensor);

    auto loss_fn = [&] {
        Tensor visual = encode_image(m, images);
        Tensor emb = embed_labels(m, ids, b);
        Tensor injected = ops::mask_rows(emb, m.param("pad.vec"), keep);
        Tensor logits = decode(m, visual, injected, ids);
        return ops::cross_entropy(logits, targets, true);
    };
    check_case(rep, std::string("model_") + decoder_kind_to_string(kind), leaves, loss_fn);
}

}  // namespace

GradCheckReport run_gradcheck(std::uint64_t seed) {
    GradCheckReport rep;
    Rng rng(derive_seed(seed, "gradcheck"));
    op_cases(rep, rng);
    model_case(rep, rng, DecoderKind::linear_head);
    model_case(rep, rng, DecoderKind::ar_decoder);
    return rep;
}

}  // namespace teachlab
