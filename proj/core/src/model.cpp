#include "teachlab/model.hpp"

#include <cmath>
#include <unordered_map>

#include "teachlab/errors.hpp"
#include "teachlab/ops.hpp"
#include "teachlab/rng.hpp"

namespace teachlab {

DecoderKind decoder_kind_from_string(const std::string& s) {
    if (s == "linear_head") return DecoderKind::linear_head;
    if (s == "ar_decoder") return DecoderKind::ar_decoder;
    throw ContractError("unknown decoder kind '" + s + "'");
}

std::string decoder_kind_to_string(DecoderKind k) {
    return k == DecoderKind::linear_head ? "linear_head" : "ar_decoder";
}

InjectionMode injection_mode_from_string(const std::string& s) {
    if (s == "pad") return InjectionMode::pad;
    if (s == "none") return InjectionMode::none;
    throw ContractError("unknown injection mode '" + s + "'");
}

void ModelConfig::validate() const {
    if (patch_size == 0 || H % patch_size != 0 || W % patch_size != 0) {
        throw ContractError("model: image " + std::to_string(H) + "x" + std::to_string(W) +
                            " not divisible by patch size " + std::to_string(patch_size));
    }
    if (encoder_heads == 0 || decoder_heads == 0 || E_s % encoder_heads != 0 ||
        E_s % decoder_heads != 0) {
        throw ContractError("model: E_s must be divisible by the head counts");
    }
    if (S < 3) {
        throw ContractError("model: S must be >= 3 to hold [S] and [E]");
    }
    if (vocab_size < 4) {
        throw ContractError("model: vocab must cover the specials plus one character");
    }
}

namespace {

struct Builder {
    Rng rng;
    std::vector<Parameter>* out;

    void weight(const std::string& name, Shape shape) {
        Tensor t = Tensor::zeros(shape, true);
        auto d = t.data_mut();
        for (auto& v : d) v = 0.02 * rng.normal_trunc2();
        push(name, std::move(t));
    }
    void zeros(const std::string& name, Shape shape) {
        push(name, Tensor::zeros(std::move(shape), true));
    }
    void ones(const std::string& name, Shape shape) {
        push(name, Tensor::full(std::move(shape), 1.0, true));
    }
    void push(const std::string& name, Tensor t) {
        validate_param_name(name);
        out->push_back(Parameter{name, std::move(t)});
    }

    void attn(const std::string& prefix, std::size_t e) {
        weight(prefix + ".wq", {e, e});
        zeros(prefix + ".bq", {e});
        weight(prefix + ".wk", {e, e});
        zeros(prefix + ".bk", {e});
        weight(prefix + ".wv", {e, e});
        zeros(prefix + ".bv", {e});
        weight(prefix + ".wo", {e, e});
        zeros(prefix + ".bo", {e});
    }
    void ln(const std::string& prefix, std::size_t e) {
        ones(prefix + ".g", {e});
        zeros(prefix + ".b", {e});
    }
    void mlp(const std::string& prefix, std::size_t e) {
        weight(prefix + ".w1", {e, 4 * e});
        zeros(prefix + ".b1", {4 * e});
        weight(prefix + ".w2", {4 * e, e});
        zeros(prefix + ".b2", {e});
    }
};

}  // namespace

ModelBundle ModelBundle::init(const ModelConfig& cfg) {
    cfg.validate();
    ModelBundle m;
    m.config = cfg;
    Builder b{Rng(derive_seed(cfg.seed, "init")), &m.params};

    const std::size_t e = cfg.E_s;
    const std::size_t l = cfg.num_patches();

    b.weight("encoder.patch.w", {cfg.patch_size * cfg.patch_size, e});
    b.zeros("encoder.patch.b", {e});
    b.weight("encoder.pos", {l, e});
    for (std::size_t i = 0; i < cfg.encoder_depth; ++i) {
        const std::string p = "encoder.block" + std::to_string(i);
        b.ln(p + ".ln1", e);
        b.attn(p + ".attn", e);
        b.ln(p + ".ln2", e);
        b.mlp(p + ".mlp", e);
    }

    b.weight("text.table", {cfg.vocab_size, e});
    b.weight("text.pos", {cfg.S, e});
    b.zeros("pad.vec", {e});

    if (cfg.decoder_kind == DecoderKind::linear_head) {
        b.weight("decoder.pos", {l + cfg.S, e});
        for (std::size_t i = 0; i < cfg.decoder_depth; ++i) {
            const std::string p = "decoder.block" + std::to_string(i);
            b.ln(p + ".ln1", e);
            b.attn(p + ".attn", e);
            b.ln(p + ".ln2", e);
            b.mlp(p + ".mlp", e);
        }
    } else {
        for (std::size_t i = 0; i < cfg.decoder_depth; ++i) {
            const std::string p = "decoder.block" + std::to_string(i);
            b.ln(p + ".ln1", e);
            b.attn(p + ".self", e);
            b.ln(p + ".ln2", e);
            b.attn(p + ".cross", e);
            b.ln(p + ".ln3", e);
            b.mlp(p + ".mlp", e);
        }
    }
    b.ln("decoder.lnf", e);
    b.weight("head.w", {e, cfg.vocab_size});
    b.zeros("head.b", {cfg.vocab_size});
    return m;
}

const Tensor& ModelBundle::param(const std::string& name) const {
    for (const auto& p : params) {
        if (p.name == name) return p.tensor;
    }
    throw ContractError("no parameter named '" + name + "'");
}

bool ModelBundle::has_param(const std::string& name) const {
    for (const auto& p : params) {
        if (p.name == name) return true;
    }
    return false;
}

std::size_t ModelBundle::scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params) n += p.tensor.numel();
    return n;
}

std::vector<Parameter> ModelBundle::trainable(bool freeze_encoder, bool pad_learnable) const {
    std::vector<Parameter> out;
    for (const auto& p : params) {
        if (freeze_encoder && p.name.rfind("encoder.", 0) == 0) continue;
        if (!pad_learnable && p.name == "pad.vec") continue;
        out.push_back(p);
    }
    return out;
}

namespace {

struct AttnRef {
    const Tensor &wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo;
};

AttnRef attn_ref(const ModelBundle& m, const std::string& prefix) {
    return AttnRef{m.param(prefix + ".wq"), m.param(prefix + ".bq"), m.param(prefix + ".wk"),
                   m.param(prefix + ".bk"), m.param(prefix + ".wv"), m.param(prefix + ".bv"),
                   m.param(prefix + ".wo"), m.param(prefix + ".bo")};
}

using namespace ops;

Tensor mha(const Tensor& q_in, const Tensor& kv_in, const AttnRef& w, std::size_t heads,
           bool causal) {
    const std::size_t b = q_in.shape()[0];
    const std::size_t tq = q_in.shape()[1];
    const std::size_t tk = kv_in.shape()[1];
    const std::size_t e = q_in.shape()[2];
    const std::size_t d = e / heads;

    Tensor q = add(matmul(q_in, w.wq), w.bq);
    Tensor k = add(matmul(kv_in, w.wk), w.bk);
    Tensor v = add(matmul(kv_in, w.wv), w.bv);

    Tensor qh = transpose(reshape(q, {b, tq, heads, d}), 1, 2);
    Tensor kh = transpose(reshape(k, {b, tk, heads, d}), 1, 2);
    Tensor vh = transpose(reshape(v, {b, tk, heads, d}), 1, 2);

    Tensor scores = scale(matmul(qh, kh, /*transb=*/true), 1.0 / std::sqrt(static_cast<double>(d)));
    Tensor probs = softmax(scores, causal);
    Tensor ctx = matmul(probs, vh);
    Tensor merged = reshape(transpose(ctx, 1, 2), {b, tq, e});
    return add(matmul(merged, w.wo), w.bo);
}

Tensor ln_of(const ModelBundle& m, const std::string& prefix, const Tensor& x) {
    return layer_norm(x, m.param(prefix + ".g"), m.param(prefix + ".b"));
}

Tensor mlp_of(const ModelBundle& m, const std::string& prefix, const Tensor& x) {
    Tensor h = gelu(add(matmul(x, m.param(prefix + ".w1")), m.param(prefix + ".b1")));
    return add(matmul(h, m.param(prefix + ".w2")), m.param(prefix + ".b2"));
}

// pre-LN block: x + attn(ln1(x)), then x + mlp(ln2(x))
Tensor encoder_style_block(const ModelBundle& m, const std::string& p, Tensor x,
                           std::size_t heads) {
    const Tensor n1 = ln_of(m, p + ".ln1", x);
    x = add(mha(n1, n1, attn_ref(m, p + ".attn"), heads, false), x);
    x = add(mlp_of(m, p + ".mlp", ln_of(m, p + ".ln2", x)), x);
    return x;
}

}  // namespace

Tensor encode_image(const ModelBundle& m, const Tensor& images) {
    const ModelConfig& c = m.config;
    if (images.rank() != 3 || images.shape()[1] != c.H || images.shape()[2] != c.W) {
        throw ContractError("encode_image: expected Bx" + std::to_string(c.H) + "x" +
                            std::to_string(c.W) + ", got " + shape_str(images.shape()));
    }
    for (double v : images.data()) {
        if (v < 0.0 || v > 1.0) {
            throw ContractError("encode_image: pixels must be normalized to [0,1]");
        }
    }
    Tensor x = image_to_patches(images, c.patch_size, c.patch_size);
    x = add(matmul(x, m.param("encoder.patch.w")), m.param("encoder.patch.b"));
    x = add(x, m.param("encoder.pos"));
    for (std::size_t i = 0; i < c.encoder_depth; ++i) {
        x = encoder_style_block(m, "encoder.block" + std::to_string(i), x, c.encoder_heads);
    }
    return x;
}

Tensor embed_labels_no_pos(const ModelBundle& m, const std::vector<int>& ids, std::size_t batch) {
    return ops::embedding_lookup(m.param("text.table"), ids, batch, m.config.S);
}

Tensor embed_labels(const ModelBundle& m, const std::vector<int>& ids, std::size_t batch) {
    return add(embed_labels_no_pos(m, ids, batch), m.param("text.pos"));
}

Tensor decode(const ModelBundle& m, const Tensor& visual, const Tensor& injected,
              const std::vector<int>& tgt_ids) {
    const ModelConfig& c = m.config;
    const std::size_t b = visual.shape()[0];
    if (visual.shape()[2] != c.E_s) {
        throw ContractError("decode: visual embedding dim " + shape_str(visual.shape()) +
                            " does not match E_s=" + std::to_string(c.E_s));
    }
    if (injected.defined()) {
        const Shape want{b, c.S, c.E_s};
        if (injected.shape() != want) {
            throw ContractError("decode: injected labels " + shape_str(injected.shape()) +
                                " vs expected " + shape_str(want));
        }
    }

    if (c.decoder_kind == DecoderKind::linear_head) {
        if (!injected.defined()) {
            throw ContractError(
                "decode: linear_head reads predictions from the label slots; injection 'none' is "
                "unsupported");
        }
        Tensor x = concat(visual, injected, 1);
        x = add(x, m.param("decoder.pos"));
        for (std::size_t i = 0; i < c.decoder_depth; ++i) {
            x = encoder_style_block(m, "decoder.block" + std::to_string(i), x, c.decoder_heads);
        }
        x = slice(x, 1, visual.shape()[1], visual.shape()[1] + c.S);
        x = ln_of(m, "decoder.lnf", x);
        return add(matmul(x, m.param("head.w")), m.param("head.b"));
    }

    // ar_decoder: teacher-forced stream over tgt_ids, memory = [F; X] or F
    if (tgt_ids.size() != b * c.S) {
        throw ContractError("decode: ar_decoder needs " + std::to_string(b * c.S) +
                            " tgt ids, got " + std::to_string(tgt_ids.size()));
    }
    Tensor memory = injected.defined() ? concat(visual, injected, 1) : visual;
    Tensor x = embed_labels(m, tgt_ids, b);
    for (std::size_t i = 0; i < c.decoder_depth; ++i) {
        const std::string p = "decoder.block" + std::to_string(i);
        const Tensor n1 = ln_of(m, p + ".ln1", x);
        x = add(mha(n1, n1, attn_ref(m, p + ".self"), c.decoder_heads, true), x);
        x = add(mha(ln_of(m, p + ".ln2", x), memory, attn_ref(m, p + ".cross"), c.decoder_heads,
                    false),
                x);
        x = add(mlp_of(m, p + ".mlp", ln_of(m, p + ".ln3", x)), x);
    }
    x = ln_of(m, "decoder.lnf", x);
    return add(matmul(x, m.param("head.w")), m.param("head.b"));
}

Tensor inference_injection(const ModelBundle& m, std::size_t batch, bool pad_positional) {
    Tensor block = ops::tile_rows(m.param("pad.vec"), batch, m.config.S);
    if (pad_positional) {
        block = ops::add(block, m.param("text.pos"));
    }
    return block;
}

Tensor inference_logits(const ModelBundle& m, const Tensor& images, InjectionMode mode,
                        bool pad_positional) {
    if (m.config.decoder_kind != DecoderKind::linear_head) {
        throw ContractError("inference_logits: single-pass logits exist only for linear_head");
    }
    if (mode == InjectionMode::none) {
        throw ContractError("predict: injection 'none' is unsupported for linear_head");
    }
    Tensor visual = encode_image(m, images);
    return decode(m, visual, inference_injection(m, images.shape()[0], pad_positional));
}

namespace {

std::vector<int> argmax_rows(const Tensor& logits) {
    const std::size_t rows = logits.shape()[0] * logits.shape()[1];
    const std::size_t v = logits.shape()[2];
    const auto d = logits.data();
    std::vector<int> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* x = d.data() + r * v;
        std::size_t best = 0;
        for (std::size_t j = 1; j < v; ++j) {
            if (x[j] > x[best]) best = j;
        }
        out[r] = static_cast<int>(best);
    }
    return out;
}

}  // namespace

std::vector<std::string> predict(const ModelBundle& m, const Tensor& images, InjectionMode mode,
                                 const Alphabet& alphabet, bool pad_positional) {
    const ModelConfig& c = m.config;
    const std::size_t b = images.shape()[0];

    if (c.decoder_kind == DecoderKind::linear_head) {
        const Tensor logits = inference_logits(m, images, mode, pad_positional);
        const std::vector<int> ids = argmax_rows(logits);
        std::vector<std::string> out(b);
        for (std::size_t i = 0; i < b; ++i) {
            out[i] = decode_ids(std::span(ids).subspan(i * c.S, c.S), alphabet);
        }
        return out;
    }

    // greedy autoregressive decode; future positions hold [P], which the
    // causal mask keeps invisible
    Tensor visual = encode_image(m, images);
    Tensor injected;
    if (mode == InjectionMode::pad) {
        injected = inference_injection(m, b, pad_positional);
    }
    std::vector<int> ids(b * c.S, Alphabet::kPad);
    std::vector<bool> done(b, false);
    for (std::size_t i = 0; i < b; ++i) ids[i * c.S] = Alphabet::kStart;
    for (std::size_t t = 0; t + 1 < c.S; ++t) {
        const Tensor logits = decode(m, visual, injected, ids);
        const auto d = logits.data();
        const std::size_t v = c.vocab_size;
        bool all_done = true;
        for (std::size_t i = 0; i < b; ++i) {
            if (done[i]) continue;
            const double* x = d.data() + (i * c.S + t) * v;
            std::size_t best = 0;
            for (std::size_t j = 1; j < v; ++j) {
                if (x[j] > x[best]) best = j;
            }
            ids[i * c.S + t + 1] = static_cast<int>(best);
            if (static_cast<int>(best) == Alphabet::kEnd) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if (all_done) break;
    }
    std::vector<std::string> out(b);
    for (std::size_t i = 0; i < b; ++i) {
        // skip the leading [S]
        out[i] = decode_ids(std::span(ids).subspan(i * c.S + 1, c.S - 1), alphabet);
    }
    return out;
}

}  // namespace teachlab
