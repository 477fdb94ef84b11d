#include "teachlab/ops.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <utility>

#include "teachlab/errors.hpp"

namespace teachlab::ops {

namespace {

using detail::TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

// ---- dense kernels (row-major) ----

// C[M,N] += A[M,K] * B[K,N]
void kernel_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

// C[M,N] += A[M,K] * B[N,K]^T
void kernel_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                acc += arow[p] * brow[p];
            }
            crow[j] += acc;
        }
    }
}

// C[K,N] += A[M,K]^T * B[M,N]
void kernel_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            double* crow = c + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

void check_finite(const TensorNode& n) {
    for (double v : n.value) {
        if (!std::isfinite(v)) {
            throw ContractError(std::string("op '") + n.op + "' produced a non-finite value");
        }
    }
}

Tensor make_op(const char* name, Shape shape, std::vector<Tensor> parents,
               std::function<void(TensorNode&)> bw) {
    auto n = std::make_shared<TensorNode>();
    n->op = name;
    n->value.assign(shape_numel(shape), 0.0);
    n->shape = std::move(shape);
    bool rg = false;
    for (const auto& p : parents) {
        rg = rg || p.requires_grad();
        n->parents.push_back(p.node());
    }
    n->requires_grad = rg;
    if (rg) {
        n->backward_fn = std::move(bw);
    }
    return Tensor(std::move(n));
}

bool wants_grad(const NodePtr& p) { return p && p->requires_grad; }

void shape_must_match(const char* op, const Shape& a, const Shape& b) {
    if (a != b) {
        throw ContractError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                            shape_str(b));
    }
}

bool is_suffix(const Shape& small, const Shape& big) {
    if (small.size() > big.size()) return false;
    const std::size_t off = big.size() - small.size();
    for (std::size_t i = 0; i < small.size(); ++i) {
        if (small[i] != big[off + i]) return false;
    }
    return true;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    const bool same = (sa == sb);
    if (!same && !is_suffix(sb, sa)) {
        throw ContractError("add: shape mismatch " + shape_str(sa) + " vs " + shape_str(sb) +
                            " (b must equal a or be a trailing suffix)");
    }
    const std::size_t nb = shape_numel(sb);
    auto out = make_op("add", sa, {a, b}, [nb](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        const NodePtr& pb = n.parents[1];
        if (wants_grad(pa)) {
            pa->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i];
        }
        if (wants_grad(pb)) {
            pb->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) pb->grad[i % nb] += n.grad[i];
        }
    });
    auto v = out.node();
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < v->value.size(); ++i) {
        v->value[i] = da[i] + db[i % nb];
    }
    check_finite(*v);
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    shape_must_match("mul", a.shape(), b.shape());
    auto out = make_op("mul", a.shape(), {a, b}, [](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        const NodePtr& pb = n.parents[1];
        if (wants_grad(pa)) {
            pa->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i] * pb->value[i];
        }
        if (wants_grad(pb)) {
            pb->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) pb->grad[i] += n.grad[i] * pa->value[i];
        }
    });
    auto v = out.node();
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < v->value.size(); ++i) v->value[i] = da[i] * db[i];
    check_finite(*v);
    return out;
}

Tensor scale(const Tensor& a, double c) {
    auto out = make_op("scale", a.shape(), {a}, [c](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (wants_grad(pa)) {
            pa->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += c * n.grad[i];
        }
    });
    auto v = out.node();
    const auto da = a.data();
    for (std::size_t i = 0; i < v->value.size(); ++i) v->value[i] = c * da[i];
    check_finite(*v);
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b, bool transb) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.size() < 2 || sb.size() < 2) {
        throw ContractError("matmul: ranks must be >= 2, got " + shape_str(sa) + " and " +
                            shape_str(sb));
    }
    const std::size_t m = sa[sa.size() - 2];
    const std::size_t k = sa[sa.size() - 1];
    const std::size_t bk = transb ? sb[sb.size() - 1] : sb[sb.size() - 2];
    const std::size_t n = transb ? sb[sb.size() - 2] : sb[sb.size() - 1];
    const bool shared_b = (sb.size() == 2);
    if (!shared_b) {
        // batched rhs: leading dims must match exactly
        if (Shape(sa.begin(), sa.end() - 2) != Shape(sb.begin(), sb.end() - 2)) {
            throw ContractError("matmul: batch dims differ, " + shape_str(sa) + " vs " +
                                shape_str(sb));
        }
    }
    if (k != bk) {
        throw ContractError("matmul: inner dims differ, " + shape_str(sa) + " vs " + shape_str(sb) +
                            (transb ? " (transb)" : ""));
    }
    Shape out_shape(sa.begin(), sa.end() - 1);
    out_shape.push_back(n);

    const std::size_t batches = shape_numel(sa) / (m * k);

    auto bw = [m, k, n, batches, shared_b, transb](TensorNode& nd) {
        const NodePtr& pa = nd.parents[0];
        const NodePtr& pb = nd.parents[1];
        const bool ga = wants_grad(pa);
        const bool gb = wants_grad(pb);
        if (ga) pa->ensure_grad();
        if (gb) pb->ensure_grad();
        if (shared_b) {
            // flattened single call over all batches
            const std::size_t rows = batches * m;
            if (!transb) {
                if (ga) kernel_nt(nd.grad.data(), pb->value.data(), pa->grad.data(), rows, n, k);
                if (gb) kernel_tn(pa->value.data(), nd.grad.data(), pb->grad.data(), rows, k, n);
            } else {
                if (ga) kernel_nn(nd.grad.data(), pb->value.data(), pa->grad.data(), rows, n, k);
                if (gb) kernel_tn(nd.grad.data(), pa->value.data(), pb->grad.data(), rows, n, k);
            }
        } else {
            for (std::size_t i = 0; i < batches; ++i) {
                const double* gv = nd.grad.data() + i * m * n;
                const double* av = pa->value.data() + i * m * k;
                const double* bv = pb->value.data() + i * (transb ? n * k : k * n);
                if (!transb) {
                    if (ga) kernel_nt(gv, bv, pa->grad.data() + i * m * k, m, n, k);
                    if (gb) kernel_tn(av, gv, pb->grad.data() + i * k * n, m, k, n);
                } else {
                    if (ga) kernel_nn(gv, bv, pa->grad.data() + i * m * k, m, n, k);
                    if (gb) kernel_tn(gv, av, pb->grad.data() + i * n * k, m, n, k);
                }
            }
        }
    };

    auto out = make_op("matmul", std::move(out_shape), {a, b}, std::move(bw));
    auto v = out.node();
    const double* av = a.data().data();
    const double* bv = b.data().data();
    if (shared_b) {
        const std::size_t rows = batches * m;
        if (!transb) {
            kernel_nn(av, bv, v->value.data(), rows, k, n);
        } else {
            kernel_nt(av, bv, v->value.data(), rows, k, n);
        }
    } else {
        for (std::size_t i = 0; i < batches; ++i) {
            const double* ai = av + i * m * k;
            const double* bi = bv + i * (transb ? n * k : k * n);
            double* ci = v->value.data() + i * m * n;
            if (!transb) {
                kernel_nn(ai, bi, ci, m, k, n);
            } else {
                kernel_nt(ai, bi, ci, m, k, n);
            }
        }
    }
    check_finite(*v);
    return out;
}

namespace {

// Swap two axes of a row-major buffer; dst must be pre-sized.
void permute_two(const double* src, double* dst, const Shape& in_shape, std::size_t ax1,
                 std::size_t ax2) {
    const std::size_t rank = in_shape.size();
    std::vector<std::size_t> in_strides(rank, 1);
    for (std::size_t i = rank - 1; i > 0; --i) {
        in_strides[i - 1] = in_strides[i] * in_shape[i];
    }
    Shape out_shape = in_shape;
    std::swap(out_shape[ax1], out_shape[ax2]);
    // walk output coords up to ax2; dims beyond ax2 stay contiguous
    const std::size_t block = in_strides[ax2];
    std::vector<std::size_t> coord(ax2 + 1, 0);
    const std::size_t loops = shape_numel(Shape(out_shape.begin(), out_shape.begin() + ax2 + 1));
    std::size_t dst_off = 0;
    for (std::size_t it = 0; it < loops; ++it) {
        std::size_t src_off = 0;
        for (std::size_t d = 0; d <= ax2; ++d) {
            const std::size_t src_axis = (d == ax1) ? ax2 : (d == ax2 ? ax1 : d);
            src_off += coord[d] * in_strides[src_axis];
        }
        std::memcpy(dst + dst_off, src + src_off, block * sizeof(double));
        dst_off += block;
        for (std::size_t d = ax2 + 1; d-- > 0;) {
            if (++coord[d] < out_shape[d]) break;
            coord[d] = 0;
        }
    }
}

}  // namespace

Tensor transpose(const Tensor& a, std::size_t ax1, std::size_t ax2) {
    const Shape& sa = a.shape();
    if (ax1 >= sa.size() || ax2 >= sa.size() || ax1 == ax2) {
        throw ContractError("transpose: invalid axes for shape " + shape_str(sa));
    }
    if (ax1 > ax2) std::swap(ax1, ax2);
    Shape out_shape = sa;
    std::swap(out_shape[ax1], out_shape[ax2]);

    auto out = make_op("transpose", out_shape, {a}, [out_shape, ax1, ax2](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (!wants_grad(pa)) return;
        pa->ensure_grad();
        std::vector<double> tmp(n.grad.size());
        permute_two(n.grad.data(), tmp.data(), out_shape, ax1, ax2);
        for (std::size_t i = 0; i < tmp.size(); ++i) pa->grad[i] += tmp[i];
    });
    permute_two(a.data().data(), out.node()->value.data(), sa, ax1, ax2);
    return out;
}

Tensor reshape(const Tensor& a, Shape new_shape) {
    if (shape_numel(new_shape) != a.numel()) {
        throw ContractError("reshape: element count mismatch " + shape_str(a.shape()) + " -> " +
                            shape_str(new_shape));
    }
    auto out = make_op("reshape", std::move(new_shape), {a}, [](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (!wants_grad(pa)) return;
        pa->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i];
    });
    auto v = out.node();
    const auto da = a.data();
    std::memcpy(v->value.data(), da.data(), da.size() * sizeof(double));
    return out;
}

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.size() != sb.size() || axis >= sa.size()) {
        throw ContractError("concat: incompatible shapes " + shape_str(sa) + " vs " +
                            shape_str(sb));
    }
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (i != axis && sa[i] != sb[i]) {
            throw ContractError("concat: non-axis dims differ, " + shape_str(sa) + " vs " +
                                shape_str(sb));
        }
    }
    Shape out_shape = sa;
    out_shape[axis] += sb[axis];

    std::size_t outer = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= sa[i];
    std::size_t inner = 1;
    for (std::size_t i = axis + 1; i < sa.size(); ++i) inner *= sa[i];
    const std::size_t wa = sa[axis] * inner;
    const std::size_t wb = sb[axis] * inner;

    auto out = make_op("concat", out_shape, {a, b}, [outer, wa, wb](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        const NodePtr& pb = n.parents[1];
        const std::size_t w = wa + wb;
        if (wants_grad(pa)) {
            pa->ensure_grad();
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t i = 0; i < wa; ++i) pa->grad[o * wa + i] += n.grad[o * w + i];
        }
        if (wants_grad(pb)) {
            pb->ensure_grad();
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t i = 0; i < wb; ++i) pb->grad[o * wb + i] += n.grad[o * w + wa + i];
        }
    });
    auto v = out.node();
    const auto da = a.data();
    const auto db = b.data();
    const std::size_t w = wa + wb;
    for (std::size_t o = 0; o < outer; ++o) {
        std::memcpy(v->value.data() + o * w, da.data() + o * wa, wa * sizeof(double));
        std::memcpy(v->value.data() + o * w + wa, db.data() + o * wb, wb * sizeof(double));
    }
    return out;
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t end) {
    const Shape& sa = a.shape();
    if (axis >= sa.size() || start >= end || end > sa[axis]) {
        throw ContractError("slice: range [" + std::to_string(start) + "," + std::to_string(end) +
                            ") invalid for axis " + std::to_string(axis) + " of " + shape_str(sa));
    }
    Shape out_shape = sa;
    out_shape[axis] = end - start;
    std::size_t outer = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= sa[i];
    std::size_t inner = 1;
    for (std::size_t i = axis + 1; i < sa.size(); ++i) inner *= sa[i];
    const std::size_t w_in = sa[axis] * inner;
    const std::size_t w_out = (end - start) * inner;
    const std::size_t off = start * inner;

    auto out = make_op("slice", out_shape, {a}, [outer, w_in, w_out, off](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (!wants_grad(pa)) return;
        pa->ensure_grad();
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < w_out; ++i)
                pa->grad[o * w_in + off + i] += n.grad[o * w_out + i];
    });
    auto v = out.node();
    const auto da = a.data();
    for (std::size_t o = 0; o < outer; ++o) {
        std::memcpy(v->value.data() + o * w_out, da.data() + o * w_in + off,
                    w_out * sizeof(double));
    }
    return out;
}

Tensor softmax(const Tensor& a, bool causal) {
    const Shape& sa = a.shape();
    if (sa.empty()) {
        throw ContractError("softmax: rank-0 input");
    }
    const std::size_t tk = sa.back();
    std::size_t tq = 1;
    if (causal) {
        if (sa.size() < 2) {
            throw ContractError("softmax: causal needs rank >= 2, got " + shape_str(sa));
        }
        tq = sa[sa.size() - 2];
        if (tq > tk) {
            throw ContractError("softmax: causal needs Tq <= Tk for shape " + shape_str(sa));
        }
    }
    const std::size_t rows = shape_numel(sa) / tk;
    const std::size_t offset = causal ? (tk - tq) : 0;

    auto out = make_op("softmax", sa, {a}, [rows, tk, tq, causal, offset](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (!wants_grad(pa)) return;
        pa->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* p = n.value.data() + r * tk;
            const double* g = n.grad.data() + r * tk;
            double* dx = pa->grad.data() + r * tk;
            const std::size_t valid = causal ? ((r % tq) + 1 + offset) : tk;
            double dot = 0.0;
            for (std::size_t j = 0; j < valid; ++j) dot += g[j] * p[j];
            for (std::size_t j = 0; j < valid; ++j) dx[j] += p[j] * (g[j] - dot);
        }
    });
    auto v = out.node();
    const double* x = a.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x + r * tk;
        double* yr = v->value.data() + r * tk;
        const std::size_t valid = causal ? ((r % tq) + 1 + offset) : tk;
        double mx = xr[0];
        for (std::size_t j = 1; j < valid; ++j) mx = std::max(mx, xr[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < valid; ++j) {
            yr[j] = std::exp(xr[j] - mx);
            s += yr[j];
        }
        const double inv = 1.0 / s;
        for (std::size_t j = 0; j < valid; ++j) yr[j] *= inv;
        for (std::size_t j = valid; j < tk; ++j) yr[j] = 0.0;
    }
    check_finite(*v);
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    const Shape& sx = x.shape();
    const std::size_t e = sx.back();
    if (gamma.shape() != Shape{e} || beta.shape() != Shape{e}) {
        throw ContractError("layer_norm: affine params must be [" + std::to_string(e) + "], got " +
                            shape_str(gamma.shape()) + " and " + shape_str(beta.shape()));
    }
    const std::size_t rows = shape_numel(sx) / e;

    auto out = make_op("layer_norm", sx, {x, gamma, beta}, [rows, e, eps](TensorNode& n) {
        const NodePtr& px = n.parents[0];
        const NodePtr& pg = n.parents[1];
        const NodePtr& pb = n.parents[2];
        const bool gx = wants_grad(px);
        const bool gg = wants_grad(pg);
        const bool gb = wants_grad(pb);
        if (gx) px->ensure_grad();
        if (gg) pg->ensure_grad();
        if (gb) pb->ensure_grad();
        const double* gam = pg->value.data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* xr = px->value.data() + r * e;
            const double* g = n.grad.data() + r * e;
            double mu = 0.0;
            for (std::size_t j = 0; j < e; ++j) mu += xr[j];
            mu /= static_cast<double>(e);
            double var = 0.0;
            for (std::size_t j = 0; j < e; ++j) var += (xr[j] - mu) * (xr[j] - mu);
            var /= static_cast<double>(e);
            const double istd = 1.0 / std::sqrt(var + eps);
            if (gg || gb) {
                for (std::size_t j = 0; j < e; ++j) {
                    const double xhat = (xr[j] - mu) * istd;
                    if (gg) pg->grad[j] += g[j] * xhat;
                    if (gb) pb->grad[j] += g[j];
                }
            }
            if (gx) {
                double sum_dxhat = 0.0;
                double sum_dxhat_xhat = 0.0;
                for (std::size_t j = 0; j < e; ++j) {
                    const double xhat = (xr[j] - mu) * istd;
                    const double dxhat = g[j] * gam[j];
                    sum_dxhat += dxhat;
                    sum_dxhat_xhat += dxhat * xhat;
                }
                const double inv_e = 1.0 / static_cast<double>(e);
                for (std::size_t j = 0; j < e; ++j) {
                    const double xhat = (xr[j] - mu) * istd;
                    const double dxhat = g[j] * gam[j];
                    px->grad[r * e + j] +=
                        istd * (dxhat - inv_e * sum_dxhat - xhat * inv_e * sum_dxhat_xhat);
                }
            }
        }
    });
    auto v = out.node();
    const double* xd = x.data().data();
    const double* gam = gamma.data().data();
    const double* bet = beta.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = xd + r * e;
        double* yr = v->value.data() + r * e;
        double mu = 0.0;
        for (std::size_t j = 0; j < e; ++j) mu += xr[j];
        mu /= static_cast<double>(e);
        double var = 0.0;
        for (std::size_t j = 0; j < e; ++j) var += (xr[j] - mu) * (xr[j] - mu);
        var /= static_cast<double>(e);
        const double istd = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < e; ++j) {
            yr[j] = gam[j] * ((xr[j] - mu) * istd) + bet[j];
        }
    }
    check_finite(*v);
    return out;
}

Tensor gelu(const Tensor& x) {
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    constexpr double inv_sqrt2pi = 0.3989422804014326779;
    auto out = make_op("gelu", x.shape(), {x}, [](TensorNode& n) {
        const NodePtr& px = n.parents[0];
        if (!wants_grad(px)) return;
        px->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            const double xv = px->value[i];
            const double cdf = 0.5 * (1.0 + std::erf(xv * inv_sqrt2));
            const double pdf = inv_sqrt2pi * std::exp(-0.5 * xv * xv);
            px->grad[i] += n.grad[i] * (cdf + xv * pdf);
        }
    });
    auto v = out.node();
    const auto xd = x.data();
    for (std::size_t i = 0; i < v->value.size(); ++i) {
        const double xv = xd[i];
        v->value[i] = 0.5 * xv * (1.0 + std::erf(xv * inv_sqrt2));
    }
    check_finite(*v);
    return out;
}

Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids, std::size_t batch,
                        std::size_t seq_len) {
    const Shape& st = table.shape();
    if (st.size() != 2) {
        throw ContractError("embedding_lookup: table must be 2D, got " + shape_str(st));
    }
    if (ids.size() != batch * seq_len) {
        throw ContractError("embedding_lookup: expected " + std::to_string(batch * seq_len) +
                            " ids, got " + std::to_string(ids.size()));
    }
    const std::size_t vocab = st[0];
    const std::size_t e = st[1];
    for (int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
            throw ContractError("embedding_lookup: id " + std::to_string(id) +
                                " out of range for vocab " + std::to_string(vocab));
        }
    }
    auto ids_copy = std::make_shared<std::vector<int>>(ids);
    auto out = make_op("embedding_lookup", {batch, seq_len, e}, {table}, [ids_copy, e](TensorNode& n) {
        const NodePtr& pt = n.parents[0];
        if (!wants_grad(pt)) return;
        pt->ensure_grad();
        for (std::size_t r = 0; r < ids_copy->size(); ++r) {
            const std::size_t row = static_cast<std::size_t>((*ids_copy)[r]);
            for (std::size_t j = 0; j < e; ++j) {
                pt->grad[row * e + j] += n.grad[r * e + j];
            }
        }
    });
    auto v = out.node();
    const auto td = table.data();
    for (std::size_t r = 0; r < ids.size(); ++r) {
        std::memcpy(v->value.data() + r * e, td.data() + static_cast<std::size_t>(ids[r]) * e,
                    e * sizeof(double));
    }
    return out;
}

Tensor image_to_patches(const Tensor& images, std::size_t ph, std::size_t pw) {
    const Shape& s = images.shape();
    if (s.size() != 3) {
        throw ContractError("image_to_patches: expected B x H x W, got " + shape_str(s));
    }
    const std::size_t b = s[0], h = s[1], w = s[2];
    if (ph == 0 || pw == 0 || h % ph != 0 || w % pw != 0) {
        throw ContractError("image_to_patches: image " + shape_str(s) +
                            " not divisible by patch " + std::to_string(ph) + "x" +
                            std::to_string(pw));
    }
    const std::size_t gh = h / ph, gw = w / pw;
    const std::size_t l = gh * gw;
    const std::size_t d = ph * pw;

    auto gather = [=](const double* src, double* dst) {
        std::size_t o = 0;
        for (std::size_t bi = 0; bi < b; ++bi) {
            const double* img = src + bi * h * w;
            for (std::size_t gy = 0; gy < gh; ++gy) {
                for (std::size_t gx = 0; gx < gw; ++gx) {
                    for (std::size_t py = 0; py < ph; ++py) {
                        const double* row = img + (gy * ph + py) * w + gx * pw;
                        for (std::size_t px = 0; px < pw; ++px) {
                            dst[o++] = row[px];
                        }
                    }
                }
            }
        }
    };

    auto out = make_op("image_to_patches", {b, l, d}, {images}, [=](TensorNode& n) {
        const NodePtr& pi = n.parents[0];
        if (!wants_grad(pi)) return;
        pi->ensure_grad();
        std::size_t o = 0;
        for (std::size_t bi = 0; bi < b; ++bi) {
            double* img = pi->grad.data() + bi * h * w;
            for (std::size_t gy = 0; gy < gh; ++gy) {
                for (std::size_t gx = 0; gx < gw; ++gx) {
                    for (std::size_t py = 0; py < ph; ++py) {
                        double* row = img + (gy * ph + py) * w + gx * pw;
                        for (std::size_t px = 0; px < pw; ++px) {
                            row[px] += n.grad[o++];
                        }
                    }
                }
            }
        }
    });
    gather(images.data().data(), out.node()->value.data());
    return out;
}

Tensor sum(const Tensor& a) {
    auto out = make_op("sum", {1}, {a}, [](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (!wants_grad(pa)) return;
        pa->ensure_grad();
        for (auto& g : pa->grad) g += n.grad[0];
    });
    double s = 0.0;
    for (double v : a.data()) s += v;
    out.node()->value[0] = s;
    check_finite(*out.node());
    return out;
}

Tensor mean(const Tensor& a) {
    const double inv = 1.0 / static_cast<double>(a.numel());
    auto out = make_op("mean", {1}, {a}, [inv](TensorNode& n) {
        const NodePtr& pa = n.parents[0];
        if (!wants_grad(pa)) return;
        pa->ensure_grad();
        for (auto& g : pa->grad) g += inv * n.grad[0];
    });
    double s = 0.0;
    for (double v : a.data()) s += v;
    out.node()->value[0] = s * inv;
    check_finite(*out.node());
    return out;
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& targets, bool ignore_pad,
                     int pad_id) {
    const Shape& s = logits.shape();
    if (s.size() != 3) {
        throw ContractError("cross_entropy: logits must be B x S x V, got " + shape_str(s));
    }
    const std::size_t positions = s[0] * s[1];
    const std::size_t v = s[2];
    if (targets.size() != positions) {
        throw ContractError("cross_entropy: " + std::to_string(positions) + " positions vs " +
                            std::to_string(targets.size()) + " targets");
    }
    std::size_t count = 0;
    for (int t : targets) {
        if (t < 0 || static_cast<std::size_t>(t) >= v) {
            throw ContractError("cross_entropy: target id " + std::to_string(t) +
                                " out of range for vocab " + std::to_string(v));
        }
        if (!(ignore_pad && t == pad_id)) ++count;
    }
    if (count == 0) {
        throw ContractError("cross_entropy: degenerate batch, all positions ignored");
    }
    auto tgt = std::make_shared<std::vector<int>>(targets);

    auto out = make_op("cross_entropy", {1}, {logits},
                       [tgt, positions, v, ignore_pad, pad_id, count](TensorNode& n) {
                           const NodePtr& pl = n.parents[0];
                           if (!wants_grad(pl)) return;
                           pl->ensure_grad();
                           const double gscale = n.grad[0] / static_cast<double>(count);
                           for (std::size_t r = 0; r < positions; ++r) {
                               const int t = (*tgt)[r];
                               if (ignore_pad && t == pad_id) continue;
                               const double* x = pl->value.data() + r * v;
                               double* dx = pl->grad.data() + r * v;
                               double mx = x[0];
                               for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, x[j]);
                               double z = 0.0;
                               for (std::size_t j = 0; j < v; ++j) z += std::exp(x[j] - mx);
                               const double inv_z = 1.0 / z;
                               for (std::size_t j = 0; j < v; ++j) {
                                   const double p = std::exp(x[j] - mx) * inv_z;
                                   dx[j] += gscale *
                                            (p - (static_cast<std::size_t>(t) == j ? 1.0 : 0.0));
                               }
                           }
                       });
    const double* x = logits.data().data();
    double loss = 0.0;
    for (std::size_t r = 0; r < positions; ++r) {
        const int t = targets[r];
        if (ignore_pad && t == pad_id) continue;
        const double* xr = x + r * v;
        double mx = xr[0];
        for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, xr[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < v; ++j) z += std::exp(xr[j] - mx);
        loss += (std::log(z) + mx) - xr[static_cast<std::size_t>(t)];
    }
    out.node()->value[0] = loss / static_cast<double>(count);
    check_finite(*out.node());
    return out;
}

Tensor mask_rows(const Tensor& x, const Tensor& pad, const std::vector<std::uint8_t>& keep) {
    const Shape& sx = x.shape();
    if (sx.size() != 3) {
        throw ContractError("mask_rows: expected B x S x E, got " + shape_str(sx));
    }
    const std::size_t e = sx[2];
    if (pad.shape() != Shape{e}) {
        throw ContractError("mask_rows: pad must be [" + std::to_string(e) + "], got " +
                            shape_str(pad.shape()));
    }
    const std::size_t rows = sx[0] * sx[1];
    if (keep.size() != rows) {
        throw ContractError("mask_rows: mask has " + std::to_string(keep.size()) + " bits for " +
                            std::to_string(rows) + " rows");
    }
    auto bits = std::make_shared<std::vector<std::uint8_t>>(keep);
    auto out = make_op("mask_rows", sx, {x, pad}, [bits, rows, e](TensorNode& n) {
        const NodePtr& px = n.parents[0];
        const NodePtr& pp = n.parents[1];
        const bool gx = wants_grad(px);
        const bool gp = wants_grad(pp);
        if (gx) px->ensure_grad();
        if (gp) pp->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* g = n.grad.data() + r * e;
            if ((*bits)[r]) {
                if (gx) {
                    double* dx = px->grad.data() + r * e;
                    for (std::size_t j = 0; j < e; ++j) dx[j] += g[j];
                }
            } else if (gp) {
                for (std::size_t j = 0; j < e; ++j) pp->grad[j] += g[j];
            }
        }
    });
    auto v = out.node();
    const double* xd = x.data().data();
    const double* pd = pad.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        double* y = v->value.data() + r * e;
        if (keep[r]) {
            std::memcpy(y, xd + r * e, e * sizeof(double));
        } else {
            std::memcpy(y, pd, e * sizeof(double));
        }
    }
    return out;
}

Tensor tile_rows(const Tensor& pad, std::size_t batch, std::size_t seq_len) {
    const Shape& sp = pad.shape();
    if (sp.size() != 1) {
        throw ContractError("tile_rows: pad must be 1D, got " + shape_str(sp));
    }
    const std::size_t e = sp[0];
    const std::size_t rows = batch * seq_len;
    auto out = make_op("tile_rows", {batch, seq_len, e}, {pad}, [rows, e](TensorNode& n) {
        const NodePtr& pp = n.parents[0];
        if (!wants_grad(pp)) return;
        pp->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* g = n.grad.data() + r * e;
            for (std::size_t j = 0; j < e; ++j) pp->grad[j] += g[j];
        }
    });
    auto v = out.node();
    const double* pd = pad.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        std::memcpy(v->value.data() + r * e, pd, e * sizeof(double));
    }
    return out;
}

}  // namespace teachlab::ops
