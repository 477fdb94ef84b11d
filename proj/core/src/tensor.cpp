#include "teachlab/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "teachlab/errors.hpp"

namespace teachlab {

std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    out += "]";
    return out;
}

std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

namespace detail {

void TensorNode::ensure_grad() {
    if (grad.size() != value.size()) {
        grad.assign(value.size(), 0.0);
    }
}

}  // namespace detail

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
    auto n = std::make_shared<detail::TensorNode>();
    n->value.assign(shape_numel(shape), v);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    if (requires_grad) n->ensure_grad();
    return Tensor(std::move(n));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data, bool requires_grad) {
    if (shape_numel(shape) != data.size()) {
        throw ContractError("Tensor::from_data: shape " + shape_str(shape) + " does not match " +
                            std::to_string(data.size()) + " values");
    }
    auto n = std::make_shared<detail::TensorNode>();
    n->shape = std::move(shape);
    n->value = std::move(data);
    n->requires_grad = requires_grad;
    if (requires_grad) n->ensure_grad();
    return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return from_data({1}, {v}, requires_grad);
}

const Shape& Tensor::shape() const {
    if (!node_) throw ContractError("shape() on undefined tensor");
    return node_->shape;
}

std::size_t Tensor::numel() const { return node_ ? node_->value.size() : 0; }

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

std::span<const double> Tensor::data() const {
    if (!node_) throw ContractError("data() on undefined tensor");
    return node_->value;
}

std::span<double> Tensor::data_mut() {
    if (!node_) throw ContractError("data_mut() on undefined tensor");
    return node_->value;
}

std::span<const double> Tensor::grad() const {
    if (!node_ || !node_->requires_grad) {
        throw ContractError("grad() on tensor without requires_grad");
    }
    node_->ensure_grad();
    return node_->grad;
}

std::span<double> Tensor::grad_mut() {
    if (!node_ || !node_->requires_grad) {
        throw ContractError("grad_mut() on tensor without requires_grad");
    }
    node_->ensure_grad();
    return node_->grad;
}

void Tensor::zero_grad() {
    if (node_ && node_->requires_grad) {
        node_->grad.assign(node_->value.size(), 0.0);
    }
}

double Tensor::item() const {
    if (numel() != 1) {
        throw ContractError("item() requires a scalar tensor, got " + shape_str(shape()));
    }
    return node_->value[0];
}

void backward(const Tensor& loss) {
    if (!loss.defined() || loss.numel() != 1) {
        throw ContractError("backward: root must be a scalar tensor");
    }
    auto root = loss.node();
    if (!root->requires_grad) {
        return;  // nothing reachable requires grad
    }

    // Iterative post-order DFS; the reversed order is a valid reverse
    // topological order of the (acyclic) graph.
    std::vector<detail::TensorNode*> order;
    std::unordered_set<detail::TensorNode*> visited;
    struct Frame {
        detail::TensorNode* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;
    stack.push_back({root.get(), 0});
    visited.insert(root.get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.node->parents.size()) {
            detail::TensorNode* p = f.node->parents[f.next_parent++].get();
            if (p->requires_grad && !visited.count(p)) {
                visited.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    for (auto* n : order) {
        n->ensure_grad();
    }
    root->grad[0] += 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::TensorNode* n = *it;
        if (n->backward_fn) {
            n->backward_fn(*n);
        }
    }
}

void validate_param_name(const std::string& name) {
    if (name.empty()) {
        throw ContractError("parameter name must be non-empty");
    }
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_';
        if (!ok) {
            throw ContractError("parameter name '" + name + "' uses characters outside [a-z0-9._]");
        }
    }
}

}  // namespace teachlab
