#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace teachlab {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t shape_numel(const Shape& s);

namespace detail {

struct TensorNode {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // allocated lazily, iff requires_grad
    bool requires_grad = false;
    const char* op = "leaf";

    // Inputs are held alive by the node; backward_fn accumulates this
    // node's grad into the parents' grads.
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(TensorNode&)> backward_fn;

    void ensure_grad();
};

}  // namespace detail

// Dense row-major float64 tensor with an optional gradient slot. Ops build a
// dynamic graph; creation order is the topological order used by backward().
// Single-threaded by contract: the graph is not shareable across threads.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double v, bool requires_grad = false);
    static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t numel() const;
    std::size_t rank() const { return shape().size(); }
    bool requires_grad() const;

    std::span<const double> data() const;
    /// Leaf mutation only (init, optimizer); never call on op outputs.
    std::span<double> data_mut();

    std::span<const double> grad() const;
    std::span<double> grad_mut();
    void zero_grad();

    double item() const;  // scalar tensors only

    std::shared_ptr<detail::TensorNode> node() const { return node_; }
    explicit Tensor(std::shared_ptr<detail::TensorNode> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<detail::TensorNode> node_;
};

/// Reverse-mode sweep from a scalar root. Gradients accumulate; callers zero
/// them between steps.
void backward(const Tensor& loss);

/// Named trainable tensor. Names are [a-z0-9._] for checkpoint portability.
struct Parameter {
    std::string name;
    Tensor tensor;
};

void validate_param_name(const std::string& name);

}  // namespace teachlab
