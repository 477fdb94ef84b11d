#pragma once

#include <cstdint>
#include <vector>

#include "teachlab/tensor.hpp"

namespace teachlab {

struct OptimizerConfig {
    // Paper defers to baseline training configs; these Adam defaults are a
    // documented stand-in (see README).
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are keyed by parameter order,
/// which is fixed for the life of the optimizer.
class Adam {
public:
    explicit Adam(OptimizerConfig cfg) : cfg_(cfg) {}

    /// One update from the gradients currently held by the parameters.
    /// Any non-finite gradient aborts the whole step (no parameter is
    /// touched) with a diagnostic naming the offender.
    void step(std::vector<Parameter>& params);

    std::uint64_t timestep() const { return t_; }
    const OptimizerConfig& config() const { return cfg_; }

private:
    OptimizerConfig cfg_;
    std::uint64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace teachlab
