#include "teachlab/adam.hpp"

#include <cmath>

#include "teachlab/errors.hpp"

namespace teachlab {

void Adam::step(std::vector<Parameter>& params) {
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(params[i].tensor.numel(), 0.0);
            v_[i].assign(params[i].tensor.numel(), 0.0);
        }
    }
    if (m_.size() != params.size()) {
        throw ContractError("Adam::step: parameter list changed size");
    }
    for (auto& p : params) {
        for (double g : p.tensor.grad()) {
            if (!std::isfinite(g)) {
                throw ContractError("Adam::step: non-finite gradient in parameter '" + p.name +
                                    "', step aborted");
            }
        }
    }

    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto w = params[i].tensor.data_mut();
        auto g = params[i].tensor.grad();
        auto& m = m_[i];
        auto& v = v_[i];
        if (m.size() != w.size()) {
            throw ContractError("Adam::step: shape of '" + params[i].name + "' changed");
        }
        for (std::size_t j = 0; j < w.size(); ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            w[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

}  // namespace teachlab
