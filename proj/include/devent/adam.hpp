#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "devent/nn.hpp"
#include "devent/tensor.hpp"

namespace devent {

struct AdamConfig {
    double learning_rate = 0.03;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double epsilon = 1e-8;

    void validate() const {
        if (!(learning_rate > 0.0)) throw std::invalid_argument("AdamConfig: learning_rate must be > 0");
        if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("AdamConfig: beta1 must be in (0,1)");
        if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("AdamConfig: beta2 must be in (0,1)");
        if (!(epsilon > 0.0)) throw std::invalid_argument("AdamConfig: epsilon must be > 0");
    }
};

/// One bias-corrected Adam update for a single tensor.
inline void adam_update(Tensor& value, const Tensor& gradient, Tensor& m, Tensor& v,
                        std::uint64_t& step, const AdamConfig& cfg) {
    cfg.validate();
    require_same_shape(value, gradient, "adam_update");
    require_same_shape(value, m, "adam_update: first moment");
    require_same_shape(value, v, "adam_update: second moment");
    step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < value.size(); ++i) {
        const double g = gradient[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        value[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

/// Named view over the trainable parameters of a model. Iteration order is
/// the registration order, which every model keeps stable; the optimizer,
/// checkpoints and hashes all rely on that.
class ParameterSet {
public:
    void add(std::string name, Param& p) { entries_.emplace_back(std::move(name), &p); }

    std::size_t size() const { return entries_.size(); }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    Param* find(const std::string& name) const {
        for (const auto& [n, p] : entries_) {
            if (n == name) return p;
        }
        return nullptr;
    }

    void zero_grad() {
        for (auto& [name, p] : entries_) p->zero_grad();
    }

    void scale_grad(double s) {
        for (auto& [name, p] : entries_) {
            for (double& g : p->grad.values) g *= s;
        }
    }

private:
    std::vector<std::pair<std::string, Param*>> entries_;
};

/// Apply Adam to every parameter using its accumulated gradient.
inline void adam_step(ParameterSet& params, const AdamConfig& cfg) {
    for (auto& [name, p] : params) {
        adam_update(p->value, p->grad, p->m, p->v, p->step, cfg);
        if (!p->value.all_finite()) {
            throw std::runtime_error("adam_step: parameter '" + name + "' became non-finite");
        }
    }
}

}  // namespace devent
