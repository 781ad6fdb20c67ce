#pragma once

#include <cmath>
#include <vector>

#include "tcmap/tensor.hpp"

namespace tcmap::diff {

// Adam with bias correction. Moment state is keyed by parameter order, so
// the same parameter list (same tensors, same order) must be passed to
// every step. Single-threaded by contract.
template <typename S>
class AdamT {
public:
    explicit AdamT(S lr, S beta1 = S(0.9), S beta2 = S(0.999), S eps = S(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    std::int64_t steps() const { return t_; }

    void step(const std::vector<TensorT<S>*>& params) {
        if (slots_.empty()) {
            slots_.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                slots_[i].m.assign(params[i]->data.size(), S(0));
                slots_[i].v.assign(params[i]->data.size(), S(0));
            }
        }
        if (slots_.size() != params.size())
            throw ValidationError("adam: parameter list changed between steps");
        ++t_;
        const S c1 = S(1) - static_cast<S>(std::pow(static_cast<double>(beta1_), static_cast<double>(t_)));
        const S c2 = S(1) - static_cast<S>(std::pow(static_cast<double>(beta2_), static_cast<double>(t_)));
        for (std::size_t i = 0; i < params.size(); ++i) {
            TensorT<S>& p = *params[i];
            if (p.grad.size() != p.data.size())
                throw ValidationError("adam: parameter " + std::to_string(i) + " has no gradient");
            if (slots_[i].m.size() != p.data.size())
                throw ValidationError("adam: parameter " + std::to_string(i) + " changed size");
            auto& m = slots_[i].m;
            auto& v = slots_[i].v;
            for (std::size_t j = 0; j < p.data.size(); ++j) {
                const S g = p.grad[j];
                m[j] = beta1_ * m[j] + (S(1) - beta1_) * g;
                v[j] = beta2_ * v[j] + (S(1) - beta2_) * g * g;
                const S mhat = m[j] / c1;
                const S vhat = v[j] / c2;
                p.data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

private:
    struct Slot {
        std::vector<S> m, v;
    };

    S lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<Slot> slots_;
};

} // namespace tcmap::diff
