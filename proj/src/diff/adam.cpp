#include "hetsep/diff/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace hetsep::diff {

template <typename T>
void adam_step(std::span<Parameter<T>* const> params, const AdamOptions& options, long t) {
    if (!(options.lr > 0.0)) throw std::invalid_argument("adam_step: learning rate must be > 0");
    if (t < 1) throw std::invalid_argument("adam_step: step counter must be >= 1");
    if (options.beta1 < 0.0 || options.beta1 >= 1.0 || options.beta2 < 0.0 || options.beta2 >= 1.0) {
        throw std::invalid_argument("adam_step: betas must lie in [0, 1)");
    }
    const T b1 = static_cast<T>(options.beta1);
    const T b2 = static_cast<T>(options.beta2);
    const T lr = static_cast<T>(options.lr);
    const T eps = static_cast<T>(options.eps);
    const T c1 = T(1) - static_cast<T>(std::pow(options.beta1, static_cast<double>(t)));
    const T c2 = T(1) - static_cast<T>(std::pow(options.beta2, static_cast<double>(t)));

    for (Parameter<T>* p : params) {
        const Index n = p->value.size();
        T* w = p->value.data();
        T* m = p->m.data();
        T* v = p->v.data();
        const T* g = p->grad.data();
        for (Index k = 0; k < n; ++k) {
            m[k] = b1 * m[k] + (T(1) - b1) * g[k];
            v[k] = b2 * v[k] + (T(1) - b2) * g[k] * g[k];
            const T m_hat = m[k] / c1;
            const T v_hat = v[k] / c2;
            w[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

template void adam_step<float>(std::span<Parameter<float>* const>, const AdamOptions&, long);
template void adam_step<double>(std::span<Parameter<double>* const>, const AdamOptions&, long);

}  // namespace hetsep::diff
