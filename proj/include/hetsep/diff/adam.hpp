#pragma once

#include "hetsep/diff/tape.hpp"

#include <span>

namespace hetsep::diff {

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One bias-corrected Adam update at step t (t >= 1), in place. Moments are
// advanced; gradients are left untouched.
template <typename T>
void adam_step(std::span<Parameter<T>* const> params, const AdamOptions& options, long t);

extern template void adam_step<float>(std::span<Parameter<float>* const>, const AdamOptions&, long);
extern template void adam_step<double>(std::span<Parameter<double>* const>, const AdamOptions&, long);

}  // namespace hetsep::diff
