#pragma once

#include "hetsep/diff/tape.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hetsep::diff {

struct GradCheckOptions {
    double epsilon = 1e-5;
    // Coordinates checked per parameter; smaller parameters are checked in full.
    int samples_per_param = 32;
    std::uint64_t seed = 0;
};

struct GradCheckEntry {
    std::string param;
    Index coordinate = 0;
    double analytic = 0;
    double numeric = 0;
    double relative_error = 0;
};

struct GradCheckReport {
    double max_relative_error = 0;
    GradCheckEntry worst;
    std::vector<GradCheckEntry> per_param_worst;  // one per parameter
    Index coordinates_checked = 0;
};

// Builds the loss on the supplied tape. Must be deterministic: any stochastic
// input has to be frozen by the caller.
using LossBuilder = std::function<Var<double>(Tape<double>&)>;

// Compares reverse-mode gradients against central differences
// (L(w + eps) - L(w - eps)) / (2 eps) at 64-bit. The error of one coordinate
// is |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|).
GradCheckReport finite_diff_check(const LossBuilder& loss_fn, const std::vector<Parameter<double>*>& params,
                                  const GradCheckOptions& options = {});

}  // namespace hetsep::diff
