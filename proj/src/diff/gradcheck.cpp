#include "hetsep/diff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hetsep::diff {
namespace {

double evaluate(const LossBuilder& loss_fn) {
    Tape<double> tape(false);
    Var<double> loss = loss_fn(tape);
    if (loss.value().size() != 1) throw std::invalid_argument("finite_diff_check: loss is not a scalar");
    return loss.scalar();
}

}  // namespace

GradCheckReport finite_diff_check(const LossBuilder& loss_fn, const std::vector<Parameter<double>*>& params,
                                  const GradCheckOptions& options) {
    if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
        throw std::invalid_argument("invalid epsilon");
    }
    if (options.samples_per_param < 1) throw std::invalid_argument("samples_per_param must be >= 1");

    const double base = evaluate(loss_fn);
    const double again = evaluate(loss_fn);
    if (std::memcmp(&base, &again, sizeof(double)) != 0) {
        throw std::runtime_error("finite_diff_check: loss_fn is non-deterministic (two evaluations differ)");
    }

    for (auto* p : params) p->zero_grad();
    {
        Tape<double> tape(true);
        Var<double> loss = loss_fn(tape);
        tape.backward(loss);
    }

    GradCheckReport report;
    std::mt19937_64 rng(options.seed);
    const double eps = options.epsilon;

    for (auto* p : params) {
        const Index n = p->value.size();
        std::vector<Index> coords(static_cast<size_t>(n));
        std::iota(coords.begin(), coords.end(), Index{0});
        if (n > options.samples_per_param) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(static_cast<size_t>(options.samples_per_param));
            std::sort(coords.begin(), coords.end());
        }

        GradCheckEntry worst{p->name, 0, 0, 0, -1};
        for (Index k : coords) {
            double& w = p->value.data()[k];
            const double saved = w;
            w = saved + eps;
            const double plus = evaluate(loss_fn);
            w = saved - eps;
            const double minus = evaluate(loss_fn);
            w = saved;

            const double numeric = (plus - minus) / (2.0 * eps);
            const double analytic = p->grad.data()[k];
            const double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
            const double rel = std::abs(analytic - numeric) / denom;
            ++report.coordinates_checked;
            if (rel > worst.relative_error) worst = {p->name, k, analytic, numeric, rel};
        }
        if (worst.relative_error < 0) worst.relative_error = 0;
        report.per_param_worst.push_back(worst);
        if (worst.relative_error >= report.max_relative_error) {
            report.max_relative_error = worst.relative_error;
            report.worst = worst;
        }
    }
    return report;
}

}  // namespace hetsep::diff
