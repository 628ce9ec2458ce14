#pragma once

#include "hetsep/diff/ops.hpp"
#include "hetsep/diff/parameters.hpp"

#include <cmath>
#include <random>
#include <string>

namespace hetsep::model {

using diff::Parameter;
using diff::ParameterSet;
using diff::Tape;
using diff::Var;

// Glorot-uniform matrix. Drawn in double and rounded so float and double
// models built from one seed start from the same point.
template <typename T>
Matrix<T> glorot(Index rows, Index cols, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix<T> m(rows, cols);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<T>(dist(rng));
    return m;
}

// y = x W (+ b). W is in x out, b is 1 x out.
template <typename T>
struct Linear {
    Parameter<T>* weight = nullptr;
    Parameter<T>* bias = nullptr;

    static Linear create(ParameterSet<T>& set, const std::string& name, Index in, Index out, bool with_bias,
                         std::mt19937_64& rng) {
        Linear l;
        l.weight = &set.add(name + ".weight", glorot<T>(in, out, rng));
        if (with_bias) l.bias = &set.add(name + ".bias", Matrix<T>::Zero(1, out));
        return l;
    }

    Index in_dim() const { return weight->value.rows(); }
    Index out_dim() const { return weight->value.cols(); }

    Var<T> operator()(Tape<T>& tape, const Var<T>& x) const {
        Var<T> y = diff::matmul(x, tape.param(*weight));
        if (bias != nullptr) y = diff::add_row(y, tape.param(*bias));
        return y;
    }
};

// linear -> ELU -> linear
template <typename T>
struct Mlp {
    Linear<T> first;
    Linear<T> second;

    static Mlp create(ParameterSet<T>& set, const std::string& name, Index in, Index hidden, Index out,
                      std::mt19937_64& rng) {
        return {Linear<T>::create(set, name + ".0", in, hidden, true, rng),
                Linear<T>::create(set, name + ".1", hidden, out, true, rng)};
    }

    Var<T> operator()(Tape<T>& tape, const Var<T>& x) const {
        return second(tape, diff::elu(first(tape, x)));
    }
};

}  // namespace hetsep::model
