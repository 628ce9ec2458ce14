#pragma once

#include "hetsep/diff/matrix.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hetsep::diff {

// A trainable tensor with its gradient accumulator and Adam moments.
template <typename T>
struct Parameter {
    std::string name;
    Matrix<T> value;
    Matrix<T> grad;
    Matrix<T> m;
    Matrix<T> v;

    Parameter() = default;
    Parameter(std::string n, Matrix<T> init)
        : name(std::move(n)),
          value(std::move(init)),
          grad(Matrix<T>::Zero(value.rows(), value.cols())),
          m(Matrix<T>::Zero(value.rows(), value.cols())),
          v(Matrix<T>::Zero(value.rows(), value.cols())) {}

    void zero_grad() { grad.setZero(); }
    Index size() const { return value.size(); }
};

template <typename T>
class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// has not been cleared.
template <typename T>
class Var {
public:
    Var() = default;

    const Matrix<T>& value() const { return tape_->value(id_); }
    Index rows() const { return value().rows(); }
    Index cols() const { return value().cols(); }
    bool valid() const { return tape_ != nullptr && id_ >= 0; }
    Tape<T>* tape() const { return tape_; }
    int id() const { return id_; }

    // Convenience for 1x1 results.
    T scalar() const { return value()(0, 0); }

private:
    friend class Tape<T>;
    Var(Tape<T>* tape, int id) : tape_(tape), id_(id) {}

    Tape<T>* tape_ = nullptr;
    int id_ = -1;
};

// Linear record of executed primitive ops. backward() walks the record in
// exact reverse execution order and clears it.
template <typename T>
class Tape {
public:
    // grad_out is dL/d(output); out is the recorded output value.
    using Backward = std::function<void(Tape&, const Matrix<T>& grad_out, const Matrix<T>& out)>;

    explicit Tape(bool recording = true) : recording_(recording) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const { return recording_; }

    Var<T> constant(Matrix<T> value);
    Var<T> param(Parameter<T>& p);

    // Records an op output. `inputs` decides whether the output needs a
    // gradient; `backward` is dropped when none of them does.
    Var<T> push(Matrix<T> value, std::initializer_list<int> inputs, Backward backward,
                const char* op_name);
    Var<T> push(Matrix<T> value, const std::vector<int>& inputs, Backward backward,
                const char* op_name);

    const Matrix<T>& value(int id) const { return nodes_.at(static_cast<size_t>(id)).value; }
    bool requires_grad(int id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }

    // Adds g into the gradient slot of node `id` (allocated on first use).
    template <typename Derived>
    void accumulate(int id, const Eigen::MatrixBase<Derived>& g) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (!n.requires_grad) return;
        if (!n.has_grad) {
            n.grad = g;
            n.has_grad = true;
        } else {
            n.grad += g;
        }
    }

    // Mutable gradient slot, zero-initialised on first access.
    Matrix<T>& grad_slot(int id);

    void backward(const Var<T>& loss);
    void clear();
    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Matrix<T> value;
        Matrix<T> grad;
        bool has_grad = false;
        bool requires_grad = false;
        Backward backward;
        Parameter<T>* param = nullptr;
        const char* op = "";
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter<T>*, int> param_ids_;
    bool recording_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace hetsep::diff
