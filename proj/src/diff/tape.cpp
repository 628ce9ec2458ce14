#include "hetsep/diff/tape.hpp"

#include <string>

namespace hetsep::diff {

template <typename T>
Var<T> Tape<T>::constant(Matrix<T> value) {
    Node n;
    n.value = std::move(value);
    n.op = "constant";
    nodes_.push_back(std::move(n));
    return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Tape<T>::param(Parameter<T>& p) {
    if (auto it = param_ids_.find(&p); it != param_ids_.end()) {
        return Var<T>(this, it->second);
    }
    Node n;
    n.value = p.value;
    n.requires_grad = recording_;
    n.param = &p;
    n.op = "parameter";
    nodes_.push_back(std::move(n));
    const int id = static_cast<int>(nodes_.size()) - 1;
    param_ids_.emplace(&p, id);
    return Var<T>(this, id);
}

template <typename T>
Var<T> Tape<T>::push(Matrix<T> value, std::initializer_list<int> inputs, Backward backward,
                     const char* op_name) {
    return push(std::move(value), std::vector<int>(inputs), std::move(backward), op_name);
}

template <typename T>
Var<T> Tape<T>::push(Matrix<T> value, const std::vector<int>& inputs, Backward backward,
                     const char* op_name) {
    if (!value.allFinite()) {
        throw std::domain_error(std::string("non-finite output in op '") + op_name + "'");
    }
    Node n;
    n.value = std::move(value);
    n.op = op_name;
    if (recording_) {
        for (int id : inputs) {
            if (nodes_[static_cast<size_t>(id)].requires_grad) {
                n.requires_grad = true;
                break;
            }
        }
        if (n.requires_grad) n.backward = std::move(backward);
    }
    nodes_.push_back(std::move(n));
    return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Matrix<T>& Tape<T>::grad_slot(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.has_grad) {
        n.grad = Matrix<T>::Zero(n.value.rows(), n.value.cols());
        n.has_grad = true;
    }
    return n.grad;
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss) {
    if (loss.tape() != this || !loss.valid()) {
        throw std::logic_error("backward on a value not recorded on this tape");
    }
    if (!recording_) {
        throw std::logic_error("backward on a non-recording tape");
    }
    Node& root = nodes_[static_cast<size_t>(loss.id())];
    if (root.value.size() != 1) {
        throw std::logic_error("backward requires a scalar loss");
    }
    if (!root.requires_grad) {
        throw std::logic_error("backward on unrecorded value: loss does not depend on any parameter");
    }
    root.grad = Matrix<T>::Ones(1, 1);
    root.has_grad = true;

    for (int id = loss.id(); id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (!n.has_grad) continue;
        if (n.param != nullptr) {
            n.param->grad += n.grad;
        } else if (n.backward) {
            // The closure may grow other nodes' grads but never this one.
            Matrix<T> g = std::move(n.grad);
            n.backward(*this, g, n.value);
        }
    }
    clear();
}

template <typename T>
void Tape<T>::clear() {
    nodes_.clear();
    param_ids_.clear();
}

template class Tape<float>;
template class Tape<double>;

}  // namespace hetsep::diff
