#pragma once

#include "hetsep/diff/tape.hpp"

#include <deque>
#include <string>
#include <vector>

namespace hetsep::diff {

// Ordered, name-unique collection of parameters with stable addresses.
template <typename T>
class ParameterSet {
public:
    ParameterSet() = default;
    ParameterSet(const ParameterSet&) = delete;
    ParameterSet& operator=(const ParameterSet&) = delete;

    Parameter<T>& add(std::string name, Matrix<T> init) {
        if (find(name) != nullptr) throw std::invalid_argument("duplicate parameter name: " + name);
        params_.emplace_back(std::move(name), std::move(init));
        return params_.back();
    }

    Parameter<T>* find(const std::string& name) {
        for (auto& p : params_) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }
    const Parameter<T>* find(const std::string& name) const {
        for (const auto& p : params_) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }

    std::vector<Parameter<T>*> all() {
        std::vector<Parameter<T>*> out;
        out.reserve(params_.size());
        for (auto& p : params_) out.push_back(&p);
        return out;
    }

    // Parameters whose names start with `prefix`.
    std::vector<Parameter<T>*> with_prefix(const std::string& prefix) {
        std::vector<Parameter<T>*> out;
        for (auto& p : params_) {
            if (p.name.rfind(prefix, 0) == 0) out.push_back(&p);
        }
        return out;
    }

    void zero_grad() {
        for (auto& p : params_) p.zero_grad();
    }

    size_t size() const { return params_.size(); }
    Index scalar_count() const {
        Index n = 0;
        for (const auto& p : params_) n += p.size();
        return n;
    }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

private:
    std::deque<Parameter<T>> params_;
};

}  // namespace hetsep::diff
