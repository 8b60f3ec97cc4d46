#include "agegraph/param_store.hpp"

#include "agegraph/errors.hpp"

namespace agegraph {

Matrix& ParamStore::add(const std::string& name, Matrix init) {
    if (index_.count(name)) {
        throw StateError("ParamStore: duplicate parameter name '" + name + "'");
    }
    init.ensure_finite("ParamStore::add");
    Entry e;
    e.name = name;
    e.grad = Matrix(init.rows(), init.cols());
    e.m = Matrix(init.rows(), init.cols());
    e.v = Matrix(init.rows(), init.cols());
    e.value = std::move(init);
    index_[name] = entries_.size();
    entries_.push_back(std::move(e));
    return entries_.back().value;
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw StateError("ParamStore: unknown parameter '" + name + "'");
    }
    return entries_[it->second];
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw StateError("ParamStore: unknown parameter '" + name + "'");
    }
    return entries_[it->second];
}

bool ParamStore::has(const std::string& name) const {
    return index_.count(name) != 0;
}

Matrix& ParamStore::value(const std::string& name) {
    return entry(name).value;
}

const Matrix& ParamStore::value(const std::string& name) const {
    return entry(name).value;
}

Matrix& ParamStore::grad(const std::string& name) {
    return entry(name).grad;
}

const Matrix& ParamStore::grad(const std::string& name) const {
    return entry(name).grad;
}

void ParamStore::accumulate_grad(const std::string& name, const Matrix& delta) {
    Entry& e = entry(name);
    if (!e.grad.same_shape(delta)) {
        throw DimensionError("ParamStore: gradient shape " + delta.shape_str() +
                             " does not match parameter '" + name + "' " +
                             e.value.shape_str());
    }
    for (std::size_t i = 0; i < e.grad.size(); ++i) {
        e.grad.data()[i] += delta.data()[i];
    }
}

void ParamStore::zero_grad() {
    for (Entry& e : entries_) {
        e.grad.fill(0.0);
    }
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const Entry& e : entries_) {
        n += e.value.size();
    }
    return n;
}

}  // namespace agegraph
