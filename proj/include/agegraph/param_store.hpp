#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "agegraph/matrix.hpp"

namespace agegraph {

// Named store of learnable arrays with per-entry gradient accumulators and
// Adam moment buffers. Iteration follows insertion order, which keeps
// optimizer sweeps and checkpoints deterministic.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Matrix value;
        Matrix grad;
        Matrix m;  // Adam first moment
        Matrix v;  // Adam second moment
    };

    Matrix& add(const std::string& name, Matrix init);

    bool has(const std::string& name) const;
    Matrix& value(const std::string& name);
    const Matrix& value(const std::string& name) const;
    Matrix& grad(const std::string& name);
    const Matrix& grad(const std::string& name) const;

    void accumulate_grad(const std::string& name, const Matrix& delta);
    void zero_grad();

    std::size_t size() const { return entries_.size(); }
    std::size_t scalar_count() const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<Entry>& entries() { return entries_; }

private:
    Entry& entry(const std::string& name);
    const Entry& entry(const std::string& name) const;

    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace agegraph
