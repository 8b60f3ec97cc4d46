#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "agegraph/matrix.hpp"
#include "agegraph/param_store.hpp"

namespace agegraph {

// Reverse-mode gradient tape over the operation set the model uses. A tape
// records one forward computation; backward() runs a single reverse sweep
// and flushes parameter gradients into their ParamStore accumulators
// (additively, so repeated backwards accumulate).
//
// Node ids are indices into the tape; inputs always have smaller ids than
// the nodes consuming them, so the reverse sweep is a plain reverse loop.
class Tape {
public:
    using NodeId = int;

    NodeId constant(Matrix value);
    // Memoized per (store, name): calling twice returns the same leaf.
    NodeId param(ParamStore& store, const std::string& name);

    NodeId matmul(NodeId a, NodeId b);
    NodeId matmul_nt(NodeId a, NodeId b);  // a * b^T
    NodeId transpose(NodeId a);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId hadamard(NodeId a, NodeId b);
    // out[i][j] = a[i][j] + row[0][j]
    NodeId add_row_broadcast(NodeId a, NodeId row);
    NodeId concat_cols(NodeId a, NodeId b);
    // out[i][j] = a[i][j] * col[i][0]
    NodeId scale_rows(NodeId a, NodeId col);
    // out[i][j] = a[i][j] * col[j][0]
    NodeId scale_cols(NodeId a, NodeId col);
    // 1x1: mean over rows of cosine(a_i, b_i); zero-norm rows contribute 0.
    NodeId mean_row_cosine(NodeId a, NodeId b);

    NodeId scale(NodeId a, double factor);
    // shift + slope * x, elementwise
    NodeId affine(NodeId a, double shift, double slope);
    NodeId relu(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId log(NodeId a);
    NodeId pow_const(NodeId a, double exponent);
    NodeId abs(NodeId a);
    NodeId clamp_min(NodeId a, double floor);
    NodeId row_softmax(NodeId a);
    NodeId row_sums(NodeId a);        // N x 1
    NodeId mean_over_rows(NodeId a);  // 1 x cols
    NodeId sum(NodeId a);             // 1 x 1
    NodeId pick(NodeId a, std::size_t r, std::size_t c);  // 1 x 1
    NodeId huber(NodeId a, double delta);

    const Matrix& value(NodeId id) const;
    const Matrix& grad(NodeId id) const;
    double scalar(NodeId id) const;

    // Reverse sweep from a 1x1 loss node. Throws StateError when nothing has
    // been recorded and DimensionError when the node is not scalar.
    void backward(NodeId loss);

    // Smallest distance of any relu/abs/clamp input from its kink, observed
    // during the forward pass. Finite-difference checks need this margin to
    // exceed the probe step; see grad_check.
    double kink_margin() const { return kink_margin_; }

    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op {
        Constant,
        Param,
        MatMul,
        MatMulNT,
        Transpose,
        Add,
        Sub,
        Hadamard,
        AddRowBroadcast,
        ConcatCols,
        ScaleRows,
        ScaleCols,
        MeanRowCosine,
        Affine,
        Relu,
        Sigmoid,
        Log,
        PowConst,
        Abs,
        ClampMin,
        RowSoftmax,
        RowSums,
        MeanOverRows,
        Sum,
        Pick,
        Huber,
    };

    struct Node {
        Op op;
        NodeId a = -1;
        NodeId b = -1;
        double k0 = 0.0;
        double k1 = 0.0;
        Matrix value;
        Matrix grad;
        ParamStore* store = nullptr;
        std::string param_name;
    };

    NodeId push(Node node);
    const Node& at(NodeId id) const;
    void backprop_node(NodeId id);
    void add_grad(NodeId id, const Matrix& delta);
    void observe_kink(double distance);

    std::vector<Node> nodes_;
    std::map<std::pair<const ParamStore*, std::string>, NodeId> param_cache_;
    double kink_margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace agegraph
