#include "agegraph/tape.hpp"

#include <cmath>
#include <cstdio>

#include "agegraph/errors.hpp"

namespace agegraph {

namespace {

std::string id_error(const char* what, int id, std::size_t count) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "tape: %s node id %d (tape holds %zu nodes)",
                  what, id, count);
    return std::string(buf);
}

}  // namespace

Tape::NodeId Tape::push(Node node) {
    node.value.ensure_finite("tape op");
    nodes_.push_back(std::move(node));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

const Tape::Node& Tape::at(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
        throw StateError(id_error("unknown", id, nodes_.size()));
    return nodes_[static_cast<std::size_t>(id)];
}

const Matrix& Tape::value(NodeId id) const { return at(id).value; }

const Matrix& Tape::grad(NodeId id) const {
    const Node& n = at(id);
    if (n.grad.rows() == 0) throw StateError("tape: gradient read before backward()");
    return n.grad;
}

double Tape::scalar(NodeId id) const {
    const Matrix& v = value(id);
    if (v.rows() != 1 || v.cols() != 1)
        throw DimensionError("tape: scalar() on non-scalar node of shape " + v.shape_str());
    return v(0, 0);
}

void Tape::observe_kink(double distance) {
    if (distance < kink_margin_) kink_margin_ = distance;
}

Tape::NodeId Tape::constant(Matrix value) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::NodeId Tape::param(ParamStore& store, const std::string& name) {
    auto key = std::make_pair(static_cast<const ParamStore*>(&store), name);
    auto it = param_cache_.find(key);
    if (it != param_cache_.end()) return it->second;
    Node n;
    n.op = Op::Param;
    n.value = store.value(name);
    n.store = &store;
    n.param_name = name;
    NodeId id = push(std::move(n));
    param_cache_.emplace(key, id);
    return id;
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
    Node n;
    n.op = Op::MatMul;
    n.a = a;
    n.b = b;
    n.value = agegraph::matmul(value(a), value(b));
    return push(std::move(n));
}

Tape::NodeId Tape::matmul_nt(NodeId a, NodeId b) {
    Node n;
    n.op = Op::MatMulNT;
    n.a = a;
    n.b = b;
    n.value = agegraph::matmul_nt(value(a), value(b));
    return push(std::move(n));
}

Tape::NodeId Tape::transpose(NodeId a) {
    Node n;
    n.op = Op::Transpose;
    n.a = a;
    n.value = agegraph::transpose(value(a));
    return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.value = agegraph::add(value(a), value(b));
    return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
    Node n;
    n.op = Op::Sub;
    n.a = a;
    n.b = b;
    n.value = agegraph::sub(value(a), value(b));
    return push(std::move(n));
}

Tape::NodeId Tape::hadamard(NodeId a, NodeId b) {
    Node n;
    n.op = Op::Hadamard;
    n.a = a;
    n.b = b;
    n.value = agegraph::hadamard(value(a), value(b));
    return push(std::move(n));
}

Tape::NodeId Tape::add_row_broadcast(NodeId a, NodeId row) {
    const Matrix& va = value(a);
    const Matrix& vr = value(row);
    if (vr.rows() != 1 || vr.cols() != va.cols())
        throw DimensionError("tape: add_row_broadcast wants 1x" +
                             std::to_string(va.cols()) + " row, got " + vr.shape_str());
    Node n;
    n.op = Op::AddRowBroadcast;
    n.a = a;
    n.b = row;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) out(i, j) = va(i, j) + vr(0, j);
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::concat_cols(NodeId a, NodeId b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (va.rows() != vb.rows())
        throw DimensionError("tape: concat_cols row mismatch " + va.shape_str() +
                             " vs " + vb.shape_str());
    Node n;
    n.op = Op::ConcatCols;
    n.a = a;
    n.b = b;
    Matrix out(va.rows(), va.cols() + vb.cols());
    for (std::size_t i = 0; i < va.rows(); ++i) {
        for (std::size_t j = 0; j < va.cols(); ++j) out(i, j) = va(i, j);
        for (std::size_t j = 0; j < vb.cols(); ++j) out(i, va.cols() + j) = vb(i, j);
    }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::scale_rows(NodeId a, NodeId col) {
    const Matrix& va = value(a);
    const Matrix& vc = value(col);
    if (vc.cols() != 1 || vc.rows() != va.rows())
        throw DimensionError("tape: scale_rows wants " + std::to_string(va.rows()) +
                             "x1 column, got " + vc.shape_str());
    Node n;
    n.op = Op::ScaleRows;
    n.a = a;
    n.b = col;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) out(i, j) = va(i, j) * vc(i, 0);
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::scale_cols(NodeId a, NodeId col) {
    const Matrix& va = value(a);
    const Matrix& vc = value(col);
    if (vc.cols() != 1 || vc.rows() != va.cols())
        throw DimensionError("tape: scale_cols wants " + std::to_string(va.cols()) +
                             "x1 column, got " + vc.shape_str());
    Node n;
    n.op = Op::ScaleCols;
    n.a = a;
    n.b = col;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) out(i, j) = va(i, j) * vc(j, 0);
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::mean_row_cosine(NodeId a, NodeId b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (!va.same_shape(vb))
        throw DimensionError("tape: mean_row_cosine shape mismatch " + va.shape_str() +
                             " vs " + vb.shape_str());
    Node n;
    n.op = Op::MeanRowCosine;
    n.a = a;
    n.b = b;
    double total = 0.0;
    for (std::size_t i = 0; i < va.rows(); ++i) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t j = 0; j < va.cols(); ++j) {
            dot += va(i, j) * vb(i, j);
            na += va(i, j) * va(i, j);
            nb += vb(i, j) * vb(i, j);
        }
        na = std::sqrt(na);
        nb = std::sqrt(nb);
        if (na > 1e-12 && nb > 1e-12) total += dot / (na * nb);
    }
    Matrix out(1, 1);
    out(0, 0) = va.rows() == 0 ? 0.0 : total / static_cast<double>(va.rows());
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double factor) { return affine(a, 0.0, factor); }

Tape::NodeId Tape::affine(NodeId a, double shift, double slope) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Affine;
    n.a = a;
    n.k0 = shift;
    n.k1 = slope;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) out(i, j) = shift + slope * va(i, j);
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::relu(NodeId a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Relu;
    n.a = a;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) {
            observe_kink(std::fabs(va(i, j)));
            out(i, j) = va(i, j) > 0.0 ? va(i, j) : 0.0;
        }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::sigmoid(NodeId a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Sigmoid;
    n.a = a;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) {
            double x = va(i, j);
            out(i, j) = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                 : std::exp(x) / (1.0 + std::exp(x));
        }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::log(NodeId a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Log;
    n.a = a;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) {
            if (va(i, j) <= 0.0)
                throw DomainError("tape: log of non-positive value");
            out(i, j) = std::log(va(i, j));
        }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::pow_const(NodeId a, double exponent) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::PowConst;
    n.a = a;
    n.k0 = exponent;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) out(i, j) = std::pow(va(i, j), exponent);
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::abs(NodeId a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Abs;
    n.a = a;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) {
            observe_kink(std::fabs(va(i, j)));
            out(i, j) = std::fabs(va(i, j));
        }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::clamp_min(NodeId a, double floor) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::ClampMin;
    n.a = a;
    n.k0 = floor;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) {
            observe_kink(std::fabs(va(i, j) - floor));
            out(i, j) = va(i, j) > floor ? va(i, j) : floor;
        }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::row_softmax(NodeId a) {
    Node n;
    n.op = Op::RowSoftmax;
    n.a = a;
    n.value = agegraph::row_softmax(value(a));
    return push(std::move(n));
}

Tape::NodeId Tape::row_sums(NodeId a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::RowSums;
    n.a = a;
    Matrix out(va.rows(), 1);
    for (std::size_t i = 0; i < va.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < va.cols(); ++j) s += va(i, j);
        out(i, 0) = s;
    }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::mean_over_rows(NodeId a) {
    const Matrix& va = value(a);
    if (va.rows() == 0) throw DimensionError("tape: mean_over_rows of empty matrix");
    Node n;
    n.op = Op::MeanOverRows;
    n.a = a;
    Matrix out(1, va.cols());
    for (std::size_t j = 0; j < va.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < va.rows(); ++i) s += va(i, j);
        out(0, j) = s / static_cast<double>(va.rows());
    }
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::sum(NodeId a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Sum;
    n.a = a;
    Matrix out(1, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) s += va(i, j);
    out(0, 0) = s;
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::pick(NodeId a, std::size_t r, std::size_t c) {
    const Matrix& va = value(a);
    if (r >= va.rows() || c >= va.cols())
        throw DimensionError("tape: pick(" + std::to_string(r) + "," + std::to_string(c) +
                             ") outside " + va.shape_str());
    Node n;
    n.op = Op::Pick;
    n.a = a;
    n.k0 = static_cast<double>(r);
    n.k1 = static_cast<double>(c);
    Matrix out(1, 1);
    out(0, 0) = va(r, c);
    n.value = std::move(out);
    return push(std::move(n));
}

Tape::NodeId Tape::huber(NodeId a, double delta) {
    if (delta <= 0.0) throw DomainError("tape: huber delta must be positive");
    const Matrix& va = value(a);
    Node n;
    n.op = Op::Huber;
    n.a = a;
    n.k0 = delta;
    Matrix out(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) {
            double x = va(i, j);
            double ax = std::fabs(x);
            out(i, j) = ax <= delta ? 0.5 * x * x : delta * (ax - 0.5 * delta);
        }
    n.value = std::move(out);
    return push(std::move(n));
}

void Tape::add_grad(NodeId id, const Matrix& delta) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < delta.rows(); ++i)
        for (std::size_t j = 0; j < delta.cols(); ++j) n.grad(i, j) += delta(i, j);
}

void Tape::backward(NodeId loss) {
    if (nodes_.empty()) throw StateError("tape: backward() on empty tape");
    const Node& top = at(loss);
    if (top.value.rows() != 1 || top.value.cols() != 1)
        throw DimensionError("tape: backward() wants a 1x1 loss, got " +
                             top.value.shape_str());

    for (Node& n : nodes_) {
        n.grad = Matrix(n.value.rows(), n.value.cols());
    }
    nodes_[static_cast<std::size_t>(loss)].grad(0, 0) = 1.0;

    for (NodeId id = loss; id >= 0; --id) backprop_node(id);

    for (Node& n : nodes_) {
        if (n.op == Op::Param) n.store->accumulate_grad(n.param_name, n.grad);
        n.grad.ensure_finite("tape backward");
    }
}

void Tape::backprop_node(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    const Matrix& g = n.grad;
    switch (n.op) {
        case Op::Constant:
        case Op::Param:
            break;
        case Op::MatMul: {
            add_grad(n.a, agegraph::matmul_nt(g, value(n.b)));
            add_grad(n.b, agegraph::matmul(agegraph::transpose(value(n.a)), g));
            break;
        }
        case Op::MatMulNT: {
            add_grad(n.a, agegraph::matmul(g, value(n.b)));
            add_grad(n.b, agegraph::matmul(agegraph::transpose(g), value(n.a)));
            break;
        }
        case Op::Transpose: {
            add_grad(n.a, agegraph::transpose(g));
            break;
        }
        case Op::Add: {
            add_grad(n.a, g);
            add_grad(n.b, g);
            break;
        }
        case Op::Sub: {
            add_grad(n.a, g);
            add_grad(n.b, agegraph::scale(g, -1.0));
            break;
        }
        case Op::Hadamard: {
            add_grad(n.a, agegraph::hadamard(g, value(n.b)));
            add_grad(n.b, agegraph::hadamard(g, value(n.a)));
            break;
        }
        case Op::AddRowBroadcast: {
            add_grad(n.a, g);
            Matrix dr(1, g.cols());
            for (std::size_t j = 0; j < g.cols(); ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < g.rows(); ++i) s += g(i, j);
                dr(0, j) = s;
            }
            add_grad(n.b, dr);
            break;
        }
        case Op::ConcatCols: {
            const Matrix& va = value(n.a);
            const Matrix& vb = value(n.b);
            Matrix da(va.rows(), va.cols());
            Matrix db(vb.rows(), vb.cols());
            for (std::size_t i = 0; i < va.rows(); ++i) {
                for (std::size_t j = 0; j < va.cols(); ++j) da(i, j) = g(i, j);
                for (std::size_t j = 0; j < vb.cols(); ++j) db(i, j) = g(i, va.cols() + j);
            }
            add_grad(n.a, da);
            add_grad(n.b, db);
            break;
        }
        case Op::ScaleRows: {
            const Matrix& va = value(n.a);
            const Matrix& vc = value(n.b);
            Matrix da(va.rows(), va.cols());
            Matrix dc(vc.rows(), 1);
            for (std::size_t i = 0; i < va.rows(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < va.cols(); ++j) {
                    da(i, j) = g(i, j) * vc(i, 0);
                    s += g(i, j) * va(i, j);
                }
                dc(i, 0) = s;
            }
            add_grad(n.a, da);
            add_grad(n.b, dc);
            break;
        }
        case Op::ScaleCols: {
            const Matrix& va = value(n.a);
            const Matrix& vc = value(n.b);
            Matrix da(va.rows(), va.cols());
            Matrix dc(vc.rows(), 1);
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j) {
                    da(i, j) = g(i, j) * vc(j, 0);
                    dc(j, 0) += g(i, j) * va(i, j);
                }
            add_grad(n.a, da);
            add_grad(n.b, dc);
            break;
        }
        case Op::MeanRowCosine: {
            const Matrix& va = value(n.a);
            const Matrix& vb = value(n.b);
            double gs = g(0, 0);
            if (va.rows() == 0) break;
            double inv_n = 1.0 / static_cast<double>(va.rows());
            Matrix da(va.rows(), va.cols());
            Matrix db(vb.rows(), vb.cols());
            for (std::size_t i = 0; i < va.rows(); ++i) {
                double dot = 0.0, na2 = 0.0, nb2 = 0.0;
                for (std::size_t j = 0; j < va.cols(); ++j) {
                    dot += va(i, j) * vb(i, j);
                    na2 += va(i, j) * va(i, j);
                    nb2 += vb(i, j) * vb(i, j);
                }
                double na = std::sqrt(na2);
                double nb = std::sqrt(nb2);
                if (na <= 1e-12 || nb <= 1e-12) continue;
                double cosi = dot / (na * nb);
                for (std::size_t j = 0; j < va.cols(); ++j) {
                    da(i, j) = gs * inv_n * (vb(i, j) / (na * nb) - cosi * va(i, j) / na2);
                    db(i, j) = gs * inv_n * (va(i, j) / (na * nb) - cosi * vb(i, j) / nb2);
                }
            }
            add_grad(n.a, da);
            add_grad(n.b, db);
            break;
        }
        case Op::Affine: {
            add_grad(n.a, agegraph::scale(g, n.k1));
            break;
        }
        case Op::Relu: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j)
                    da(i, j) = va(i, j) > 0.0 ? g(i, j) : 0.0;
            add_grad(n.a, da);
            break;
        }
        case Op::Sigmoid: {
            const Matrix& s = n.value;
            Matrix da(s.rows(), s.cols());
            for (std::size_t i = 0; i < s.rows(); ++i)
                for (std::size_t j = 0; j < s.cols(); ++j)
                    da(i, j) = g(i, j) * s(i, j) * (1.0 - s(i, j));
            add_grad(n.a, da);
            break;
        }
        case Op::Log: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j) da(i, j) = g(i, j) / va(i, j);
            add_grad(n.a, da);
            break;
        }
        case Op::PowConst: {
            if (n.k0 == 0.0) break;  // constant output, zero gradient
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j)
                    da(i, j) = g(i, j) * n.k0 * std::pow(va(i, j), n.k0 - 1.0);
            add_grad(n.a, da);
            break;
        }
        case Op::Abs: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j) {
                    double sgn = va(i, j) > 0.0 ? 1.0 : (va(i, j) < 0.0 ? -1.0 : 0.0);
                    da(i, j) = g(i, j) * sgn;
                }
            add_grad(n.a, da);
            break;
        }
        case Op::ClampMin: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j)
                    da(i, j) = va(i, j) > n.k0 ? g(i, j) : 0.0;
            add_grad(n.a, da);
            break;
        }
        case Op::RowSoftmax: {
            const Matrix& s = n.value;
            Matrix da(s.rows(), s.cols());
            for (std::size_t i = 0; i < s.rows(); ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < s.cols(); ++j) dot += g(i, j) * s(i, j);
                for (std::size_t j = 0; j < s.cols(); ++j)
                    da(i, j) = s(i, j) * (g(i, j) - dot);
            }
            add_grad(n.a, da);
            break;
        }
        case Op::RowSums: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j) da(i, j) = g(i, 0);
            add_grad(n.a, da);
            break;
        }
        case Op::MeanOverRows: {
            const Matrix& va = value(n.a);
            double inv_n = 1.0 / static_cast<double>(va.rows());
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j) da(i, j) = g(0, j) * inv_n;
            add_grad(n.a, da);
            break;
        }
        case Op::Sum: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            da.fill(g(0, 0));
            add_grad(n.a, da);
            break;
        }
        case Op::Pick: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            da(static_cast<std::size_t>(n.k0), static_cast<std::size_t>(n.k1)) = g(0, 0);
            add_grad(n.a, da);
            break;
        }
        case Op::Huber: {
            const Matrix& va = value(n.a);
            Matrix da(va.rows(), va.cols());
            for (std::size_t i = 0; i < va.rows(); ++i)
                for (std::size_t j = 0; j < va.cols(); ++j) {
                    double x = va(i, j);
                    double d = x > n.k0 ? n.k0 : (x < -n.k0 ? -n.k0 : x);
                    da(i, j) = g(i, j) * d;
                }
            add_grad(n.a, da);
            break;
        }
    }
}

}  // namespace agegraph
