#include "agegraph/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agegraph/errors.hpp"
#include "agegraph/rng.hpp"

namespace agegraph {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_str());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw DimensionError("Matrix::from_rows: ragged rows");
        }
        std::size_t j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

Matrix Matrix::filled(std::size_t rows, std::size_t cols, double value) {
    Matrix m(rows, cols);
    m.fill(value);
    return m;
}

Matrix Matrix::glorot(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& v : m) {
        v = rng.uniform(-limit, limit);
    }
    return m;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void Matrix::fill(double value) {
    std::fill(data_.begin(), data_.end(), value);
}

bool Matrix::all_finite() const {
    // v * 0.0 is exactly 0.0 for finite v and NaN otherwise, so the probe
    // stays 0.0 iff every entry is finite. Branch-free and vectorizable,
    // unlike an isfinite() scan; this runs after every matrix op.
    double probe = 0.0;
    for (double v : data_) probe += v * 0.0;
    return probe == 0.0;
}

void Matrix::ensure_finite(const char* op) const {
    if (!all_finite()) {
        throw NumericError(std::string(op) + ": non-finite value in " + shape_str() +
                           " result");
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: incompatible shapes " + a.shape_str() + " by " +
                             b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t bc = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        double* __restrict orow = out.data() + i * bc;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) {
                continue;
            }
            const double* __restrict brow = b.data() + k * bc;
            for (std::size_t j = 0; j < bc; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    out.ensure_finite("matmul");
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_nt: incompatible shapes " + a.shape_str() + " by " +
                             b.shape_str() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * n;
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.data() + j * n;
            // four running sums keep the dot product out of a serial
            // dependency chain; recombined in a fixed order for determinism
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            std::size_t k = 0;
            for (; k + 4 <= n; k += 4) {
                s0 += arow[k] * brow[k];
                s1 += arow[k + 1] * brow[k + 1];
                s2 += arow[k + 2] * brow[k + 2];
                s3 += arow[k + 3] * brow[k + 3];
            }
            for (; k < n; ++k) s0 += arow[k] * brow[k];
            out(i, j) = (s0 + s1) + (s2 + s3);
        }
    }
    out.ensure_finite("matmul_nt");
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() +
                             " vs " + b.shape_str());
    }
}

}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "add");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] += b.data()[i];
    }
    out.ensure_finite("add");
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "sub");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] -= b.data()[i];
    }
    out.ensure_finite("sub");
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "hadamard");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] *= b.data()[i];
    }
    out.ensure_finite("hadamard");
    return out;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out = a;
    for (double& v : out) {
        v *= factor;
    }
    out.ensure_finite("scale");
    return out;
}

Matrix row_softmax(const Matrix& m) {
    m.ensure_finite("row_softmax input");
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row_max = std::max(row_max, m(i, j));
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double e = std::exp(m(i, j) - row_max);
            out(i, j) = e;
            denom += e;
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) /= denom;
        }
    }
    out.ensure_finite("row_softmax");
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    }
    return m;
}

}  // namespace agegraph
