#include "diagkit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "diagkit/errors.hpp"

namespace diagkit {

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    if (x.size() != y.size()) throw ShapeError("inner: length mismatch");
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // x_i * conj(y_i)
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].imag() * y[i].real() - x[i].real() * y[i].imag();
    }
    return {re, im};
}

double norm2(std::span<const Complex> x) {
    double scale = 0.0;
    for (const auto& v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& v : x) sum += std::norm(v / scale);
    return scale * std::sqrt(sum);
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix ComplexMatrix::from_data(std::size_t rows, std::size_t cols, std::vector<Complex> data) {
    if (data.size() != rows * cols) {
        throw ShapeError("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                         std::to_string(rows * cols));
    }
    ComplexMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    if (!m.all_finite()) throw DomainError("matrix entries must be finite");
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<Complex> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("ragged matrix literal");
        data.insert(data.end(), row.begin(), row.end());
    }
    return from_data(r, c, std::move(data));
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const Vector> columns, std::size_t dim) {
    ComplexMatrix m(dim, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) m.set_column(j, columns[j]);
    return m;
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

Vector ComplexMatrix::column(std::size_t j) const {
    if (j >= cols_) throw ShapeError("column index out of range");
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const Complex> v) {
    if (j >= cols_ || v.size() != rows_) throw ShapeError("set_column: shape mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

ComplexMatrix ComplexMatrix::select_columns(std::span<const std::size_t> idx) const {
    ComplexMatrix m(rows_, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= cols_) throw ShapeError("column index out of range");
        for (std::size_t i = 0; i < rows_; ++i) m(i, k) = (*this)(i, idx[k]);
    }
    return m;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeError("block out of range");
    ComplexMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw ShapeError("set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Complex ComplexMatrix::trace() const {
    if (!square()) throw ShapeError("trace of a non-square matrix");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

std::vector<Complex> ComplexMatrix::diag() const {
    const std::size_t n = std::min(rows_, cols_);
    std::vector<Complex> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
    return d;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix sum: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix difference: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matrix product: inner dimensions differ");
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    const std::size_t inner_dim = a.cols();
    std::vector<double> re(n * m, 0.0);
    std::vector<double> im(n * m, 0.0);
    const auto bd = b.data();
    for (std::size_t i = 0; i < n; ++i) {
        double* ri = re.data() + i * m;
        double* ii = im.data() + i * m;
        for (std::size_t k = 0; k < inner_dim; ++k) {
            const Complex aik = a(i, k);
            const double ar = aik.real();
            const double ai = aik.imag();
            if (ar == 0.0 && ai == 0.0) continue;
            const Complex* bk = bd.data() + k * m;
            for (std::size_t j = 0; j < m; ++j) {
                const double br = bk[j].real();
                const double bi = bk[j].imag();
                ri[j] += ar * br - ai * bi;
                ii[j] += ar * bi + ai * br;
            }
        }
    }
    std::vector<Complex> out(n * m);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {re[k], im[k]};
    return ComplexMatrix::from_data(n, m, std::move(out));
}

Vector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols() != x.size()) throw ShapeError("matrix-vector product: dimension mismatch");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double re = 0.0;
        double im = 0.0;
        const auto row = a.row(i);
        for (std::size_t k = 0; k < x.size(); ++k) {
            re += row[k].real() * x[k].real() - row[k].imag() * x[k].imag();
            im += row[k].real() * x[k].imag() + row[k].imag() * x[k].real();
        }
        y[i] = {re, im};
    }
    return y;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    return m;
}

ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks) {
    std::size_t r = 0;
    std::size_t c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    ComplexMatrix m(r, c);
    r = 0;
    c = 0;
    for (const auto& b : blocks) {
        m.set_block(r, c, b);
        r += b.rows();
        c += b.cols();
    }
    return m;
}

}  // namespace diagkit
