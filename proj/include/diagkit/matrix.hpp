#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace diagkit {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

/// Inner product (x, y) = sum_i x_i * conj(y_i); linear in the first slot.
Complex inner(std::span<const Complex> x, std::span<const Complex> y);
double norm2(std::span<const Complex> x);

/// Dense complex matrix, row-major. Entries are always finite.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major `data`; throws ShapeError on a length mismatch and
    /// DomainError on non-finite entries.
    static ComplexMatrix from_data(std::size_t rows, std::size_t cols, std::vector<Complex> data);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
    static ComplexMatrix from_columns(std::span<const Vector> columns, std::size_t dim);
    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Complex> data() const noexcept { return data_; }
    std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const Complex> v);
    ComplexMatrix select_columns(std::span<const std::size_t> idx) const;
    ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double max_abs() const;
    bool all_finite() const;
    std::vector<Complex> diag() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Matrix product. Zero entries of the left operand are skipped, so products with
/// block-sparse factors (direct sums) cost proportionally to their fill.
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
Vector operator*(const ComplexMatrix& a, std::span<const Complex> x);

/// Direct sum diag(a, b).
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks);

}  // namespace diagkit
