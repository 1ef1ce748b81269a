#pragma once

#include <optional>
#include <span>
#include <vector>

#include "diagkit/errors.hpp"
#include "diagkit/matrix.hpp"

namespace diagkit {

struct Tolerances {
    double unitary = 1e-10;
    double idem = 1e-9;
    double diag = 1e-9;
};

/// Orthonormal family stored as the columns of a dim x k matrix.
class OrthonormalBasis {
public:
    OrthonormalBasis() = default;

    /// Validates the columns; throws PreconditionError when max|B*B - I| exceeds `tol`.
    explicit OrthonormalBasis(ComplexMatrix columns, double tol = Tolerances{}.unitary);

    /// Wraps columns produced by an internal construction without re-checking them.
    static OrthonormalBasis adopt(ComplexMatrix columns);
    static OrthonormalBasis standard(std::size_t n);

    std::size_t dim() const noexcept { return columns_.rows(); }
    std::size_t size() const noexcept { return columns_.cols(); }
    bool full() const noexcept { return dim() == size(); }
    const ComplexMatrix& columns() const noexcept { return columns_; }
    Vector vector(std::size_t j) const { return columns_.column(j); }

    double unitarity_residual() const;

private:
    ComplexMatrix columns_;
};

/// Residuals recorded for a construction.
struct Certificate {
    double idempotency_residual = 0.0;
    double unitarity_residual = 0.0;
    double diagonal_residual = 0.0;
    std::optional<double> norm_bound_claimed;
    double norm_observed = 0.0;
    std::optional<double> similarity_condition;

    /// Idempotency is judged relative to 1 + |D|^2 and the diagonal relative to 1 + |D|.
    bool passes(const Tolerances& tol = {}) const;
};

/// max |M* M - I| over entries.
double unitarity_residual(const ComplexMatrix& m);

/// (M b_j, b_j) for every column of B.
std::vector<Complex> diagonal_of(const ComplexMatrix& m, const OrthonormalBasis& b);

/// |M^2 - M| in operator norm.
double idempotency_residual(const ComplexMatrix& m);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

/// B* M B for a full basis.
ComplexMatrix change_of_basis(const ComplexMatrix& m, const OrthonormalBasis& b);

/// Number of singular values above tol * |M|.
std::size_t numerical_rank(const ComplexMatrix& m, double tol = 1e-9);

/// Residuals of D against an expected diagonal prefix in basis B.
Certificate certify(const ComplexMatrix& d, const OrthonormalBasis& b, std::span<const Complex> expected,
                    std::optional<double> norm_bound = std::nullopt);

}  // namespace diagkit
