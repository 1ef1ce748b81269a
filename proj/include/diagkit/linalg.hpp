#pragma once

#include <array>
#include <vector>

#include "diagkit/matrix.hpp"

namespace diagkit::linalg {

struct Svd {
    std::vector<double> sigma;  // descending
    ComplexMatrix u;            // rows x r, zero columns where sigma is 0
    ComplexMatrix v;            // cols x r, unitary when r == cols
};

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns
};

/// Unitary G on a coordinate pair with G* H G diagonal, for H = [[app, apq], [conj(apq), aqq]].
std::array<Complex, 4> jacobi_rotation(double app, double aqq, Complex apq);

/// One-sided (Hestenes) Jacobi SVD; small singular values keep relative accuracy.
Svd jacobi_svd(const ComplexMatrix& a);

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

/// Orthonormal basis for the column space; columns whose residual falls under
/// tol * (largest column norm) are dropped.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& a, double tol = 1e-10);

/// Extends orthonormal columns q (n x k) to an n x n unitary with q as its leading block.
ComplexMatrix complete_basis(const ComplexMatrix& q);

/// n x (n-1) orthonormal basis of the complement of the unit vector v (Householder reflector).
ComplexMatrix householder_complement(std::span<const Complex> v);

/// Solves A X = B by Gaussian elimination with partial pivoting; throws PreconditionError if singular.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix inverse(const ComplexMatrix& a);

}  // namespace diagkit::linalg
