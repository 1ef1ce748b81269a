#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "diagkit/core.hpp"
#include "diagkit/matrix.hpp"

namespace testing {

using diagkit::Complex;
using diagkit::ComplexMatrix;

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = random_complex(rng, scale);
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
    const ComplexMatrix a = random_matrix(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

// Orthonormal columns via Gram-Schmidt on a random matrix.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
    ComplexMatrix q = random_matrix(rng, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex c = 0.0;
                for (std::size_t i = 0; i < n; ++i) c += std::conj(q(i, k)) * q(i, j);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= c * q(i, k);
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(q(i, j));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
    }
    return q;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

// Direct evaluation of (M x, x) without the library's diagonal_of.
inline Complex quad_form(const ComplexMatrix& m, const std::vector<Complex>& x) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::conj(x[i]) * m(i, j) * x[j];
    return s;
}

}  // namespace testing
