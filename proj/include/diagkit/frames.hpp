#pragma once

#include <vector>

#include "diagkit/core.hpp"

namespace diagkit::frames {

/// N vectors x_n and N vectors y_n in C^dim.
struct FramePair {
    std::size_t dim = 0;
    std::vector<Vector> x;
    std::vector<Vector> y;

    /// max |sum_n y_n x_n^* - I|, i.e. the failure of sum_n (v, x_n) y_n = v.
    double duality_residual() const;
};

/// G_mn = (y_n, x_m); throws PreconditionError when the pair is not dual within tol.
ComplexMatrix cross_gramian(const FramePair& p, double tol = 1e-9);

struct Extraction {
    FramePair pair;
    double condition = 1.0;  // of the k x k system enforcing S A = I
};

/// Rank factorization D = A S with S A = I_k; x_m = conj(row m of A), y_n = column n of S.
Extraction extract_frames(const ComplexMatrix& d, double tol = Tolerances{}.idem);

/// y_n = F^{-1} x_n with F = sum_n x_n x_n^*.
FramePair canonical_dual(std::size_t dim, const std::vector<Vector>& x);

}  // namespace diagkit::frames
