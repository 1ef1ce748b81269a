#pragma once

#include <span>
#include <vector>

#include "diagkit/core.hpp"

namespace diagkit::numrange {

/// Diagonal of [[1,0],[d,0]] after conjugation by the rotation R_theta = [[c,-s],[s,c]].
struct RotationOutcome {
    double theta = 0.0;
    double diag_hi = 0.0;  // (1 + cos 2t + d sin 2t) / 2
    double diag_lo = 0.0;  // (1 - cos 2t - d sin 2t) / 2
};

/// d^- = (sqrt(1+d^2) - 1) / 2, evaluated without cancellation.
double d_minus(double d);

ComplexMatrix rotation(double theta);
RotationOutcome rotation_diagonal(double d, double theta);
RotationOutcome min_diagonal_rotation(double d);

/// Angle in [0, atan(d)/2] with rotation_diagonal(d, theta).diag_lo == x, for x in [-d^-, 0].
double theta_for_target(double d, double x);

/// A point on the segment [d1, d2] written as lambda*d1 + (1-lambda)*d2.
struct SegmentTarget {
    Complex d1;
    Complex d2;
    Complex target;
    double lambda = 0.0;

    /// Projects `target` onto the segment; throws DomainError when it lies farther than
    /// 1e-9 (|d1| + |d2| + 1) from it. lambda is 0 for a degenerate segment.
    static SegmentTarget from_target(Complex d1, Complex d2, Complex target);
    static SegmentTarget from_lambda(Complex d1, Complex d2, double lambda);
};

struct FanPair {
    Vector b;
    Vector f;
};

/// Orthonormal {b, f} of C^2 with (Af,f) = target, (Ab,b) = d1 + d2 - target and |f_1|^2 <= lambda.
FanPair fan_pair(const ComplexMatrix& a, const SegmentTarget& t);

struct ConvexZero {
    std::vector<std::size_t> indices;
    std::vector<double> weights;
};

/// At most three of the points with convex weights whose combination is 0.
ConvexZero caratheodory_zero(std::span<const Complex> points, std::span<const double> weights);

/// Full basis in which the trace-zero matrix X has zero diagonal.
OrthonormalBasis zero_diagonal_basis(const ComplexMatrix& x);

struct ConstantRebasis {
    ComplexMatrix vectors;  // n x m, spans the same subspace as the selected columns
    Complex value;          // the common diagonal entry
};

/// Replaces the basis vectors at `idx` by orthonormal vectors of the same span on which M
/// has constant diagonal equal to the restricted trace divided by idx.size().
ConstantRebasis constant_diagonal_rebasis(const ComplexMatrix& m, const OrthonormalBasis& b,
                                          std::span<const std::size_t> idx);

}  // namespace diagkit::numrange
