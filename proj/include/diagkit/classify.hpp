#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "diagkit/core.hpp"

namespace diagkit::classify {

/// D = [[I,0],[T,0]] over ker^perp D + ker D, refined to ker T + (ker^perp T + range T) + range^perp T.
struct CanonicalDecomposition {
    std::size_t ker_dim = 0;
    std::size_t coker_dim = 0;              // dim ker^perp D
    ComplexMatrix t;                        // ker_dim x coker_dim
    ComplexMatrix four_block;               // [[I,0],[T~,0]] on ker^perp T + range T
    ComplexMatrix t_polar;                  // |T~|
    OrthonormalBasis two_block_basis;       // [ker^perp D | ker D]
    OrthonormalBasis four_block_basis;      // [ker T | ker^perp T | range T | range^perp T]
    std::size_t t_rank = 0;

    /// Rebuilds D from the two-block form.
    ComplexMatrix reassemble() const;
};

/// Throws PreconditionError unless idempotent within tol (relative to 1 + |D|^2).
CanonicalDecomposition canonical_decomposition(const ComplexMatrix& d, double tol = Tolerances{}.idem);

enum class TailKind { zeros, ones, divergent_below_half, divergent_above_half, class_flags };

std::string_view to_string(TailKind kind);
std::optional<TailKind> tail_kind_from_string(std::string_view name);

/// Summability of the tail (or of the nilpotent singular values in an infinite model).
struct ClassFlags {
    bool in_l1 = false;
    bool in_l2 = false;
    double sup = 0.0;
};

struct SequenceSpec {
    std::vector<Complex> head;
    TailKind tail = TailKind::zeros;
    std::optional<ClassFlags> flags;  // required when tail == class_flags

    /// Throws SpecificationError on inconsistent flags (in_l1 without in_l2, missing flags).
    void validate() const;
};

struct KadisonVerdict {
    bool feasible = false;
    double a = 0.0;  // may be +inf
    double b = 0.0;  // may be +inf
    std::optional<long long> index;
    bool ambiguous = false;  // a-b within [1e-9, 1e-6] of an integer
};

KadisonVerdict kadison_feasibility(const SequenceSpec& s);

/// Hermitian projection with the given diagonal in [0,1] and integer sum, built from
/// 2x2 rotations starting at diag(1,..,1,0,..,0).
ComplexMatrix projection_with_diagonal(std::span<const double> d);

using IdempotentModel = std::variant<ComplexMatrix, SequenceSpec>;

bool zero_diagonalizable(const IdempotentModel& m);

struct TraceShape {
    enum class Kind { plane, point, empty } kind = Kind::empty;
    Complex value;  // set for point
};

std::string_view to_string(TraceShape::Kind kind);

TraceShape trace_shape(const IdempotentModel& m);

/// Eigenvalues of 2 Re(e^{i theta} A_z) = [[2cos theta, e^{-i theta} conj z], [e^{i theta} z, 0]].
struct HermPair {
    double plus = 0.0;
    double minus = 0.0;
};

HermPair herm_part_spectrum_2x2(Complex z, double theta);

struct TraceGrowth {
    std::vector<double> pos;
    std::vector<double> neg;
    std::vector<double> sum_sq;  // running sum of d_n^2
    double c1 = 0.0;
    double c2 = 0.0;

    /// C1 * sum d^2 <= 2 neg_N <= C2 * sum d^2 at every prefix, with relative slack.
    bool sandwich_holds(double slack = 1e-12) const;
};

TraceGrowth finite_section_trace_growth(std::span<const double> d, double theta);

}  // namespace diagkit::classify
