#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "diagkit/core.hpp"

namespace diagkit::synth {

/// Role of a basis vector in a truncated construction.
enum class EntryLabel { requested, fill, boundary };

std::string_view to_string(EntryLabel label);

/// Idempotent D with basis B. Columns of B are ordered requested, fill, boundary; `target`
/// lists the intended diagonal for the requested and fill columns, `processed` counts the
/// requested ones.
struct SynthesisResult {
    ComplexMatrix d;
    OrthonormalBasis b;
    std::size_t processed = 0;
    std::vector<Complex> target;
    std::vector<EntryLabel> labels;
    Certificate cert;
};

enum class Route { fan, gkl };

ComplexMatrix idem_2x2_nilpotent(Complex z);

/// 2x2 idempotent with diagonal (3d-1, 2-3d) and norm at most 6|d|+4.
SynthesisResult idem_2x2_diag(Complex d);

/// K copies of the 2x2 block, rebased on triples to constant diagonal d. Requires K >= 3.
SynthesisResult idem_constant_diag(Complex d, std::size_t K);

/// Finite section of the sum over j of (D_{d_j} + D_{2 d_m - d_j}); `m_idx` is 0-based and
/// `depth` is the block count of every constant-diagonal constituent.
SynthesisResult idem_infinite_multiplicity(std::span<const Complex> d, std::size_t m_idx, std::size_t depth);

/// Bounded-sequence construction on a prefix: round-robin partition into J subsequences,
/// each realized through the infinite-multiplicity section and a halving bootstrap.
SynthesisResult idem_bounded_diag(std::span<const Complex> d, std::size_t J = 4, std::size_t depth = 3);

/// Bilinear outer product a a^T with a_j the principal square root of d_j.
ComplexMatrix sqrt_outer(std::span<const Complex> d);

/// Rank-one idempotent with diagonal d; throws DomainError unless the sum is 1.
SynthesisResult idem_rank_one(std::span<const Complex> d);

/// n x n idempotent with diagonal d; throws InfeasibleError outside the trichotomy
/// (all zeros, all ones, or an integer sum in 1..n-1).
SynthesisResult idem_matrix_exact(std::span<const Complex> d);

/// Finite-rank idempotent whose diagonal starts with d (integer sum m >= 1), padded with zeros.
SynthesisResult idem_finite_rank(std::span<const Complex> d, Route route);

}  // namespace diagkit::synth
