#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "diagkit/core.hpp"

namespace diagkit::rebase {

/// Targets for the bootstrap iteration: r_0..r_N are the diagonal entries of T on the
/// input family, d_1..d_N the running targets (d_0 := r_0), lambda_n the convexity
/// coefficient of d_n on the segment [d_{n-1}, r_n].
struct BootstrapPlan {
    std::vector<Complex> r;
    std::vector<Complex> d;
    std::vector<double> lambda;

    std::size_t steps() const noexcept { return d.size(); }
    Complex previous(std::size_t n) const { return n == 1 ? r[0] : d[n - 2]; }  // d_{n-1}, n >= 1

    /// lambda == 1/2 at every step: d_n is the midpoint of d_{n-1} and r_n.
    static BootstrapPlan halving(std::vector<Complex> r);
    /// Computes the convexity coefficients; throws DomainError naming the first off-segment step.
    static BootstrapPlan from_targets(std::vector<Complex> r, std::vector<Complex> d);
};

struct BootstrapResult {
    OrthonormalBasis b;             // b_1..b_N
    Vector f;                       // f_N
    std::vector<Complex> realized;  // (T b_n, b_n)
    std::vector<double> overlaps;   // |(f_n, f_{n-1})|^2
    double span_residual = 0.0;     // max |P_E - P_{b, f_N}|
};

BootstrapResult bootstrap_fan(const ComplexMatrix& t, const OrthonormalBasis& e, const BootstrapPlan& plan);

struct ZeroDiagPlan {
    std::vector<double> d;                         // nilpotent diagonal per pair
    std::vector<double> theta;                     // rotation per pair (0 where unprocessed)
    std::vector<std::size_t> m;                    // greedy boundaries m_1 < m_2 < ... (1-based pair counts)
    std::vector<std::vector<std::size_t>> groups;  // output-basis columns of each completed group
    std::vector<Complex> group_sums;               // diagonal sums of the groups before the final rebasis
    std::vector<std::size_t> unprocessed;          // output-basis columns outside every completed group
};

struct ZeroDiagResult {
    OrthonormalBasis g;  // column 2n pairs with f_n, column 2n+1 with f'_n
    ZeroDiagPlan plan;
};

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Greedy block boundaries for the nilpotent diagonal d (nonnegative), using at most K pairs.
std::vector<std::size_t> greedy_boundaries(std::span<const double> d, std::size_t K);

/// Rotates each (e_n, e'_n) pair and rebalances complete groups so the idempotent D has
/// zero diagonal on them. D must already be phase-normalized (real nonnegative d_n).
ZeroDiagResult zero_diagonalize_idempotent(const ComplexMatrix& d, const PairList& pairs, std::size_t K);

struct PhaseNormalized {
    ComplexMatrix matrix;    // B* D B
    OrthonormalBasis basis;  // e_n kept, e'_n replaced by conj(u_n) e'_n
    std::vector<Complex> phases;
};

PhaseNormalized phase_normalize(const ComplexMatrix& d, const PairList& pairs);

/// Partial sums s_n of a diagonal, an index subsequence n_1 < n_2 < ... (1-based counts)
/// and the limit s with |s_{n_k} - s| <= 2^-k.
struct PartialSumTrace {
    std::vector<Complex> s;
    std::vector<std::size_t> n;
    Complex limit;

    /// Picks each n_k as the first index after n_{k-1} meeting the 2^-k rule.
    static PartialSumTrace derive(std::span<const Complex> diagonal, Complex limit);
    static PartialSumTrace with_indices(std::span<const Complex> diagonal, std::vector<std::size_t> n, Complex limit);
};

struct AbsSumResult {
    OrthonormalBasis basis;
    std::size_t processed = 0;            // leading basis vectors covered by complete segments
    std::vector<Complex> segment_values;  // constant diagonal value per segment
    double abs_sum = 0.0;                 // sum of |diagonal| over the processed prefix
    double bound = 0.0;                   // |s_{n_1}| + 3/2
    bool truncated = false;               // some n_k exceeded the available dimension
};

AbsSumResult absolutely_summable_rebasis(const ComplexMatrix& t, const OrthonormalBasis& e,
                                         const PartialSumTrace& trace_info);

}  // namespace diagkit::rebase
