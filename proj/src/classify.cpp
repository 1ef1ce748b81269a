#include "diagkit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "diagkit/linalg.hpp"
#include "diagkit/numrange.hpp"

namespace diagkit::classify {

namespace {

// Rotates every column so its largest entry is real and positive.
void normalize_phases(ComplexMatrix& q) {
    for (std::size_t j = 0; j < q.cols(); ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < q.rows(); ++i)
            if (std::abs(q(i, j)) > std::abs(q(best, j)) + 1e-12) best = i;
        const double mag = std::abs(q(best, j));
        if (mag == 0.0) continue;
        const Complex phase = std::conj(q(best, j)) / mag;
        for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) *= phase;
    }
}

ComplexMatrix first_columns(const ComplexMatrix& m, std::size_t k) { return m.block(0, 0, m.rows(), k); }

// Orthonormal complement of the orthonormal columns q inside C^n.
ComplexMatrix complement(const ComplexMatrix& q, std::size_t n) {
    if (q.cols() == 0) return ComplexMatrix::identity(n);
    if (q.cols() >= n) return ComplexMatrix(n, 0);
    const ComplexMatrix full = linalg::complete_basis(q);
    return full.block(0, q.cols(), n, n - q.cols());
}

ComplexMatrix hstack(std::initializer_list<const ComplexMatrix*> parts, std::size_t rows) {
    std::size_t cols = 0;
    for (const auto* p : parts) cols += p->cols();
    ComplexMatrix out(rows, cols);
    std::size_t c = 0;
    for (const auto* p : parts) {
        if (p->cols() > 0) out.set_block(0, c, *p);
        c += p->cols();
    }
    return out;
}

ComplexMatrix mul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() == 0 || a.rows() == 0 || b.cols() == 0) return ComplexMatrix(a.rows(), b.cols());
    return a * b;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
    const std::size_t n = h.rows();
    if (n == 0) return h;
    const auto eig = linalg::hermitian_eigen(h);
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::sqrt(std::max(0.0, eig.values[k]));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) += s * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    }
    return out;
}

void check_idempotent(const ComplexMatrix& d, double tol, const char* who) {
    if (!d.square()) throw ShapeError(std::string(who) + ": matrix must be square");
    const double norm = operator_norm(d);
    const double r = idempotency_residual(d);
    if (r > tol * (1.0 + norm * norm)) {
        throw PreconditionError(std::string(who) + ": not idempotent (residual " + std::to_string(r) + ")");
    }
}

const ClassFlags& required_flags(const SequenceSpec& s, const char* who) {
    if (s.tail != TailKind::class_flags || !s.flags) {
        throw SpecificationError(std::string(who) + ": infinite model needs class flags for its nilpotent part");
    }
    s.validate();
    return *s.flags;
}

}  // namespace

ComplexMatrix CanonicalDecomposition::reassemble() const {
    const std::size_t n = ker_dim + coker_dim;
    ComplexMatrix form(n, n);
    for (std::size_t i = 0; i < coker_dim; ++i) form(i, i) = 1.0;
    if (ker_dim > 0 && coker_dim > 0) form.set_block(coker_dim, 0, t);
    const ComplexMatrix& w = two_block_basis.columns();
    return mul(mul(w, form), w.adjoint());
}

CanonicalDecomposition canonical_decomposition(const ComplexMatrix& d, double tol) {
    check_idempotent(d, tol, "canonical_decomposition");
    const std::size_t n = d.rows();
    CanonicalDecomposition out;
    if (n == 0) return out;

    const auto svd = linalg::jacobi_svd(d);
    const double norm = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    std::size_t k = 0;
    while (k < svd.sigma.size() && svd.sigma[k] > 1e-9 * norm) ++k;
    ComplexMatrix r = first_columns(svd.v, k);
    ComplexMatrix kernel = complement(r, n);
    normalize_phases(r);
    normalize_phases(kernel);
    out.coker_dim = k;
    out.ker_dim = n - k;
    out.two_block_basis = OrthonormalBasis::adopt(hstack({&r, &kernel}, n));
    out.t = mul(kernel.adjoint(), mul(d, r));

    // refine by the singular vectors of T
    const std::size_t kd = out.ker_dim;
    ComplexMatrix v_s(k, 0);
    ComplexMatrix u_s(kd, 0);
    std::size_t s = 0;
    if (k > 0 && kd > 0) {
        const auto ts = linalg::jacobi_svd(out.t);
        const double tnorm = ts.sigma.empty() ? 0.0 : ts.sigma.front();
        while (s < ts.sigma.size() && ts.sigma[s] > 1e-9 * std::max(1.0, tnorm) && ts.sigma[s] > 0.0) ++s;
        v_s = first_columns(ts.v, s);
        u_s = first_columns(ts.u, s);
    }
    out.t_rank = s;
    const ComplexMatrix ker_t = complement(v_s, k);
    const ComplexMatrix range_perp = complement(u_s, kd);
    const ComplexMatrix a0 = mul(r, ker_t);
    const ComplexMatrix a1 = mul(r, v_s);
    const ComplexMatrix a2 = mul(kernel, u_s);
    const ComplexMatrix a3 = mul(kernel, range_perp);
    out.four_block_basis = OrthonormalBasis::adopt(hstack({&a0, &a1, &a2, &a3}, n));

    const ComplexMatrix t_tilde = mul(u_s.adjoint(), mul(out.t, v_s));
    out.four_block = ComplexMatrix(2 * s, 2 * s);
    for (std::size_t i = 0; i < s; ++i) out.four_block(i, i) = 1.0;
    if (s > 0) out.four_block.set_block(s, 0, t_tilde);
    out.t_polar = psd_sqrt(mul(t_tilde.adjoint(), t_tilde));
    return out;
}

std::string_view to_string(TailKind kind) {
    switch (kind) {
        case TailKind::zeros: return "zeros";
        case TailKind::ones: return "ones";
        case TailKind::divergent_below_half: return "divergent_below_half";
        case TailKind::divergent_above_half: return "divergent_above_half";
        case TailKind::class_flags: return "class_flags";
    }
    return "unknown";
}

std::optional<TailKind> tail_kind_from_string(std::string_view name) {
    for (auto k : {TailKind::zeros, TailKind::ones, TailKind::divergent_below_half, TailKind::divergent_above_half,
                   TailKind::class_flags}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

void SequenceSpec::validate() const {
    if (tail == TailKind::class_flags && !flags) throw SpecificationError("sequence: class_flags tail without flags");
    if (flags && flags->in_l1 && !flags->in_l2) throw SpecificationError("sequence: in_l1 requires in_l2");
}

KadisonVerdict kadison_feasibility(const SequenceSpec& s) {
    s.validate();
    if (s.tail == TailKind::class_flags) {
        throw SpecificationError("kadison_feasibility: tail must be zeros, ones or a divergence class");
    }
    KadisonVerdict v;
    for (const auto& x : s.head) {
        if (std::abs(x.imag()) > 1e-12 || x.real() < -1e-12 || x.real() > 1.0 + 1e-12) {
            throw DomainError("kadison_feasibility: head entries must lie in [0,1]");
        }
        const double d = std::clamp(x.real(), 0.0, 1.0);
        if (d < 0.5)
            v.a += d;
        else
            v.b += 1.0 - d;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (s.tail == TailKind::divergent_below_half) v.a = inf;
    if (s.tail == TailKind::divergent_above_half) v.b = inf;
    if (std::isinf(v.a) || std::isinf(v.b)) {
        v.feasible = true;
        return v;
    }
    const double diff = v.a - v.b;
    const double nearest = std::round(diff);
    const double dist = std::abs(diff - nearest);
    v.feasible = dist <= 1e-9;
    v.ambiguous = dist > 1e-9 && dist <= 1e-6;
    if (v.feasible) v.index = static_cast<long long>(nearest);
    return v;
}

ComplexMatrix projection_with_diagonal(std::span<const double> d) {
    const std::size_t n = d.size();
    for (double x : d) {
        if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw DomainError("projection_with_diagonal: entries must lie in [0,1]");
    }
    const double sum = std::accumulate(d.begin(), d.end(), 0.0);
    const double rank = std::round(sum);
    if (std::abs(sum - rank) > 1e-9 * std::max<double>(1.0, static_cast<double>(n))) {
        throw InfeasibleError("projection_with_diagonal: diagonal sum is not an integer");
    }
    const auto k = static_cast<std::size_t>(rank);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = std::clamp(d[order[i]], 0.0, 1.0);
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) c[i] = 1.0;

    ComplexMatrix p(n, n);
    for (std::size_t i = 0; i < k; ++i) p(i, i) = 1.0;
    constexpr double eps = 1e-13;
    for (std::size_t step = 0; step < 4 * n + 4; ++step) {
        std::size_t i = 0;
        while (i < n && std::abs(c[i] - target[i]) <= eps) ++i;
        if (i == n) break;
        std::size_t j = i + 1;
        while (j < n && c[j] >= target[j] - eps) ++j;
        if (j == n || c[i] < target[i]) break;
        const double delta = std::min(c[i] - target[i], target[j] - c[j]);
        const double value = c[i] - delta;

        const auto a = ComplexMatrix::from_rows({{p(i, i), p(i, j)}, {p(j, i), p(j, j)}});
        const auto pair = numrange::fan_pair(a, numrange::SegmentTarget::from_target(a(0, 0), a(1, 1), value));
        // columns i, j of U are f and b; P <- U* P U
        for (std::size_t col = 0; col < n; ++col) {
            const Complex x = p(i, col);
            const Complex y = p(j, col);
            p(i, col) = std::conj(pair.f[0]) * x + std::conj(pair.f[1]) * y;
            p(j, col) = std::conj(pair.b[0]) * x + std::conj(pair.b[1]) * y;
        }
        for (std::size_t row = 0; row < n; ++row) {
            const Complex x = p(row, i);
            const Complex y = p(row, j);
            p(row, i) = x * pair.f[0] + y * pair.f[1];
            p(row, j) = x * pair.b[0] + y * pair.b[1];
        }
        c[j] += c[i] - value;
        c[i] = value;
    }

    ComplexMatrix out(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) out(order[a], order[b]) = p(a, b);
    return out;
}

bool zero_diagonalizable(const IdempotentModel& m) {
    if (const auto* d = std::get_if<ComplexMatrix>(&m)) {
        check_idempotent(*d, Tolerances{}.idem, "zero_diagonalizable");
        return d->rows() == 0 || numerical_rank(*d) == 0;
    }
    return !required_flags(std::get<SequenceSpec>(m), "zero_diagonalizable").in_l2;
}

std::string_view to_string(TraceShape::Kind kind) {
    switch (kind) {
        case TraceShape::Kind::plane: return "plane";
        case TraceShape::Kind::point: return "point";
        case TraceShape::Kind::empty: return "empty";
    }
    return "unknown";
}

TraceShape trace_shape(const IdempotentModel& m) {
    if (const auto* d = std::get_if<ComplexMatrix>(&m)) {
        check_idempotent(*d, Tolerances{}.idem, "trace_shape");
        return {TraceShape::Kind::point, d->trace()};
    }
    const auto& flags = required_flags(std::get<SequenceSpec>(m), "trace_shape");
    return {flags.in_l2 ? TraceShape::Kind::empty : TraceShape::Kind::plane, Complex{}};
}

HermPair herm_part_spectrum_2x2(Complex z, double theta) {
    const double c = std::cos(theta);
    const double z2 = std::norm(z);
    const double r = std::hypot(c, std::abs(z));
    HermPair out;
    // the product of the pair is -|z|^2; take the larger-magnitude root directly
    if (c >= 0.0) {
        out.plus = c + r;
        out.minus = out.plus == 0.0 ? 0.0 : -z2 / out.plus;
    } else {
        out.minus = c - r;
        out.plus = -z2 / out.minus;
    }
    return out;
}

bool TraceGrowth::sandwich_holds(double slack) const {
    for (std::size_t n = 0; n < neg.size(); ++n) {
        const double twice = 2.0 * neg[n];
        if (c1 * sum_sq[n] > twice * (1.0 + slack) + 1e-300) return false;
        if (twice > c2 * sum_sq[n] * (1.0 + slack) + 1e-300) return false;
    }
    return true;
}

TraceGrowth finite_section_trace_growth(std::span<const double> d, double theta) {
    if (!(std::abs(theta) < std::numbers::pi / 2.0)) {
        throw DomainError("finite_section_trace_growth: |theta| must be below pi/2");
    }
    TraceGrowth g;
    const double c = std::cos(theta);
    double dmax = 0.0;
    for (double x : d) {
        if (!(x >= 0.0)) throw DomainError("finite_section_trace_growth: entries must be nonnegative");
        dmax = std::max(dmax, x);
    }
    g.c1 = 1.0 / (c + std::hypot(c, dmax));
    g.c2 = 1.0 / (2.0 * c);
    double pos = 0.0;
    double neg = 0.0;
    double sq = 0.0;
    for (double x : d) {
        const auto pair = herm_part_spectrum_2x2(x, theta);
        pos += pair.plus / 2.0;
        neg += -pair.minus / 2.0;
        sq += x * x;
        g.pos.push_back(pos);
        g.neg.push_back(neg);
        g.sum_sq.push_back(sq);
    }
    return g;
}

}  // namespace diagkit::classify
