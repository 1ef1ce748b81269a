#include "diagkit/rebase.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "diagkit/numrange.hpp"

namespace diagkit::rebase {

namespace {

struct Greedy {
    std::vector<std::size_t> m;
    std::vector<double> theta;
};

Greedy run_greedy(std::span<const double> d, std::size_t K) {
    Greedy g;
    g.theta.assign(K, 0.0);
    std::vector<double> dm(K);
    for (std::size_t n = 0; n < K; ++n) dm[n] = numrange::d_minus(d[n]);
    std::size_t prev = 0;
    for (std::size_t k = 1; prev < K; ++k) {
        // (D f_k, f_k); for k = 1 the angle of pair 1 is the minimizing one
        const double value =
            k == 1 ? 1.0 + dm[0] : numrange::rotation_diagonal(d[k - 1], g.theta[k - 1]).diag_hi;
        double acc = 0.0;
        std::size_t boundary = K;
        for (std::size_t n = prev; n < K; ++n) {
            acc += dm[n];
            if (acc >= value) {
                boundary = n;
                break;
            }
        }
        if (boundary == K) break;
        for (std::size_t j = prev; j < boundary; ++j) g.theta[j] = std::atan(d[j]) / 2.0;
        const double x = std::clamp(-value + (acc - dm[boundary]), -dm[boundary], 0.0);
        g.theta[boundary] = numrange::theta_for_target(d[boundary], x);
        g.m.push_back(boundary + 1);
        prev = boundary + 1;
    }
    return g;
}

void check_pairs(const ComplexMatrix& d, const PairList& pairs) {
    if (!d.square()) throw ShapeError("operator must be square");
    std::set<std::size_t> seen;
    for (const auto& [a, b] : pairs) {
        if (a >= d.rows() || b >= d.rows()) throw ShapeError("pair index out of range");
        if (!seen.insert(a).second || !seen.insert(b).second) throw ShapeError("pair indices must be distinct");
    }
}

}  // namespace

BootstrapPlan BootstrapPlan::halving(std::vector<Complex> r) {
    if (r.size() < 2) throw ShapeError("bootstrap plan needs at least two diagonal entries");
    BootstrapPlan p;
    p.r = std::move(r);
    Complex prev = p.r[0];
    for (std::size_t n = 1; n < p.r.size(); ++n) {
        prev = 0.5 * (prev + p.r[n]);
        p.d.push_back(prev);
        p.lambda.push_back(p.r[n] == p.previous(n) ? 0.0 : 0.5);
    }
    return p;
}

BootstrapPlan BootstrapPlan::from_targets(std::vector<Complex> r, std::vector<Complex> d) {
    if (r.size() < 2 || d.size() + 1 != r.size()) throw ShapeError("bootstrap plan needs N+1 entries r and N targets d");
    BootstrapPlan p;
    p.r = std::move(r);
    p.d = std::move(d);
    for (std::size_t n = 1; n <= p.d.size(); ++n) {
        try {
            p.lambda.push_back(numrange::SegmentTarget::from_target(p.previous(n), p.r[n], p.d[n - 1]).lambda);
        } catch (const DomainError& e) {
            throw DomainError("bootstrap plan step " + std::to_string(n) + ": " + e.what());
        }
    }
    return p;
}

BootstrapResult bootstrap_fan(const ComplexMatrix& t, const OrthonormalBasis& e, const BootstrapPlan& plan) {
    if (!t.square() || e.dim() != t.rows()) throw ShapeError("bootstrap_fan: dimension mismatch");
    const std::size_t N = plan.steps();
    if (N == 0 || plan.r.size() != N + 1 || plan.lambda.size() != N || e.size() != N + 1) {
        throw ShapeError("bootstrap_fan: plan length does not match the orthonormal family");
    }
    const ComplexMatrix c = e.columns().adjoint() * (t * e.columns());
    const double scale = 1.0 + operator_norm(t);
    for (std::size_t n = 0; n <= N; ++n) {
        if (std::abs(c(n, n) - plan.r[n]) > 1e-10 * scale) {
            throw DomainError("bootstrap_fan: plan r_" + std::to_string(n) + " does not match (T e_n, e_n)");
        }
    }
    for (std::size_t n = 1; n <= N; ++n) {
        const Complex a = plan.previous(n);
        const Complex b = plan.r[n];
        const double lam = plan.lambda[n - 1];
        const double tol = 1e-10 * (1.0 + std::abs(a) + std::abs(b));
        if (lam < 0.0 || lam > 1.0 || std::abs(plan.d[n - 1] - (lam * a + (1.0 - lam) * b)) > tol) {
            throw DomainError("bootstrap_fan: target off segment at step " + std::to_string(n));
        }
    }

    const std::size_t dim = N + 1;
    Vector f(dim);
    f[0] = 1.0;
    ComplexMatrix bcoords(dim, N);
    BootstrapResult out;
    out.realized.resize(N);
    out.overlaps.resize(N);
    for (std::size_t n = 1; n <= N; ++n) {
        const Vector cf = c * std::span<const Complex>(f);
        Complex a11 = 0.0;
        Complex a12 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            a11 += std::conj(f[i]) * cf[i];
            a12 += std::conj(f[i]) * c(i, n);
        }
        const auto a = ComplexMatrix::from_rows({{a11, a12}, {cf[n], c(n, n)}});
        numrange::SegmentTarget target;
        try {
            target = numrange::SegmentTarget::from_target(a11, c(n, n), plan.d[n - 1]);
        } catch (const DomainError& err) {
            throw DomainError("bootstrap_fan: step " + std::to_string(n) + ": " + err.what());
        }
        const auto fp = numrange::fan_pair(a, target);
        Vector fnext(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const Complex en = i == n ? 1.0 : 0.0;
            fnext[i] = fp.f[0] * f[i] + fp.f[1] * en;
            bcoords(i, n - 1) = fp.b[0] * f[i] + fp.b[1] * en;
        }
        out.overlaps[n - 1] = std::norm(inner(fnext, f));
        f = std::move(fnext);
    }
    const ComplexMatrix cb = c * bcoords;
    for (std::size_t j = 0; j < N; ++j) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) s += std::conj(bcoords(i, j)) * cb(i, j);
        out.realized[j] = s;
    }
    ComplexMatrix q(dim, dim);
    q.set_block(0, 0, bcoords);
    q.set_column(N, f);
    const ComplexMatrix proj = q * q.adjoint();
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            out.span_residual = std::max(out.span_residual, std::abs(proj(i, j) - (i == j ? 1.0 : 0.0)));
    out.b = OrthonormalBasis::adopt(e.columns() * bcoords);
    out.f = e.columns() * std::span<const Complex>(f);
    return out;
}

std::vector<std::size_t> greedy_boundaries(std::span<const double> d, std::size_t K) {
    if (K > d.size()) throw ShapeError("greedy_boundaries: K exceeds the sequence length");
    for (double x : d)
        if (x < 0.0) throw DomainError("greedy_boundaries: entries must be nonnegative");
    return run_greedy(d, K).m;
}

ZeroDiagResult zero_diagonalize_idempotent(const ComplexMatrix& dmat, const PairList& pairs, std::size_t K) {
    check_pairs(dmat, pairs);
    if (K > pairs.size()) throw ShapeError("zero_diagonalize_idempotent: K exceeds the number of pairs");
    const double norm = operator_norm(dmat);
    if (idempotency_residual(dmat) > Tolerances{}.idem * (1.0 + norm * norm)) {
        throw PreconditionError("zero_diagonalize_idempotent: operator is not idempotent");
    }
    const double tol = 1e-9 * (1.0 + norm);
    for (std::size_t a = 0; a < pairs.size(); ++a) {
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            const auto [ea, fa] = pairs[a];
            const auto [eb, fb] = pairs[b];
            const bool ok = std::abs(dmat(ea, eb) - (a == b ? 1.0 : 0.0)) <= tol && std::abs(dmat(ea, fb)) <= tol &&
                            std::abs(dmat(fa, fb)) <= tol;
            if (!ok) throw PreconditionError("zero_diagonalize_idempotent: operator is not in paired form");
        }
    }
    ZeroDiagPlan plan;
    plan.d.resize(pairs.size());
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const Complex v = dmat(pairs[n].second, pairs[n].first);
        if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v)) || v.real() < 0.0) {
            throw PreconditionError("zero_diagonalize_idempotent: nilpotent diagonal entry " + std::to_string(n) +
                                    " is not real nonnegative; phase-normalize first");
        }
        plan.d[n] = v.real();
    }
    Greedy g = run_greedy(std::span<const double>(plan.d).first(K), K);
    plan.m = g.m;
    plan.theta = g.theta;
    plan.theta.resize(pairs.size(), 0.0);

    const std::size_t n = dmat.rows();
    ComplexMatrix f(n, 2 * pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double c = std::cos(plan.theta[p]);
        const double s = std::sin(plan.theta[p]);
        f(pairs[p].first, 2 * p) = c;
        f(pairs[p].second, 2 * p) = s;
        f(pairs[p].first, 2 * p + 1) = -s;
        f(pairs[p].second, 2 * p + 1) = c;
    }
    const OrthonormalBasis fb = OrthonormalBasis::adopt(f);
    const auto rotated = diagonal_of(dmat, fb);

    std::vector<bool> used(f.cols(), false);
    std::size_t prev = 0;
    for (std::size_t k = 0; k < plan.m.size(); ++k) {
        std::vector<std::size_t> cols{2 * k};
        for (std::size_t j = prev; j < plan.m[k]; ++j) cols.push_back(2 * j + 1);
        Complex sum = 0.0;
        for (std::size_t col : cols) {
            sum += rotated[col];
            used[col] = true;
        }
        plan.group_sums.push_back(sum);
        plan.groups.push_back(std::move(cols));
        prev = plan.m[k];
    }
    for (std::size_t col = 0; col < used.size(); ++col)
        if (!used[col]) plan.unprocessed.push_back(col);

    ComplexMatrix out = f;
    for (const auto& cols : plan.groups) {
        const auto rb = numrange::constant_diagonal_rebasis(dmat, fb, cols);
        for (std::size_t j = 0; j < cols.size(); ++j) out.set_column(cols[j], rb.vectors.column(j));
    }
    return {OrthonormalBasis::adopt(std::move(out)), std::move(plan)};
}

PhaseNormalized phase_normalize(const ComplexMatrix& d, const PairList& pairs) {
    check_pairs(d, pairs);
    ComplexMatrix b = ComplexMatrix::identity(d.rows());
    std::vector<Complex> phases;
    for (const auto& [e, ep] : pairs) {
        const Complex t = d(ep, e);
        const double mag = std::abs(t);
        const Complex u = mag > 0.0 ? std::conj(t) / mag : Complex{1.0};
        phases.push_back(u);
        b(ep, ep) = std::conj(u);
    }
    auto basis = OrthonormalBasis::adopt(b);
    ComplexMatrix m = change_of_basis(d, basis);
    for (const auto& [e, ep] : pairs) m(ep, e) = std::abs(m(ep, e));
    return {std::move(m), std::move(basis), std::move(phases)};
}

PartialSumTrace PartialSumTrace::derive(std::span<const Complex> diagonal, Complex limit) {
    PartialSumTrace t;
    t.limit = limit;
    Complex acc = 0.0;
    for (const auto& v : diagonal) t.s.push_back(acc += v);
    std::size_t start = 0;
    for (int k = 1;; ++k) {
        const double eps = std::ldexp(1.0, -k);
        std::size_t found = t.s.size();
        for (std::size_t i = start; i < t.s.size(); ++i) {
            if (std::abs(t.s[i] - limit) <= eps) {
                found = i;
                break;
            }
        }
        if (found == t.s.size()) break;
        t.n.push_back(found + 1);
        start = found + 1;
    }
    return t;
}

PartialSumTrace PartialSumTrace::with_indices(std::span<const Complex> diagonal, std::vector<std::size_t> n,
                                              Complex limit) {
    PartialSumTrace t;
    t.limit = limit;
    Complex acc = 0.0;
    for (const auto& v : diagonal) t.s.push_back(acc += v);
    t.n = std::move(n);
    return t;
}

AbsSumResult absolutely_summable_rebasis(const ComplexMatrix& t, const OrthonormalBasis& e,
                                         const PartialSumTrace& trace_info) {
    if (!t.square() || e.dim() != t.rows()) throw ShapeError("absolutely_summable_rebasis: dimension mismatch");
    const auto diag = diagonal_of(t, e);
    const double scale = 1e-10 * (1.0 + operator_norm(t));
    Complex acc = 0.0;
    for (std::size_t i = 0; i < std::min(diag.size(), trace_info.s.size()); ++i) {
        acc += diag[i];
        if (std::abs(acc - trace_info.s[i]) > scale * static_cast<double>(i + 1)) {
            throw DomainError("absolutely_summable_rebasis: partial sum " + std::to_string(i + 1) +
                              " does not match the diagonal");
        }
    }
    for (std::size_t k = 0; k < trace_info.n.size(); ++k) {
        const std::size_t nk = trace_info.n[k];
        if (nk == 0 || (k > 0 && nk <= trace_info.n[k - 1])) {
            throw DomainError("absolutely_summable_rebasis: indices n_k must be positive and strictly increasing");
        }
        if (nk <= trace_info.s.size() &&
            std::abs(trace_info.s[nk - 1] - trace_info.limit) > std::ldexp(1.0, -static_cast<int>(k + 1)) + 1e-12) {
            throw DomainError("absolutely_summable_rebasis: |s_{n_k} - s| exceeds 2^-k at k = " +
                              std::to_string(k + 1));
        }
    }

    AbsSumResult out;
    ComplexMatrix cols = e.columns();
    std::size_t start = 0;
    for (std::size_t k = 0; k < trace_info.n.size(); ++k) {
        const std::size_t stop = trace_info.n[k];
        if (stop > e.size() || stop > trace_info.s.size()) {
            out.truncated = true;
            break;
        }
        std::vector<std::size_t> idx(stop - start);
        for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = start + j;
        const auto rb = numrange::constant_diagonal_rebasis(t, e, idx);
        for (std::size_t j = 0; j < idx.size(); ++j) cols.set_column(idx[j], rb.vectors.column(j));
        out.segment_values.push_back(rb.value);
        start = stop;
    }
    out.processed = start;
    out.basis = OrthonormalBasis::adopt(std::move(cols));
    const auto fresh = diagonal_of(t, out.basis);
    for (std::size_t j = 0; j < out.processed; ++j) out.abs_sum += std::abs(fresh[j]);
    const Complex s1 = trace_info.n.empty() || trace_info.n[0] > trace_info.s.size() ? Complex{}
                                                                                     : trace_info.s[trace_info.n[0] - 1];
    out.bound = std::abs(s1) + 1.5;
    return out;
}

}  // namespace diagkit::rebase
