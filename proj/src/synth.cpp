#include "diagkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "diagkit/numrange.hpp"
#include "diagkit/rebase.hpp"

namespace diagkit::synth {

std::string_view to_string(EntryLabel label) {
    switch (label) {
        case EntryLabel::requested: return "requested";
        case EntryLabel::fill: return "fill";
        case EntryLabel::boundary: return "boundary";
    }
    return "unknown";
}

namespace {

// Columns of a basis under construction, grouped by label.
struct Layout {
    std::vector<Vector> requested;
    std::vector<Vector> fill;
    std::vector<Vector> boundary;
    std::vector<Complex> requested_values;
    std::vector<Complex> fill_values;
};

Vector embed(std::span<const Complex> v, std::size_t offset, std::size_t dim) {
    Vector out(dim);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
    return out;
}

SynthesisResult finish(ComplexMatrix d, const Layout& layout, std::optional<double> norm_bound) {
    const std::size_t dim = d.rows();
    std::vector<Vector> cols;
    cols.reserve(layout.requested.size() + layout.fill.size() + layout.boundary.size());
    SynthesisResult out;
    for (const auto& v : layout.requested) {
        cols.push_back(v);
        out.labels.push_back(EntryLabel::requested);
    }
    for (const auto& v : layout.fill) {
        cols.push_back(v);
        out.labels.push_back(EntryLabel::fill);
    }
    for (const auto& v : layout.boundary) {
        cols.push_back(v);
        out.labels.push_back(EntryLabel::boundary);
    }
    out.b = OrthonormalBasis::adopt(ComplexMatrix::from_columns(cols, dim));
    out.processed = layout.requested.size();
    out.target = layout.requested_values;
    out.target.insert(out.target.end(), layout.fill_values.begin(), layout.fill_values.end());
    out.cert = certify(d, out.b, out.target, norm_bound);
    out.d = std::move(d);
    return out;
}

Layout standard_layout(std::span<const Complex> requested, std::size_t dim) {
    Layout layout;
    for (std::size_t i = 0; i < dim; ++i) {
        Vector e(dim);
        e[i] = 1.0;
        if (i < requested.size()) {
            layout.requested.push_back(std::move(e));
            layout.requested_values.push_back(requested[i]);
        } else {
            layout.fill.push_back(std::move(e));
            layout.fill_values.push_back(0.0);
        }
    }
    return layout;
}

double sum_abs(std::span<const Complex> d) {
    double s = 0.0;
    for (const auto& x : d) s += std::abs(x);
    return s;
}

double max_abs(std::span<const Complex> d) {
    double s = 0.0;
    for (const auto& x : d) s = std::max(s, std::abs(x));
    return s;
}

Complex principal_sqrt(Complex z) {
    // keep -0.0 imaginary parts on the upper side of the branch cut
    if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
    return std::sqrt(z);
}

struct Gkl {
    ComplexMatrix d;
    double condition = 1.0;
    bool near_singular = false;
};

// Idempotent of rank m with diagonal d, where sum(d) == m and 1 <= m < n.
Gkl gkl(std::span<const Complex> d, std::size_t m) {
    const std::size_t n = d.size();
    if (m == 1) return {sqrt_outer(d), 1.0, false};

    // first adjacent pair far from d_p + d_q = 2, else the pair farthest from it
    std::size_t p = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i] + d[i + 1] - 2.0) >= 0.5) {
            p = i;
            break;
        }
    }
    std::size_t q = p + 1;
    if (p == n) {
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double gap = std::abs(d[i] + d[j] - 2.0);
                if (gap > best) {
                    best = gap;
                    p = i;
                    q = j;
                }
            }
        }
    }
    const Complex dp = d[p];
    const Complex dq = d[q];
    const Complex gap = dp + dq - 2.0;
    if (std::abs(gap) == 0.0) throw InfeasibleError("idem_matrix_exact: every pair of entries sums to 2");

    std::vector<std::size_t> order{p, q};
    std::vector<Complex> reduced{dp + dq - 1.0};
    for (std::size_t i = 0; i < n; ++i) {
        if (i != p && i != q) {
            order.push_back(i);
            reduced.push_back(d[i]);
        }
    }
    Gkl inner = gkl(reduced, m - 1);

    ComplexMatrix dd(n, n);
    dd(0, 0) = 1.0;
    dd.set_block(1, 1, inner.d);
    const Complex lambda = (dq - 1.0) / gap;
    const auto s = ComplexMatrix::from_rows({{lambda, lambda - 1.0}, {1.0, 1.0}});
    const auto s_inv = ComplexMatrix::from_rows({{1.0, 1.0 - lambda}, {-1.0, lambda}});
    // rows 0,1 mixed by S, then columns 0,1 by S^-1
    for (std::size_t j = 0; j < n; ++j) {
        const Complex a = dd(0, j);
        const Complex b = dd(1, j);
        dd(0, j) = s(0, 0) * a + s(0, 1) * b;
        dd(1, j) = s(1, 0) * a + s(1, 1) * b;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Complex a = dd(i, 0);
        const Complex b = dd(i, 1);
        dd(i, 0) = a * s_inv(0, 0) + b * s_inv(1, 0);
        dd(i, 1) = a * s_inv(0, 1) + b * s_inv(1, 1);
    }

    Gkl out;
    out.d = ComplexMatrix(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) out.d(order[a], order[b]) = dd(a, b);
    out.condition = inner.condition;
    out.near_singular = inner.near_singular;
    if (std::abs(gap) < 1e-3) {
        out.near_singular = true;
        out.condition = std::max(out.condition, operator_norm(s) * operator_norm(s_inv));
    }
    return out;
}

// Integer trace of a prospective finite-rank diagonal; throws InfeasibleError otherwise.
std::size_t integer_trace(std::span<const Complex> d, const char* who) {
    const Complex s = std::accumulate(d.begin(), d.end(), Complex{});
    const double m = std::round(s.real());
    if (std::abs(s - m) > 1e-10 * std::max(1.0, sum_abs(d))) {
        throw InfeasibleError(std::string(who) + ": diagonal sum is not an integer");
    }
    if (m < 1.0) throw InfeasibleError(std::string(who) + ": diagonal sum must be a positive integer");
    return static_cast<std::size_t>(m);
}

bool all_near(std::span<const Complex> d, Complex value) {
    return std::all_of(d.begin(), d.end(), [&](Complex x) { return std::abs(x - value) <= 1e-9; });
}

SynthesisResult finite_rank_gkl(std::span<const Complex> d, std::size_t m) {
    const std::size_t n = d.size();
    if (n == m && all_near(d, 1.0)) {
        return finish(ComplexMatrix::identity(n), standard_layout(d, n), std::nullopt);
    }
    std::vector<Complex> padded(d.begin(), d.end());
    padded.resize(std::max(n, m + 1), 0.0);
    auto exact = idem_matrix_exact(padded);
    Layout layout = standard_layout(d, padded.size());
    auto out = finish(std::move(exact.d), layout, std::nullopt);
    out.cert.similarity_condition = exact.cert.similarity_condition;
    return out;
}

SynthesisResult finite_rank_fan(std::span<const Complex> d, std::size_t m) {
    const std::size_t n = d.size();
    if (m == 1) {
        std::vector<Complex> padded(d.begin(), d.end());
        if (padded.empty()) padded.push_back(1.0);
        auto r1 = idem_rank_one(padded);
        return finish(std::move(r1.d), standard_layout(d, padded.size()), std::nullopt);
    }
    const std::size_t L = std::max(n, m);
    std::vector<Complex> x(d.begin(), d.end());
    x.resize(L, 0.0);

    // D1: m x m with diagonal (d_1..d_{m-1}, d'_m), trace m-1
    std::vector<Complex> head(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m - 1));
    const Complex dm_prime = static_cast<double>(m - 1) - std::accumulate(head.begin(), head.end(), Complex{});
    head.push_back(dm_prime);
    auto d1 = idem_matrix_exact(head);

    // D2: rank one with diagonal (2d_m - d'_m, 2d_{m+1} - d_m, ..., 2d_L - d_{L-1}, -d_L)
    std::vector<Complex> tail{2.0 * x[m - 1] - dm_prime};
    for (std::size_t k = m; k < L; ++k) tail.push_back(2.0 * x[k] - x[k - 1]);
    tail.push_back(-x[L - 1]);
    ComplexMatrix dd = direct_sum(d1.d, sqrt_outer(tail));
    const std::size_t dim = dd.rows();

    std::vector<Complex> r{dm_prime};
    r.insert(r.end(), tail.begin(), tail.end());
    std::vector<std::size_t> e_idx(r.size());
    std::iota(e_idx.begin(), e_idx.end(), m - 1);
    const auto e = OrthonormalBasis::adopt(ComplexMatrix::identity(dim).select_columns(e_idx));
    const auto boot = rebase::bootstrap_fan(dd, e, rebase::BootstrapPlan::halving(r));

    std::vector<Vector> ordered;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        Vector v(dim);
        v[i] = 1.0;
        ordered.push_back(std::move(v));
    }
    for (std::size_t k = 0; k < boot.b.size(); ++k) ordered.push_back(boot.b.vector(k));
    // ordered now realizes (d_1..d_L, 0)

    Layout layout;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (i < n) {
            layout.requested.push_back(ordered[i]);
            layout.requested_values.push_back(d[i]);
        } else {
            layout.fill.push_back(ordered[i]);
            layout.fill_values.push_back(0.0);
        }
    }
    layout.boundary.push_back(boot.f);
    auto out = finish(std::move(dd), layout, std::nullopt);
    out.cert.similarity_condition = d1.cert.similarity_condition;
    return out;
}

}  // namespace

ComplexMatrix idem_2x2_nilpotent(Complex z) { return ComplexMatrix::from_rows({{1.0, 0.0}, {z, 0.0}}); }

SynthesisResult idem_2x2_diag(Complex d) {
    const Complex hi = 3.0 * d - 1.0;
    const Complex lo = 2.0 - 3.0 * d;
    auto m = ComplexMatrix::from_rows({{hi, hi}, {lo, lo}});
    const std::vector<Complex> values{hi, lo};
    return finish(std::move(m), standard_layout(values, 2), 6.0 * std::abs(d) + 4.0);
}

SynthesisResult idem_constant_diag(Complex d, std::size_t K) {
    if (K < 3) throw DomainError("idem_constant_diag: needs at least 3 blocks");
    const auto block = idem_2x2_diag(d);
    std::vector<ComplexMatrix> blocks(K, block.d);
    ComplexMatrix dd = direct_sum(blocks);
    const std::size_t dim = 2 * K;
    Layout layout;
    const Complex hi = block.target[0];
    const Complex lo = block.target[1];
    if (std::abs(hi - lo) <= 1e-15 * (1.0 + std::abs(d))) {
        for (std::size_t i = 0; i < dim; ++i) {
            Vector e(dim);
            e[i] = 1.0;
            layout.requested.push_back(std::move(e));
            layout.requested_values.push_back(d);
        }
        return finish(std::move(dd), layout, 6.0 * std::abs(d) + 4.0);
    }

    // triple t takes the 3d-1 entries of blocks 2t, 2t+1 and the 2-3d entry of block t
    const auto standard = OrthonormalBasis::standard(dim);
    std::vector<bool> used(dim, false);
    for (std::size_t t = 0; t < K / 2; ++t) {
        const std::vector<std::size_t> idx{4 * t, 4 * t + 2, 2 * t + 1};
        const auto reb = numrange::constant_diagonal_rebasis(dd, standard, idx);
        for (std::size_t c = 0; c < 3; ++c) {
            layout.requested.push_back(reb.vectors.column(c));
            layout.requested_values.push_back(d);
            used[idx[c]] = true;
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (used[i]) continue;
        Vector e(dim);
        e[i] = 1.0;
        layout.boundary.push_back(std::move(e));
    }
    return finish(std::move(dd), layout, 6.0 * std::abs(d) + 4.0);
}

SynthesisResult idem_infinite_multiplicity(std::span<const Complex> d, std::size_t m_idx, std::size_t depth) {
    if (d.empty()) throw ShapeError("idem_infinite_multiplicity: empty sequence");
    if (m_idx >= d.size()) throw ShapeError("idem_infinite_multiplicity: m_idx out of range");
    const Complex dm = d[m_idx];
    const std::size_t local = 4 * depth;
    const std::size_t dim = d.size() * local;

    std::vector<ComplexMatrix> blocks;
    Layout layout;
    std::vector<Vector> fills_per_j;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const auto a = idem_constant_diag(d[j], depth);
        const auto b = idem_constant_diag(2.0 * dm - d[j], depth);
        const ComplexMatrix dj = direct_sum(a.d, b.d);
        const std::size_t half = a.d.rows();
        const std::size_t offset = j * local;
        auto lift = [&](const SynthesisResult& part, std::size_t k, std::size_t shift) {
            return embed(part.b.vector(k), shift, local);
        };

        layout.requested.push_back(embed(lift(a, 0, 0), offset, dim));
        layout.requested_values.push_back(d[j]);

        // pair (e_{1,k+1}, e_{2,k}) rebased to the common value d_m
        const std::size_t q = std::min(a.processed - 1, b.processed);
        for (std::size_t k = 0; k < q; ++k) {
            const std::vector<Vector> pair{lift(a, k + 1, 0), lift(b, k, half)};
            const auto pb = OrthonormalBasis::adopt(ComplexMatrix::from_columns(pair, local));
            const std::vector<std::size_t> idx{0, 1};
            const auto reb = numrange::constant_diagonal_rebasis(dj, pb, idx);
            for (std::size_t c = 0; c < 2; ++c) {
                layout.fill.push_back(embed(reb.vectors.column(c), offset, dim));
                layout.fill_values.push_back(dm);
            }
        }
        for (std::size_t k = q + 1; k < a.b.size(); ++k) layout.boundary.push_back(embed(lift(a, k, 0), offset, dim));
        for (std::size_t k = q; k < b.b.size(); ++k) layout.boundary.push_back(embed(lift(b, k, half), offset, dim));
        blocks.push_back(dj);
    }
    return finish(direct_sum(blocks), layout, 18.0 * max_abs(d) + 4.0);
}

SynthesisResult idem_bounded_diag(std::span<const Complex> d, std::size_t J, std::size_t depth) {
    if (d.empty()) throw ShapeError("idem_bounded_diag: empty sequence");
    if (J == 0) throw DomainError("idem_bounded_diag: J must be positive");
    const std::size_t groups = std::min(J, d.size());

    struct Part {
        ComplexMatrix d;
        std::vector<Vector> b;
        Vector f;
        std::vector<Vector> fill;
        std::vector<Complex> fill_values;
        std::vector<Vector> boundary;
    };
    std::vector<Part> parts;
    std::size_t dim = 0;
    for (std::size_t j = 0; j < groups; ++j) {
        std::vector<Complex> sub;
        for (std::size_t i = j; i < d.size(); i += J) sub.push_back(d[i]);
        std::vector<Complex> r{0.0};
        Complex prev = 0.0;
        for (const auto& x : sub) {
            r.push_back(2.0 * x - prev);
            prev = x;
        }
        auto im = idem_infinite_multiplicity(r, 0, depth);
        std::vector<std::size_t> e_idx(r.size());
        std::iota(e_idx.begin(), e_idx.end(), 0);
        const auto e = OrthonormalBasis::adopt(im.b.columns().select_columns(e_idx));
        const auto boot = rebase::bootstrap_fan(im.d, e, rebase::BootstrapPlan::halving(r));

        Part part;
        for (std::size_t k = 0; k < boot.b.size(); ++k) part.b.push_back(boot.b.vector(k));
        part.f = boot.f;
        for (std::size_t k = 0; k < im.labels.size(); ++k) {
            if (im.labels[k] == EntryLabel::fill) {
                part.fill.push_back(im.b.vector(k));
                part.fill_values.push_back(im.target[k]);
            } else if (im.labels[k] == EntryLabel::boundary) {
                part.boundary.push_back(im.b.vector(k));
            }
        }
        dim += im.d.rows();
        part.d = std::move(im.d);
        parts.push_back(std::move(part));
    }

    std::vector<std::size_t> offsets(parts.size());
    std::vector<ComplexMatrix> blocks;
    std::size_t offset = 0;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        offsets[j] = offset;
        offset += parts[j].d.rows();
        blocks.push_back(parts[j].d);
    }
    Layout layout;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t j = i % J;
        layout.requested.push_back(embed(parts[j].b[i / J], offsets[j], dim));
        layout.requested_values.push_back(d[i]);
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
        for (std::size_t k = 0; k < parts[j].fill.size(); ++k) {
            layout.fill.push_back(embed(parts[j].fill[k], offsets[j], dim));
            layout.fill_values.push_back(parts[j].fill_values[k]);
        }
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
        layout.boundary.push_back(embed(parts[j].f, offsets[j], dim));
        for (const auto& v : parts[j].boundary) layout.boundary.push_back(embed(v, offsets[j], dim));
    }
    return finish(direct_sum(blocks), layout, 18.0 * max_abs(d) + 4.0);
}

ComplexMatrix sqrt_outer(std::span<const Complex> d) {
    const std::size_t n = d.size();
    Vector a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = principal_sqrt(d[i]);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i] * a[j];
    return m;
}

SynthesisResult idem_rank_one(std::span<const Complex> d) {
    if (d.empty()) throw ShapeError("idem_rank_one: empty diagonal");
    const Complex s = std::accumulate(d.begin(), d.end(), Complex{});
    if (std::abs(s - 1.0) > 1e-10 * std::max(1.0, sum_abs(d))) {
        throw DomainError("idem_rank_one: diagonal must sum to 1");
    }
    return finish(sqrt_outer(d), standard_layout(d, d.size()), std::nullopt);
}

SynthesisResult idem_matrix_exact(std::span<const Complex> d) {
    const std::size_t n = d.size();
    if (n == 0) throw ShapeError("idem_matrix_exact: empty diagonal");
    if (all_near(d, 0.0)) return finish(ComplexMatrix(n, n), standard_layout(d, n), std::nullopt);
    if (all_near(d, 1.0)) return finish(ComplexMatrix::identity(n), standard_layout(d, n), std::nullopt);
    const std::size_t m = integer_trace(d, "idem_matrix_exact");
    if (m >= n) throw InfeasibleError("idem_matrix_exact: trace must lie in 1..n-1 unless every entry is 1");
    auto g = gkl(d, m);
    auto out = finish(std::move(g.d), standard_layout(d, n), std::nullopt);
    if (g.near_singular) out.cert.similarity_condition = g.condition;
    return out;
}

SynthesisResult idem_finite_rank(std::span<const Complex> d, Route route) {
    if (d.empty()) throw ShapeError("idem_finite_rank: empty diagonal");
    const std::size_t m = integer_trace(d, "idem_finite_rank");
    return route == Route::gkl ? finite_rank_gkl(d, m) : finite_rank_fan(d, m);
}

}  // namespace diagkit::synth
