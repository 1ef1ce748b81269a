#include "diagkit/frames.hpp"

#include "diagkit/classify.hpp"
#include <string>

#include "diagkit/linalg.hpp"

namespace diagkit::frames {

namespace {

void check_shapes(const FramePair& p) {
    if (p.x.size() != p.y.size()) throw ShapeError("frames: x and y must have the same length");
    for (const auto& v : p.x)
        if (v.size() != p.dim) throw ShapeError("frames: x vector of wrong dimension");
    for (const auto& v : p.y)
        if (v.size() != p.dim) throw ShapeError("frames: y vector of wrong dimension");
}

}  // namespace

double FramePair::duality_residual() const {
    check_shapes(*this);
    ComplexMatrix s(dim, dim);
    for (std::size_t n = 0; n < x.size(); ++n)
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) s(i, j) += y[n][i] * std::conj(x[n][j]);
    return (s - ComplexMatrix::identity(dim)).max_abs();
}

ComplexMatrix cross_gramian(const FramePair& p, double tol) {
    const double r = p.duality_residual();
    if (r > tol) throw PreconditionError("cross_gramian: pair is not dual (residual " + std::to_string(r) + ")");
    const std::size_t n = p.x.size();
    ComplexMatrix g(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            Complex s = 0.0;
            for (std::size_t i = 0; i < p.dim; ++i) s += p.y[b][i] * std::conj(p.x[a][i]);
            g(a, b) = s;
        }
    }
    return g;
}

Extraction extract_frames(const ComplexMatrix& d, double tol) {
    const auto cd = classify::canonical_decomposition(d, tol);
    const std::size_t n = d.rows();
    const std::size_t k = cd.coker_dim;
    const ComplexMatrix& w = cd.two_block_basis.columns();
    // A = R + K T spans range D, S = R*; S A = I up to rounding
    ComplexMatrix a = w.block(0, 0, n, k);
    if (cd.ker_dim > 0 && k > 0) a += w.block(0, k, n, cd.ker_dim) * cd.t;
    ComplexMatrix s = w.block(0, 0, n, k).adjoint();
    Extraction out;
    out.pair.dim = k;
    if (k > 0) {
        const ComplexMatrix m = s * a;
        const ComplexMatrix m_inv = linalg::inverse(m);
        out.condition = operator_norm(m) * operator_norm(m_inv);
        s = m_inv * s;
    }
    for (std::size_t j = 0; j < n; ++j) {
        Vector x(k);
        Vector y(k);
        for (std::size_t i = 0; i < k; ++i) {
            x[i] = std::conj(a(j, i));
            y[i] = s(i, j);
        }
        out.pair.x.push_back(std::move(x));
        out.pair.y.push_back(std::move(y));
    }
    return out;
}

FramePair canonical_dual(std::size_t dim, const std::vector<Vector>& x) {
    FramePair p{dim, x, {}};
    ComplexMatrix f(dim, dim);
    for (const auto& v : x) {
        if (v.size() != dim) throw ShapeError("canonical_dual: vector of wrong dimension");
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) f(i, j) += v[i] * std::conj(v[j]);
    }
    const ComplexMatrix f_inv = linalg::inverse(f);
    for (const auto& v : x) p.y.push_back(f_inv * std::span<const Complex>(v));
    return p;
}

}  // namespace diagkit::frames
