#include "diagkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diagkit/errors.hpp"

namespace diagkit::linalg {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Columns p, q of `m` are replaced by [m_p m_q] * G.
void rotate_columns(ComplexMatrix& m, std::size_t p, std::size_t q, const std::array<Complex, 4>& g) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Complex a = m(i, p);
        const Complex b = m(i, q);
        m(i, p) = a * g[0] + b * g[2];
        m(i, q) = a * g[1] + b * g[3];
    }
}

// Rows p, q of `m` are replaced by G* [m_p; m_q].
void rotate_rows(ComplexMatrix& m, std::size_t p, std::size_t q, const std::array<Complex, 4>& g) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const Complex a = m(p, j);
        const Complex b = m(q, j);
        m(p, j) = std::conj(g[0]) * a + std::conj(g[2]) * b;
        m(q, j) = std::conj(g[1]) * a + std::conj(g[3]) * b;
    }
}

double column_norm_sq(const ComplexMatrix& m, std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::norm(m(i, j));
    return s;
}

// u_p^* u_q
Complex column_dot(const ComplexMatrix& m, std::size_t p, std::size_t q) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::conj(m(i, p)) * m(i, q);
    return s;
}

Svd hestenes(const ComplexMatrix& a) {
    const std::size_t n = a.cols();
    ComplexMatrix u = a;
    ComplexMatrix v = ComplexMatrix::identity(n);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = column_norm_sq(u, p);
                const double beta = column_norm_sq(u, q);
                const Complex gamma = column_dot(u, p, q);
                if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta) || std::abs(gamma) == 0.0) continue;
                const auto g = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(u, p, q, g);
                rotate_columns(v, p, q, g);
                rotated = true;
            }
        }
        if (!rotated) break;
    }
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(column_norm_sq(u, j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    Svd out;
    out.sigma.resize(n);
    out.u = ComplexMatrix(a.rows(), n);
    out.v = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = norms[j];
        for (std::size_t i = 0; i < a.rows(); ++i) out.u(i, k) = norms[j] > 0.0 ? u(i, j) / norms[j] : Complex{};
        for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    }
    return out;
}

}  // namespace

std::array<Complex, 4> jacobi_rotation(double app, double aqq, Complex apq) {
    const double mag = std::abs(apq);
    if (mag == 0.0) return {1.0, 0.0, 0.0, 1.0};
    const Complex phase = std::conj(apq) / mag;  // e^{-i arg apq}
    const double theta = (aqq - app) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    return {c, s, -s * phase, c * phase};
}

Svd jacobi_svd(const ComplexMatrix& a) {
    if (a.rows() >= a.cols()) return hestenes(a);
    Svd t = hestenes(a.adjoint());
    return {std::move(t.sigma), std::move(t.v), std::move(t.u)};
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
    if (!h.square()) throw ShapeError("hermitian_eigen: matrix must be square");
    const std::size_t n = h.rows();
    ComplexMatrix a = h;
    ComplexMatrix v = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                total += std::norm(a(i, j));
                if (i != j) off += std::norm(a(i, j));
            }
        }
        if (off <= kEps * kEps * total || off == 0.0) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) == 0.0) continue;
                const auto g = jacobi_rotation(a(p, p).real(), a(q, q).real(), a(p, q));
                rotate_columns(a, p, q, g);
                rotate_rows(a, p, q, g);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                rotate_columns(v, p, q, g);
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& a, double tol) {
    double ref = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) ref = std::max(ref, std::sqrt(column_norm_sq(a, j)));
    std::vector<Vector> kept;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        Vector w = a.column(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : kept) {
                const Complex c = inner(w, q);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
            }
        }
        const double nw = norm2(w);
        if (ref == 0.0 || nw <= tol * ref) continue;
        for (auto& x : w) x /= nw;
        kept.push_back(std::move(w));
    }
    return ComplexMatrix::from_columns(kept, a.rows());
}

ComplexMatrix complete_basis(const ComplexMatrix& q) {
    const std::size_t n = q.rows();
    if (q.cols() > n) throw ShapeError("complete_basis: more columns than dimension");
    std::vector<Vector> cols;
    cols.reserve(n);
    for (std::size_t j = 0; j < q.cols(); ++j) cols.push_back(q.column(j));
    // remaining[i] = squared distance of e_i from the current span
    std::vector<double> remaining(n, 1.0);
    for (const auto& c : cols)
        for (std::size_t i = 0; i < n; ++i) remaining[i] -= std::norm(c[i]);
    while (cols.size() < n) {
        const auto pick = static_cast<std::size_t>(
            std::distance(remaining.begin(), std::max_element(remaining.begin(), remaining.end())));
        Vector w(n);
        w[pick] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& c : cols) {
                const Complex coef = inner(w, c);
                for (std::size_t i = 0; i < n; ++i) w[i] -= coef * c[i];
            }
        }
        const double nw = norm2(w);
        for (auto& x : w) x /= nw;
        for (std::size_t i = 0; i < n; ++i) remaining[i] -= std::norm(w[i]);
        remaining[pick] = -1.0;
        cols.push_back(std::move(w));
    }
    return ComplexMatrix::from_columns(cols, n);
}

ComplexMatrix householder_complement(std::span<const Complex> v) {
    const std::size_t n = v.size();
    if (n == 0) throw ShapeError("householder_complement: empty vector");
    const double a0 = std::abs(v[0]);
    const Complex phase = a0 > 0.0 ? v[0] / a0 : Complex{1.0};
    Vector w(v.begin(), v.end());
    w[0] += phase * norm2(v);
    const double ww = std::pow(norm2(w), 2);
    ComplexMatrix out(n, n - 1);
    for (std::size_t j = 1; j < n; ++j) {
        // column j of I - 2 w w* / (w* w)
        const Complex coef = 2.0 * std::conj(w[j]) / ww;
        for (std::size_t i = 0; i < n; ++i) out(i, j - 1) = (i == j ? 1.0 : 0.0) - coef * w[i];
    }
    return out;
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.square() || a.rows() != b.rows()) throw ShapeError("solve: shape mismatch");
    const std::size_t n = a.rows();
    ComplexMatrix m = a;
    ComplexMatrix x = b;
    const double scale = std::max(m.max_abs(), std::numeric_limits<double>::min());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (std::abs(m(piv, k)) <= 1e-14 * scale) throw PreconditionError("solve: matrix is numerically singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = m(i, k) / m(k, k);
            if (f == Complex{}) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            Complex s = x(k, j);
            for (std::size_t i = k + 1; i < n; ++i) s -= m(k, i) * x(i, j);
            x(k, j) = s / m(k, k);
        }
    }
    return x;
}

ComplexMatrix inverse(const ComplexMatrix& a) { return solve(a, ComplexMatrix::identity(a.rows())); }

}  // namespace diagkit::linalg
