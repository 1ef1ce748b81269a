#include "diagkit/numrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include "diagkit/linalg.hpp"

namespace diagkit::numrange {

namespace {

constexpr double kBisectTol = 1e-12;
constexpr int kBisectMaxIter = 200;
constexpr std::size_t kExhaustiveLimit = 64;

double lo_entry(double d, double theta) { return (1.0 - std::cos(2.0 * theta) - d * std::sin(2.0 * theta)) / 2.0; }

struct Candidate {
    std::vector<std::size_t> idx;
    std::vector<double> mu;
};

double combination_residual(std::span<const Complex> p, const Candidate& c) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < c.idx.size(); ++k) s += c.mu[k] * p[c.idx[k]];
    return std::abs(s);
}

// Weights (mu_a, mu_b, mu_c) with mu_a a + mu_b b + mu_c c = 0, sum 1, or nothing.
bool barycentric_zero(Complex a, Complex b, Complex c, double out[3]) {
    const Complex u = a - c;
    const Complex v = b - c;
    const double det = u.real() * v.imag() - u.imag() * v.real();
    const double scale = std::abs(u) * std::abs(v);
    if (scale == 0.0 || std::abs(det) <= 1e-12 * scale) return false;
    // mu_a u + mu_b v = -c
    const double ma = (-c.real() * v.imag() + c.imag() * v.real()) / det;
    const double mb = (-u.real() * c.imag() + u.imag() * c.real()) / det;
    out[0] = ma;
    out[1] = mb;
    out[2] = 1.0 - ma - mb;
    return out[0] >= -1e-12 && out[1] >= -1e-12 && out[2] >= -1e-12;
}

void clean_weights(std::vector<double>& mu) {
    for (auto& m : mu) m = std::max(m, 0.0);
    const double s = std::accumulate(mu.begin(), mu.end(), 0.0);
    for (auto& m : mu) m /= s;
}

// Iterative reduction of the support of a convex combination until at most three points remain.
Candidate reduce_support(std::span<const Complex> p, std::vector<std::size_t> idx, std::vector<double> w) {
    while (idx.size() > 3) {
        ComplexMatrix a(4, 4);
        for (std::size_t k = 0; k < 4; ++k) {
            const Complex z = p[idx[k]];
            a(0, k) = z.real();
            a(1, k) = z.imag();
            a(2, k) = 1.0;
        }
        const auto svd = linalg::jacobi_svd(a);
        std::vector<double> v(4);
        for (std::size_t k = 0; k < 4; ++k) v[k] = svd.v(k, 3).real();
        if (std::none_of(v.begin(), v.end(), [](double x) { return x > 0.0; }))
            for (auto& x : v) x = -x;
        double t = std::numeric_limits<double>::infinity();
        std::size_t drop = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            if (v[k] > 0.0 && w[k] / v[k] < t) {
                t = w[k] / v[k];
                drop = k;
            }
        }
        for (std::size_t k = 0; k < 4; ++k) w[k] -= t * v[k];
        w[drop] = 0.0;
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(drop));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    Candidate c{std::move(idx), std::move(w)};
    clean_weights(c.mu);
    return c;
}

// Unit vector g with (Y g, g) = 0 for a square Y whose diagonal hulls 0.
Vector zero_vector(const ComplexMatrix& y) {
    const std::size_t m = y.rows();
    const auto diag = y.diag();
    const std::vector<double> uniform(m, 1.0 / static_cast<double>(m));
    const ConvexZero cz = caratheodory_zero(diag, uniform);
    Vector g(m);
    if (cz.indices.size() == 1) {
        g[cz.indices[0]] = 1.0;
        return g;
    }
    const std::size_t i = cz.indices[0];
    const std::size_t j = cz.indices[1];
    const auto pair = ComplexMatrix::from_rows({{y(i, i), y(i, j)}, {y(j, i), y(j, j)}});
    if (cz.indices.size() == 2) {
        const auto fp = fan_pair(pair, SegmentTarget::from_target(y(i, i), y(j, j), 0.0));
        g[i] = fp.f[0];
        g[j] = fp.f[1];
        return g;
    }
    const std::size_t k = cz.indices[2];
    const double mi = cz.weights[0];
    const double mj = cz.weights[1];
    const Complex w = (mi * y(i, i) + mj * y(j, j)) / (mi + mj);
    const auto fp1 = fan_pair(pair, SegmentTarget::from_target(y(i, i), y(j, j), w));
    Vector f1(m);
    f1[i] = fp1.f[0];
    f1[j] = fp1.f[1];
    Vector ek(m);
    ek[k] = 1.0;
    const Vector yf1 = y * std::span<const Complex>(f1);
    const Vector yek = y * std::span<const Complex>(ek);
    const Complex a11 = inner(yf1, f1);
    const auto second = ComplexMatrix::from_rows({{a11, inner(yek, f1)}, {inner(yf1, ek), y(k, k)}});
    const auto fp2 = fan_pair(second, SegmentTarget::from_target(a11, y(k, k), 0.0));
    for (std::size_t r = 0; r < m; ++r) g[r] = fp2.f[0] * f1[r] + fp2.f[1] * ek[r];
    return g;
}

}  // namespace

double d_minus(double d) { return d * d / (2.0 * (1.0 + std::sqrt(1.0 + d * d))); }

ComplexMatrix rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return ComplexMatrix::from_rows({{c, -s}, {s, c}});
}

RotationOutcome rotation_diagonal(double d, double theta) {
    if (d < 0.0) throw DomainError("rotation_diagonal: d must be nonnegative");
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    return {theta, (1.0 + c2 + d * s2) / 2.0, (1.0 - c2 - d * s2) / 2.0};
}

RotationOutcome min_diagonal_rotation(double d) {
    if (d < 0.0) throw DomainError("min_diagonal_rotation: d must be nonnegative");
    const double theta = std::atan(d) / 2.0;
    return {theta, 1.0 + d_minus(d), -d_minus(d)};
}

double theta_for_target(double d, double x) {
    if (d < 0.0) throw DomainError("theta_for_target: d must be nonnegative");
    const double floor = -d_minus(d);
    const double slack = 1e-14 * (1.0 + d);
    if (x > slack || x < floor - slack) {
        throw DomainError("theta_for_target: target " + std::to_string(x) + " outside [" + std::to_string(floor) +
                          ", 0]");
    }
    if (x >= 0.0) return 0.0;
    const double top = std::atan(d) / 2.0;
    if (x <= floor) return top;
    // diag_lo decreases monotonically from 0 to -d^- on [0, atan(d)/2]
    double a = 0.0;
    double b = top;
    for (int it = 0; it < kBisectMaxIter; ++it) {
        const double mid = 0.5 * (a + b);
        const double v = lo_entry(d, mid);
        if (v > x) {
            a = mid;
        } else {
            b = mid;
        }
        if (b - a <= kBisectTol && std::abs(lo_entry(d, 0.5 * (a + b)) - x) <= 1e-14 * (1.0 + d)) break;
        if (mid == a && mid == b) break;
    }
    return 0.5 * (a + b);
}

SegmentTarget SegmentTarget::from_target(Complex d1, Complex d2, Complex target) {
    const double tol = 1e-9 * (std::abs(d1) + std::abs(d2) + 1.0);
    const Complex delta = d1 - d2;
    const double len2 = std::norm(delta);
    SegmentTarget t{d1, d2, target, 0.0};
    if (len2 == 0.0) {
        if (std::abs(target - d2) > tol) throw DomainError("target is not on the degenerate segment");
        t.target = d2;
        return t;
    }
    double lambda = ((target - d2) * std::conj(delta)).real() / len2;
    lambda = std::clamp(lambda, 0.0, 1.0);
    const Complex proj = lambda * d1 + (1.0 - lambda) * d2;
    if (std::abs(proj - target) > tol) {
        throw DomainError("target lies " + std::to_string(std::abs(proj - target)) + " away from the segment");
    }
    t.lambda = lambda;
    t.target = proj;
    return t;
}

SegmentTarget SegmentTarget::from_lambda(Complex d1, Complex d2, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("convexity coefficient must lie in [0, 1]");
    if (d1 == d2) return {d1, d2, d2, 0.0};
    return {d1, d2, lambda * d1 + (1.0 - lambda) * d2, lambda};
}

FanPair fan_pair(const ComplexMatrix& a, const SegmentTarget& t) {
    if (a.rows() != 2 || a.cols() != 2) throw ShapeError("fan_pair: matrix must be 2x2");
    const double scale = 1.0 + std::abs(t.d1) + std::abs(t.d2);
    if (std::abs(a(0, 0) - t.d1) > 1e-12 * scale || std::abs(a(1, 1) - t.d2) > 1e-12 * scale) {
        throw PreconditionError("fan_pair: segment endpoints differ from the diagonal of A");
    }
    const Complex d1 = a(0, 0);
    const Complex d2 = a(1, 1);
    const double delta = std::abs(d1 - d2);
    if (delta <= 1e-14 * scale || t.lambda == 0.0) {
        // f = e2 realizes the d2 endpoint with |(e1, f)|^2 = 0
        if (std::abs(t.target - d2) > 1e-9 * scale) {
            throw DomainError("fan_pair: lambda = 0 requires the target to equal d2");
        }
        return {{1.0, 0.0}, {0.0, 1.0}};
    }
    const Complex u = (d1 - d2) / delta;
    const Complex p = std::conj(u) * a(0, 1);
    const Complex q = std::conj(u) * a(1, 0);
    const double ca = p.imag() + q.imag();
    const double cb = p.real() - q.real();
    double phi = (ca == 0.0 && cb == 0.0) ? 0.0 : std::atan2(cb, ca) + std::numbers::pi / 2.0;
    Complex e = std::polar(1.0, phi);
    double kappa = (e * p + std::conj(e) * q).real();
    if (kappa < 0.0) {
        phi += std::numbers::pi;
        e = -e;
        kappa = -kappa;
    }
    const double mu = kappa / delta;
    const double ratio = std::clamp((2.0 * t.lambda - 1.0) / std::sqrt(1.0 + mu * mu), -1.0, 1.0);
    const double theta = 0.5 * (std::atan(mu) + std::acos(ratio));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {{-s, e * c}, {c, e * s}};
}

ConvexZero caratheodory_zero(std::span<const Complex> points, std::span<const double> weights) {
    if (points.size() != weights.size()) throw ShapeError("caratheodory_zero: points and weights differ in length");
    if (points.empty()) throw DomainError("caratheodory_zero: no points");
    double scale = 0.0;
    double wsum = 0.0;
    Complex combo = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (weights[k] < 0.0) throw DomainError("caratheodory_zero: negative weight");
        scale = std::max(scale, std::abs(points[k]));
        wsum += weights[k];
        combo += weights[k] * points[k];
    }
    const double tol = 1e-10 * std::max(1.0, scale);
    if (std::abs(wsum - 1.0) > 1e-10) throw DomainError("caratheodory_zero: weights must sum to 1");
    if (std::abs(combo) > tol) throw DomainError("caratheodory_zero: weighted combination is not zero");

    std::vector<std::size_t> support;
    for (std::size_t k = 0; k < points.size(); ++k)
        if (weights[k] > 0.0) support.push_back(k);

    std::size_t best_zero = support.front();
    for (std::size_t k : support)
        if (std::abs(points[k]) < std::abs(points[best_zero])) best_zero = k;
    if (std::abs(points[best_zero]) <= tol) return {{best_zero}, {1.0}};

    if (support.size() > kExhaustiveLimit) {
        std::vector<double> w;
        for (std::size_t k : support) w.push_back(weights[k]);
        Candidate c = reduce_support(points, support, std::move(w));
        if (combination_residual(points, c) > tol) throw DomainError("caratheodory_zero: reduction lost accuracy");
        return {std::move(c.idx), std::move(c.mu)};
    }

    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            const Complex pa = points[support[a]];
            const Complex pb = points[support[b]];
            const Complex prod = std::conj(pa) * pb;
            if (prod.real() >= 0.0 || std::abs(prod.imag()) > 1e-12 * std::abs(prod)) continue;
            const double na = std::abs(pa);
            const double nb = std::abs(pb);
            Candidate c{{support[a], support[b]}, {nb / (na + nb), na / (na + nb)}};
            if (combination_residual(points, c) <= tol) return {std::move(c.idx), std::move(c.mu)};
        }
    }
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            for (std::size_t c = b + 1; c < support.size(); ++c) {
                double mu[3];
                if (!barycentric_zero(points[support[a]], points[support[b]], points[support[c]], mu)) continue;
                Candidate cand{{support[a], support[b], support[c]}, {mu[0], mu[1], mu[2]}};
                clean_weights(cand.mu);
                if (combination_residual(points, cand) <= tol) return {std::move(cand.idx), std::move(cand.mu)};
            }
        }
    }
    std::vector<double> w;
    for (std::size_t k : support) w.push_back(weights[k]);
    Candidate c = reduce_support(points, support, std::move(w));
    if (combination_residual(points, c) > tol) throw DomainError("caratheodory_zero: no convex combination found");
    return {std::move(c.idx), std::move(c.mu)};
}

OrthonormalBasis zero_diagonal_basis(const ComplexMatrix& x) {
    if (!x.square()) throw ShapeError("zero_diagonal_basis: matrix must be square");
    const std::size_t n = x.rows();
    if (n == 0) return OrthonormalBasis::standard(0);
    const double norm = operator_norm(x);
    if (norm == 0.0) return OrthonormalBasis::standard(n);
    if (std::abs(x.trace()) > 1e-9 * static_cast<double>(n) * norm) {
        throw DomainError("zero_diagonal_basis: trace is not zero");
    }

    ComplexMatrix result(n, n);
    ComplexMatrix q = ComplexMatrix::identity(n);
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t m = q.cols();
        ComplexMatrix y = q.adjoint() * (x * q);
        if (m == 1) {
            result.set_column(step, q.column(0));
            break;
        }
        const Complex shift = y.trace() / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) y(i, i) -= shift;
        const Vector g = zero_vector(y);
        result.set_column(step, q * std::span<const Complex>(g));
        q = q * linalg::householder_complement(g);
    }
    return OrthonormalBasis::adopt(std::move(result));
}

ConstantRebasis constant_diagonal_rebasis(const ComplexMatrix& m, const OrthonormalBasis& b,
                                          std::span<const std::size_t> idx) {
    if (!m.square() || m.rows() != b.dim()) throw ShapeError("constant_diagonal_rebasis: dimension mismatch");
    if (idx.empty()) throw ShapeError("constant_diagonal_rebasis: empty index list");
    std::set<std::size_t> seen;
    for (std::size_t k : idx) {
        if (k >= b.size()) throw ShapeError("constant_diagonal_rebasis: index " + std::to_string(k) + " out of range");
        if (!seen.insert(k).second) throw ShapeError("constant_diagonal_rebasis: duplicate index");
    }
    const ComplexMatrix q = b.columns().select_columns(idx);
    ComplexMatrix c = q.adjoint() * (m * q);
    const double scale = c.max_abs();
    const Complex lambda = c.trace() / static_cast<double>(idx.size());
    for (std::size_t i = 0; i < c.rows(); ++i) c(i, i) -= lambda;
    if (c.max_abs() <= 1e-14 * scale) return {q, lambda};  // already constant up to rounding
    const OrthonormalBasis z = zero_diagonal_basis(c);
    return {q * z.columns(), lambda};
}

}  // namespace diagkit::numrange
