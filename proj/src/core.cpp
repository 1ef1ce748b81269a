#include "diagkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "diagkit/linalg.hpp"

namespace diagkit {

namespace {

constexpr int kPowerIterations = 500;
constexpr double kPowerTol = 1e-12;

// Index groups of a square matrix that interact through nonzero entries. The
// matrix is a direct sum over these groups, so its norm is the largest group norm.
std::vector<std::vector<std::size_t>> components(const ComplexMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == Complex{}) continue;
            const std::size_t a = find(i);
            const std::size_t b = find(j);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] == n) {
            slot[r] = groups.size();
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    return groups;
}

ComplexMatrix submatrix(const ComplexMatrix& m, const std::vector<std::size_t>& idx) {
    ComplexMatrix s(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = m(idx[a], idx[b]);
    return s;
}

double norm_2x2(const ComplexMatrix& m) {
    double fro = 0.0;
    for (const auto& v : m.data()) fro += std::norm(v);
    const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    const double disc = std::max(0.0, fro * fro - 4.0 * det * det);
    return std::sqrt((fro + std::sqrt(disc)) / 2.0);
}

double power_norm(const ComplexMatrix& m) {
    const std::size_t n = m.cols();
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (auto& x : v) x = {gauss(rng), gauss(rng)};
    const ComplexMatrix mh = m.adjoint();
    double rho_prev = -1.0;
    for (int it = 0; it < kPowerIterations; ++it) {
        const double nv = norm2(v);
        for (auto& x : v) x /= nv;
        const Vector mv = m * std::span<const Complex>(v);
        const Vector w = mh * std::span<const Complex>(mv);
        const double rho = std::pow(norm2(mv), 2);
        if (rho == 0.0) return 0.0;
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += std::norm(w[i] - rho * v[i]);
        res = std::sqrt(res);
        if (std::abs(rho - rho_prev) <= kPowerTol * rho && res <= 1e-7 * rho) return std::sqrt(rho);
        rho_prev = rho;
        v = w;
    }
    return linalg::jacobi_svd(m).sigma.front();
}

double component_norm(const ComplexMatrix& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    if (m.rows() == 2) return norm_2x2(m);
    return power_norm(m);
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(ComplexMatrix columns, double tol) : columns_(std::move(columns)) {
    if (columns_.cols() > columns_.rows()) throw ShapeError("basis has more vectors than its dimension");
    const double r = unitarity_residual();
    if (r > tol) throw PreconditionError("basis columns are not orthonormal (residual " + std::to_string(r) + ")");
}

OrthonormalBasis OrthonormalBasis::adopt(ComplexMatrix columns) {
    OrthonormalBasis b;
    b.columns_ = std::move(columns);
    return b;
}

OrthonormalBasis OrthonormalBasis::standard(std::size_t n) { return adopt(ComplexMatrix::identity(n)); }

double OrthonormalBasis::unitarity_residual() const { return diagkit::unitarity_residual(columns_); }

bool Certificate::passes(const Tolerances& tol) const {
    const double n = norm_observed;
    if (idempotency_residual > tol.idem * (1.0 + n * n)) return false;
    if (unitarity_residual > tol.unitary) return false;
    if (diagonal_residual > tol.diag * (1.0 + n)) return false;
    if (norm_bound_claimed && norm_observed > *norm_bound_claimed + 1e-9) return false;
    return true;
}

double unitarity_residual(const ComplexMatrix& m) {
    const ComplexMatrix g = m.adjoint() * m;
    double r = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) r = std::max(r, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return r;
}

std::vector<Complex> diagonal_of(const ComplexMatrix& m, const OrthonormalBasis& b) {
    if (!m.square()) throw ShapeError("diagonal_of: operator must be square");
    if (b.dim() != m.rows()) throw ShapeError("diagonal_of: basis dimension does not match operator");
    const ComplexMatrix& bc = b.columns();
    const ComplexMatrix mb = m * bc;
    std::vector<Complex> d(bc.cols());
    for (std::size_t i = 0; i < bc.rows(); ++i) {
        const auto mrow = mb.row(i);
        const auto brow = bc.row(i);
        for (std::size_t j = 0; j < bc.cols(); ++j) d[j] += mrow[j] * std::conj(brow[j]);
    }
    return d;
}

double idempotency_residual(const ComplexMatrix& m) {
    if (!m.square()) throw ShapeError("idempotency_residual: matrix must be square");
    return operator_norm(m * m - m);
}

double operator_norm(const ComplexMatrix& m) {
    if (m.empty()) return 0.0;
    if (!m.square()) return component_norm(m.rows() >= m.cols() ? m : m.adjoint());
    double best = 0.0;
    for (const auto& g : components(m)) best = std::max(best, component_norm(submatrix(m, g)));
    return best;
}

ComplexMatrix change_of_basis(const ComplexMatrix& m, const OrthonormalBasis& b) {
    if (!b.full()) throw ShapeError("change_of_basis: basis must be square");
    if (!m.square() || m.rows() != b.dim()) throw ShapeError("change_of_basis: dimension mismatch");
    return b.columns().adjoint() * (m * b.columns());
}

std::size_t numerical_rank(const ComplexMatrix& m, double tol) {
    if (tol <= 0.0) throw DomainError("numerical_rank: tolerance must be positive");
    if (m.empty()) return 0;
    std::vector<std::vector<double>> sigmas;
    if (m.square()) {
        for (const auto& g : components(m)) sigmas.push_back(linalg::jacobi_svd(submatrix(m, g)).sigma);
    } else {
        sigmas.push_back(linalg::jacobi_svd(m).sigma);
    }
    double top = 0.0;
    for (const auto& s : sigmas)
        if (!s.empty()) top = std::max(top, s.front());
    std::size_t rank = 0;
    for (const auto& s : sigmas) rank += std::count_if(s.begin(), s.end(), [&](double x) { return x > tol * top; });
    return rank;
}

Certificate certify(const ComplexMatrix& d, const OrthonormalBasis& b, std::span<const Complex> expected,
                    std::optional<double> norm_bound) {
    Certificate c;
    c.idempotency_residual = idempotency_residual(d);
    c.unitarity_residual = b.unitarity_residual();
    const auto diag = diagonal_of(d, b);
    if (expected.size() > diag.size()) throw ShapeError("certify: expected diagonal longer than the basis");
    for (std::size_t j = 0; j < expected.size(); ++j)
        c.diagonal_residual = std::max(c.diagonal_residual, std::abs(diag[j] - expected[j]));
    c.norm_observed = operator_norm(d);
    c.norm_bound_claimed = norm_bound;
    return c;
}

}  // namespace diagkit
