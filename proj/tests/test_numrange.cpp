#include <cmath>
#include <numbers>

#include "diagkit/numrange.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace diagkit;
using namespace diagkit::numrange;

namespace {

// Explicit R* [[1,0],[d,0]] R diagonal, independent of the closed forms.
std::pair<double, double> conjugated_diagonal(double d, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double m[2][2] = {{1.0, 0.0}, {d, 0.0}};
    const double r[2][2] = {{c, -s}, {s, c}};
    double out[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out[k] += r[i][k] * m[i][j] * r[j][k];
    return {out[0], out[1]};
}

}  // namespace

TEST_CASE("rotation diagonal closed forms") {
    auto r0 = rotation_diagonal(0.0, 0.0);
    CHECK(r0.diag_hi == doctest::Approx(1.0));
    CHECK(r0.diag_lo == doctest::Approx(0.0));

    const double d = std::sqrt(3.0);
    const auto r = rotation_diagonal(d, std::numbers::pi / 6.0);
    CHECK(std::abs(r.diag_lo + 0.5) < 1e-15);
    CHECK(std::abs(r.diag_hi - 1.5) < 1e-15);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ud(0.0, 20.0);
    std::uniform_real_distribution<double> ut(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double dd = ud(rng);
        const double th = ut(rng);
        const auto out = rotation_diagonal(dd, th);
        const auto [hi, lo] = conjugated_diagonal(dd, th);
        CHECK(std::abs(out.diag_hi - hi) < 1e-12);
        CHECK(std::abs(out.diag_lo - lo) < 1e-12);
        CHECK(std::abs(out.diag_hi + out.diag_lo - 1.0) < 1e-14);
        const auto viaLib = diagonal_of(ComplexMatrix::from_rows({{1.0, 0.0}, {dd, 0.0}}),
                                        OrthonormalBasis::adopt(rotation(th)));
        CHECK(std::abs(viaLib[0] - out.diag_hi) < 1e-12);
        CHECK(std::abs(viaLib[1] - out.diag_lo) < 1e-12);
    }
    CHECK_THROWS_AS(rotation_diagonal(-1.0, 0.0), DomainError);
}

TEST_CASE("minimum diagonal rotation") {
    CHECK(min_diagonal_rotation(0.0).theta == 0.0);
    CHECK(min_diagonal_rotation(0.0).diag_lo == 0.0);
    CHECK(std::abs(min_diagonal_rotation(std::sqrt(3.0)).diag_lo + 0.5) < 1e-15);
    CHECK(std::abs(min_diagonal_rotation(1.0).diag_lo - (1.0 - std::sqrt(2.0)) / 2.0) < 1e-15);
    for (double d : {0.0, 0.3, 1.0, std::sqrt(3.0), 7.5, 100.0}) {
        const auto m = min_diagonal_rotation(d);
        CHECK(std::abs(m.theta - std::atan(d) / 2.0) < 1e-16);
        CHECK(std::abs(rotation_diagonal(d, m.theta).diag_lo - m.diag_lo) < 1e-12 * (1.0 + d));
        for (int k = 0; k < 64; ++k) {
            const double th = std::numbers::pi * k / 64.0;
            CHECK(rotation_diagonal(d, th).diag_lo >= m.diag_lo - 1e-12);
        }
        // both closed forms of d^-
        CHECK(std::abs(d_minus(d) - (std::sqrt(1.0 + d * d) - 1.0) / 2.0) < 1e-14 * (1.0 + d));
    }
}

TEST_CASE("theta for target") {
    CHECK(theta_for_target(2.0, 0.0) == 0.0);
    CHECK(std::abs(theta_for_target(std::sqrt(3.0), -0.5) - std::numbers::pi / 6.0) < 1e-12);
    const double th = theta_for_target(1.0, -0.1);
    CHECK(th >= 0.0);
    CHECK(th <= std::atan(1.0) / 2.0);
    CHECK(std::abs(rotation_diagonal(1.0, th).diag_lo + 0.1) <= 1e-11);
    for (double d : {0.5, 1.0, 10.0, 40.0}) {
        for (double f : {0.01, 0.3, 0.77, 0.999}) {
            const double x = -f * d_minus(d);
            CHECK(std::abs(rotation_diagonal(d, theta_for_target(d, x)).diag_lo - x) <= 1e-11);
        }
    }
    CHECK_THROWS_AS(theta_for_target(1.0, 0.1), DomainError);
    CHECK_THROWS_AS(theta_for_target(1.0, -0.3), DomainError);
}

TEST_CASE("segment targets") {
    const auto t = SegmentTarget::from_target(2.0, 0.0, 0.5);
    CHECK(t.lambda == doctest::Approx(0.25));
    const auto deg = SegmentTarget::from_target(Complex(1.0, 1.0), Complex(1.0, 1.0), Complex(1.0, 1.0));
    CHECK(deg.lambda == 0.0);
    CHECK_THROWS_AS(SegmentTarget::from_target(2.0, 0.0, Complex(1.0, 0.1)), DomainError);
    CHECK_THROWS_AS(SegmentTarget::from_target(2.0, 0.0, 3.0), DomainError);
    CHECK_THROWS_AS(SegmentTarget::from_lambda(2.0, 0.0, 1.5), DomainError);
}

TEST_CASE("fan pair") {
    SUBCASE("degenerate segment") {
        const auto a = ComplexMatrix::from_rows({{2.0, 1.0}, {Complex(0.0, 3.0), 2.0}});
        const auto fp = fan_pair(a, SegmentTarget::from_target(2.0, 2.0, 2.0));
        CHECK(std::norm(fp.f[0]) == 0.0);
        CHECK(std::abs(testing::quad_form(a, fp.f) - 2.0) < 1e-15);
    }
    SUBCASE("projection to the midpoint") {
        const auto a = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
        const auto fp = fan_pair(a, SegmentTarget::from_lambda(1.0, 0.0, 0.5));
        CHECK(std::abs(testing::quad_form(a, fp.f) - 0.5) < 1e-14);
        CHECK(std::abs(std::norm(fp.f[0]) - 0.5) < 1e-14);
    }
    SUBCASE("random property") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> ul(0.0, 1.0);
        for (int k = 0; k < 300; ++k) {
            const auto a = testing::random_matrix(rng, 2, 2, 5.0);
            const double lambda = ul(rng);
            const auto t = SegmentTarget::from_lambda(a(0, 0), a(1, 1), lambda);
            const auto fp = fan_pair(a, t);
            CHECK(std::abs(inner(fp.f, fp.b)) < 1e-14);
            CHECK(std::abs(norm2(fp.f) - 1.0) < 1e-14);
            CHECK(std::abs(norm2(fp.b) - 1.0) < 1e-14);
            CHECK(std::abs(testing::quad_form(a, fp.f) - t.target) <= 1e-11);
            CHECK(std::abs(testing::quad_form(a, fp.b) - (a(0, 0) + a(1, 1) - t.target)) <= 1e-11);
            CHECK(std::norm(fp.f[0]) <= lambda + 1e-11);
        }
    }
    CHECK_THROWS_AS(fan_pair(ComplexMatrix(3, 3), SegmentTarget::from_lambda(0.0, 0.0, 0.0)), ShapeError);
}

TEST_CASE("Caratheodory zero") {
    const std::vector<Complex> anti{1.0, -1.0};
    const std::vector<double> half{0.5, 0.5};
    auto cz = caratheodory_zero(anti, half);
    CHECK(cz.indices.size() == 2);
    CHECK(cz.weights[0] == doctest::Approx(0.5));

    const std::vector<Complex> tri{1.0, Complex(0.0, 1.0), Complex(-1.0, -1.0)};
    const std::vector<double> third(3, 1.0 / 3.0);
    cz = caratheodory_zero(tri, third);
    CHECK(cz.indices.size() == 3);
    for (double w : cz.weights) CHECK(w == doctest::Approx(1.0 / 3.0));

    const std::vector<Complex> withzero{2.0, 0.0, -2.0};
    cz = caratheodory_zero(withzero, third);
    CHECK(cz.indices == std::vector<std::size_t>{1});

    CHECK_THROWS_AS(caratheodory_zero(std::vector<Complex>{1.0, 2.0}, half), DomainError);

    // large inputs take the reduction path
    std::mt19937_64 rng(4);
    std::vector<Complex> pts(100);
    Complex mean = 0.0;
    for (auto& p : pts) {
        p = testing::random_complex(rng, 3.0);
        mean += p;
    }
    mean /= 100.0;
    for (auto& p : pts) p -= mean;
    const std::vector<double> w(100, 0.01);
    cz = caratheodory_zero(pts, w);
    CHECK(cz.indices.size() <= 3);
    Complex s = 0.0;
    double ws = 0.0;
    for (std::size_t k = 0; k < cz.indices.size(); ++k) {
        CHECK(cz.weights[k] >= 0.0);
        s += cz.weights[k] * pts[cz.indices[k]];
        ws += cz.weights[k];
    }
    CHECK(std::abs(s) <= 1e-10 * 3.0);
    CHECK(std::abs(ws - 1.0) < 1e-14);
}

TEST_CASE("zero diagonal basis") {
    CHECK(zero_diagonal_basis(ComplexMatrix(3, 3)).columns() == ComplexMatrix::identity(3));

    const auto x = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
    const auto b = zero_diagonal_basis(x);
    for (const auto& v : diagonal_of(x, b)) CHECK(std::abs(v) < 1e-14);

    const std::vector<Complex> dv{1.0, Complex(0.0, 1.0), Complex(-1.0, -1.0)};
    const auto x3 = ComplexMatrix::diagonal(dv);
    const auto b3 = zero_diagonal_basis(x3);
    CHECK(b3.unitarity_residual() < 1e-12);
    for (const auto& v : diagonal_of(x3, b3)) CHECK(std::abs(v) < 1e-12);

    std::mt19937_64 rng(6);
    for (int k = 0; k < 40; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k) % 12;
        auto m = testing::random_matrix(rng, n, n, 2.0);
        const Complex tr = m.trace() / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) -= tr;
        const auto basis = zero_diagonal_basis(m);
        CHECK(basis.full());
        CHECK(basis.unitarity_residual() <= 1e-10);
        const double bound = 1e-9 * (1.0 + operator_norm(m));
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(testing::quad_form(m, basis.vector(j))) <= bound);
    }
    CHECK_THROWS_AS(zero_diagonal_basis(ComplexMatrix::identity(2)), DomainError);
}

TEST_CASE("constant diagonal rebasis") {
    const auto e = OrthonormalBasis::standard(3);
    const auto m = ComplexMatrix::from_rows({{2.0, 1.0, 0.0}, {0.0, 5.0, 0.0}, {0.0, 0.0, -1.0}});
    const std::vector<std::size_t> one{1};
    auto r = constant_diagonal_rebasis(m, e, one);
    CHECK(testing::max_abs_diff(r.vectors, e.columns().select_columns(one)) < 1e-15);

    const auto p = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
    const std::vector<std::size_t> both{0, 1};
    r = constant_diagonal_rebasis(p, OrthonormalBasis::standard(2), both);
    CHECK(std::abs(r.value - 0.5) < 1e-15);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(testing::quad_form(p, r.vectors.column(j)) - 0.5) < 1e-12);

    const std::vector<Complex> abc{3.0, Complex(-1.0, 2.0), Complex(4.0, -2.0)};
    const auto x = ComplexMatrix::diagonal(abc);
    const std::vector<std::size_t> all{0, 1, 2};
    r = constant_diagonal_rebasis(x, e, all);
    CHECK(std::abs(r.value - 2.0) < 1e-14);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(testing::quad_form(x, r.vectors.column(j)) - 2.0) < 1e-10);

    // span preservation inside a larger basis
    std::mt19937_64 rng(8);
    const auto big = testing::random_matrix(rng, 7, 7);
    const OrthonormalBasis u(testing::random_unitary(rng, 7));
    const std::vector<std::size_t> sel{1, 4, 5, 6};
    r = constant_diagonal_rebasis(big, u, sel);
    const auto q = u.columns().select_columns(sel);
    const auto proj_old = q * q.adjoint();
    const auto proj_new = r.vectors * r.vectors.adjoint();
    CHECK(testing::max_abs_diff(proj_old, proj_new) <= 1e-10);
    for (std::size_t j = 0; j < sel.size(); ++j)
        CHECK(std::abs(testing::quad_form(big, r.vectors.column(j)) - r.value) <= 1e-10 * (1.0 + operator_norm(big)));

    const std::vector<std::size_t> bad{0, 3};
    CHECK_THROWS_AS(constant_diagonal_rebasis(m, e, bad), ShapeError);
    const std::vector<std::size_t> dup{0, 0};
    CHECK_THROWS_AS(constant_diagonal_rebasis(m, e, dup), ShapeError);
}
