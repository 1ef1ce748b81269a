#include <cmath>

#include "diagkit/numrange.hpp"
#include "diagkit/rebase.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace diagkit;
using namespace diagkit::rebase;

namespace {

// [[I, 0], [T, 0]] over (e_0..e_{K-1}, e'_0..e'_{K-1}) with diag(T) = d.
ComplexMatrix paired_idempotent(const std::vector<Complex>& d, std::mt19937_64* rng = nullptr) {
    const std::size_t k = d.size();
    ComplexMatrix m(2 * k, 2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        m(i, i) = 1.0;
        m(k + i, i) = d[i];
        if (rng != nullptr)
            for (std::size_t j = 0; j < k; ++j)
                if (j != i) m(k + i, j) = testing::random_complex(*rng, 0.5);
    }
    return m;
}

PairList standard_pairs(std::size_t k) {
    PairList p;
    for (std::size_t i = 0; i < k; ++i) p.emplace_back(i, k + i);
    return p;
}

// Independent evaluation of sum_{n<=m} d^- against the first-group rule.
std::size_t brute_first_boundary(const std::vector<double>& d) {
    auto dm = [](double x) { return (std::sqrt(1.0 + x * x) - 1.0) / 2.0; };
    for (std::size_t m = 1; m <= d.size(); ++m) {
        double s = 0.0;
        for (std::size_t n = 0; n < m; ++n) s += dm(d[n]);
        if (s >= 1.0 + dm(d[0])) return m;
    }
    return 0;
}

}  // namespace

TEST_CASE("bootstrap plan factories") {
    const auto p = BootstrapPlan::halving({0.0, 2.0, 4.0});
    CHECK(p.d.size() == 2);
    CHECK(std::abs(p.d[0] - 1.0) < 1e-15);
    CHECK(std::abs(p.d[1] - 2.5) < 1e-15);
    CHECK(p.lambda[0] == 0.5);
    const auto q = BootstrapPlan::from_targets({0.0, 2.0}, {1.5});
    CHECK(q.lambda[0] == doctest::Approx(0.25));
    CHECK_THROWS_AS(BootstrapPlan::from_targets({0.0, 2.0, 1.0}, {1.0, 5.0}), DomainError);
}

TEST_CASE("bootstrap fan endpoint step relabels") {
    const auto t = ComplexMatrix::from_rows({{Complex(1.0, 1.0), 2.0}, {0.5, -3.0}});
    const auto plan = BootstrapPlan::from_targets({Complex(1.0, 1.0), -3.0}, {Complex(1.0, 1.0)});
    CHECK(plan.lambda[0] == doctest::Approx(1.0));
    const auto res = bootstrap_fan(t, OrthonormalBasis::standard(2), plan);
    CHECK(std::abs(res.realized[0] + 3.0) < 1e-12);
    CHECK(std::abs(testing::quad_form(t, res.b.vector(0)) + 3.0) < 1e-12);
}

TEST_CASE("bootstrap fan with halving realizes the targets") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 9;
        std::vector<Complex> d(n);
        for (auto& v : d) v = testing::random_complex(rng, 3.0);
        // r_0 = d_0 and r_n = 2 d_n - d_{n-1}
        std::vector<Complex> r(n);
        r[0] = d[0];
        for (std::size_t i = 1; i < n; ++i) r[i] = 2.0 * d[i] - d[i - 1];
        auto t = testing::random_matrix(rng, n, n);
        for (std::size_t i = 0; i < n; ++i) t(i, i) = r[i];
        const auto res = bootstrap_fan(t, OrthonormalBasis::standard(n), BootstrapPlan::halving(r));
        for (std::size_t i = 1; i < n; ++i) {
            CHECK(std::abs(testing::quad_form(t, res.b.vector(i - 1)) - d[i]) <= 1e-10);
            CHECK(res.overlaps[i - 1] <= 0.5 + 1e-10);
        }
        CHECK(std::abs(testing::quad_form(t, res.f) - d[n - 1]) <= 1e-10);
        CHECK(res.span_residual <= 1e-9);
    }
}

TEST_CASE("bootstrap fan on random operators and plans") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> ul(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 8;
        const auto t = trial % 2 == 0 ? testing::random_hermitian(rng, n) : testing::random_matrix(rng, n, n, 2.0);
        // embed in a larger space through a random isometry
        const auto u = testing::random_unitary(rng, n + 3).block(0, 0, n + 3, n);
        const auto big = u * t * u.adjoint();
        const auto e = OrthonormalBasis::adopt(u);
        const auto r = diagonal_of(big, e);
        std::vector<Complex> d;
        Complex prev = r[0];
        for (std::size_t i = 1; i < n; ++i) {
            prev = ul(rng) * prev + 0.0;
            const double lam = ul(rng);
            prev = lam * (d.empty() ? r[0] : d.back()) + (1.0 - lam) * r[i];
            d.push_back(prev);
        }
        const auto plan = BootstrapPlan::from_targets(r, d);
        const auto res = bootstrap_fan(big, e, plan);
        for (std::size_t i = 1; i < n; ++i) {
            const Complex want = r[i] + plan.previous(i) - d[i - 1];
            CHECK(std::abs(testing::quad_form(big, res.b.vector(i - 1)) - want) <= 1e-10);
            CHECK(res.overlaps[i - 1] <= plan.lambda[i - 1] + 1e-10);
        }
        CHECK(std::abs(testing::quad_form(big, res.f) - d.back()) <= 1e-10);
        CHECK(res.span_residual <= 1e-9);
        CHECK(res.b.unitarity_residual() <= 1e-10);
    }
}

TEST_CASE("bootstrap fan rejects inconsistent plans") {
    const auto t = ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 2.0}});
    auto plan = BootstrapPlan::halving({0.0, 2.0});
    plan.r[1] = 3.0;
    CHECK_THROWS_AS(bootstrap_fan(t, OrthonormalBasis::standard(2), plan), DomainError);
    plan = BootstrapPlan::halving({0.0, 2.0});
    plan.d[0] = Complex(1.0, 1.0);
    CHECK_THROWS_WITH_AS(bootstrap_fan(t, OrthonormalBasis::standard(2), plan), doctest::Contains("step 1"),
                         DomainError);
}

TEST_CASE("greedy boundaries for constant nilpotent diagonal") {
    const std::vector<double> ones(40, 1.0);
    const auto m = greedy_boundaries(ones, 40);
    REQUIRE(!m.empty());
    CHECK(m[0] == 6);
    CHECK(m[0] == brute_first_boundary(ones));
    for (std::size_t k = 1; k < m.size(); ++k) CHECK(m[k] > m[k - 1]);
    const std::vector<double> zeros(40, 0.0);
    CHECK(greedy_boundaries(zeros, 40).empty());
}

TEST_CASE("zero diagonalization of a paired idempotent") {
    SUBCASE("constant d = 1") {
        const std::size_t k = 40;
        std::mt19937_64 rng(23);
        const auto d = paired_idempotent(std::vector<Complex>(k, 1.0), &rng);
        const auto res = zero_diagonalize_idempotent(d, standard_pairs(k), k);
        CHECK(res.plan.m.front() == 6);
        CHECK(!res.plan.groups.empty());
        for (const auto& s : res.plan.group_sums) CHECK(std::abs(s) <= 1e-10);
        CHECK(res.g.unitarity_residual() <= 1e-10);
        const auto diag = diagonal_of(d, res.g);
        for (const auto& grp : res.plan.groups)
            for (std::size_t col : grp) CHECK(std::abs(diag[col]) <= 1e-9);
        CHECK(idempotency_residual(change_of_basis(d, res.g)) <= 1e-10);
        std::size_t covered = res.plan.unprocessed.size();
        for (const auto& grp : res.plan.groups) covered += grp.size();
        CHECK(covered == 2 * k);
    }
    SUBCASE("projection case completes no group") {
        const auto d = paired_idempotent(std::vector<Complex>(10, 0.0));
        const auto res = zero_diagonalize_idempotent(d, standard_pairs(10), 10);
        CHECK(res.plan.groups.empty());
        CHECK(res.plan.unprocessed.size() == 20);
    }
    SUBCASE("growing d_n = n") {
        std::vector<Complex> dv(24);
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = static_cast<double>(i + 1);
        const auto d = paired_idempotent(dv);
        const auto res = zero_diagonalize_idempotent(d, standard_pairs(dv.size()), dv.size());
        CHECK(res.plan.groups.size() >= 2);
        for (const auto& s : res.plan.group_sums) CHECK(std::abs(s) <= 1e-10);
        const auto diag = diagonal_of(d, res.g);
        for (const auto& grp : res.plan.groups)
            for (std::size_t col : grp) CHECK(std::abs(diag[col]) <= 1e-9);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(zero_diagonalize_idempotent(ComplexMatrix::identity(2) * 2.0, standard_pairs(1), 1),
                        PreconditionError);
        const auto d = paired_idempotent({Complex(0.0, 1.0)});
        CHECK_THROWS_AS(zero_diagonalize_idempotent(d, standard_pairs(1), 1), PreconditionError);
    }
}

TEST_CASE("phase normalization") {
    const auto d = paired_idempotent({1.0, -3.0, Complex(0.0, 2.0)});
    const auto pn = phase_normalize(d, standard_pairs(3));
    CHECK(std::abs(pn.phases[0] - 1.0) < 1e-15);
    CHECK(std::abs(pn.phases[1] + 1.0) < 1e-15);
    CHECK(std::abs(pn.phases[2] - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(pn.matrix(4, 1) - 3.0) < 1e-15);
    CHECK(std::abs(pn.matrix(5, 2) - 2.0) < 1e-15);
    CHECK(testing::max_abs_diff(pn.matrix, change_of_basis(d, pn.basis)) < 1e-15);
    const auto plain = phase_normalize(paired_idempotent({1.0, 2.0}), standard_pairs(2));
    CHECK(plain.basis.columns() == ComplexMatrix::identity(4));
}

TEST_CASE("absolutely summable rebasis") {
    SUBCASE("alternating diagonal") {
        const std::size_t n = 20;
        std::mt19937_64 rng(24);
        auto t = testing::random_matrix(rng, n, n);
        std::vector<Complex> dg(n);
        for (std::size_t i = 0; i < n; ++i) t(i, i) = dg[i] = i % 2 == 0 ? 1.0 : -1.0;
        std::vector<std::size_t> nk;
        for (std::size_t k = 1; 2 * k <= n; ++k) nk.push_back(2 * k);
        const auto info = PartialSumTrace::with_indices(dg, nk, 0.0);
        const auto res = absolutely_summable_rebasis(t, OrthonormalBasis::standard(n), info);
        CHECK(res.processed == n);
        CHECK(res.abs_sum <= 1e-9);
        CHECK(res.abs_sum <= res.bound + 1e-8);
        for (const auto& v : res.segment_values) CHECK(std::abs(v) < 1e-14);
    }
    SUBCASE("constant diagonal stays constant") {
        const std::vector<Complex> dg(6, 0.25);
        const auto t = ComplexMatrix::diagonal(dg);
        const auto info = PartialSumTrace::with_indices(dg, {4, 5, 6}, 1.5);
        const auto res = absolutely_summable_rebasis(t, OrthonormalBasis::standard(6), info);
        for (const auto& v : diagonal_of(t, res.basis)) CHECK(std::abs(v - 0.25) < 1e-12);
    }
    SUBCASE("derived indices") {
        std::mt19937_64 rng(25);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 30;
            auto t = testing::random_matrix(rng, n, n, 0.3);
            std::vector<Complex> dg(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double sign = i % 2 == 0 ? 1.0 : -1.0;
                t(i, i) = dg[i] = sign * 2.0 / static_cast<double>(i / 2 + 1) + testing::random_complex(rng, 0.01);
            }
            Complex limit = 0.0;
            for (const auto& v : dg) limit += v;
            const auto info = PartialSumTrace::derive(dg, limit);
            for (std::size_t k = 0; k < info.n.size(); ++k)
                CHECK(std::abs(info.s[info.n[k] - 1] - limit) <= std::ldexp(1.0, -static_cast<int>(k + 1)));
            const auto res = absolutely_summable_rebasis(t, OrthonormalBasis::standard(n), info);
            CHECK(res.abs_sum <= res.bound + 1e-8);
            CHECK(res.basis.unitarity_residual() <= 1e-10);
        }
    }
    SUBCASE("indices beyond the dimension are reported") {
        const std::vector<Complex> dg{1.0, -1.0, 1.0, -1.0};
        auto info = PartialSumTrace::with_indices(dg, {2, 4}, 0.0);
        info.n.push_back(9);
        const auto res = absolutely_summable_rebasis(ComplexMatrix::diagonal(dg), OrthonormalBasis::standard(4), info);
        CHECK(res.truncated);
        CHECK(res.processed == 4);
    }
}
