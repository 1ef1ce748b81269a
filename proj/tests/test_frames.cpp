#include <doctest.h>

#include <numeric>

#include "diagkit/frames.hpp"
#include "diagkit/synth.hpp"
#include "support.hpp"

using namespace diagkit;

namespace {

ComplexMatrix square_minus(const ComplexMatrix& d) { return d * d - d; }

Complex inner(const Vector& a, const Vector& b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

}  // namespace

TEST_CASE("cross gramian examples") {
    frames::FramePair p{2, {{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    CHECK(frames::cross_gramian(p) == ComplexMatrix::identity(2));

    p = {1, {{1.0}, {0.0}}, {{1.0}, {1.0}}};
    const auto g = frames::cross_gramian(p);
    CHECK(g == ComplexMatrix::from_rows({{1.0, 1.0}, {0.0, 0.0}}));

    p.y[1][0] = 2.0;
    p.x[1][0] = 1.0;
    CHECK_THROWS_AS(frames::cross_gramian(p), PreconditionError);
}

TEST_CASE("random frames with canonical duals") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = 1 + trial % 4;
        const std::size_t n = k + trial % 5;
        std::vector<Vector> x(n);
        for (auto& v : x) {
            v.resize(k);
            for (auto& c : v) c = testing::random_complex(rng);
        }
        const auto pair = frames::canonical_dual(k, x);
        const auto g = frames::cross_gramian(pair);
        CHECK(square_minus(g).max_abs() < 1e-9);
        CHECK(std::abs(g.trace() - static_cast<double>(k)) < 1e-9);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(g(i, i) - inner(pair.y[i], pair.x[i])) < 1e-12);

        const auto ex = frames::extract_frames(g);
        CHECK(ex.pair.dim == k);
        CHECK(ex.pair.duality_residual() < 1e-9);
        CHECK(testing::max_abs_diff(frames::cross_gramian(ex.pair), g) < 1e-9);
    }
}

TEST_CASE("extracted frames carry the synthesized diagonal") {
    const auto id = frames::extract_frames(ComplexMatrix::identity(3));
    CHECK(testing::max_abs_diff(frames::cross_gramian(id.pair), ComplexMatrix::identity(3)) < 1e-12);

    const auto ex = frames::extract_frames(ComplexMatrix::from_rows({{1.0, 1.0}, {0.0, 0.0}}));
    CHECK(std::abs(inner(ex.pair.y[0], ex.pair.x[0]) - 1.0) < 1e-12);
    CHECK(std::abs(inner(ex.pair.y[1], ex.pair.x[1])) < 1e-12);

    std::mt19937_64 rng(32);
    std::vector<Complex> d(6);
    for (auto& x : d) x = testing::random_complex(rng);
    d[0] += 2.0 - std::accumulate(d.begin(), d.end(), Complex{});
    const auto syn = synth::idem_finite_rank(d, synth::Route::fan);
    const ComplexMatrix local = syn.b.columns().adjoint() * syn.d * syn.b.columns();
    const auto pair = frames::extract_frames(local).pair;
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(inner(pair.y[i], pair.x[i]) - d[i]) < 1e-9);
}
